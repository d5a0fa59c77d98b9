// Membrane optical model, indenter geometry and membrane deformation.
// The five membrane presets mirror the physical samples: opacity from the
// lux-meter characterization, noise and gain terms from the finish.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "stereotac/image.hpp"

namespace stereotac::sim {

enum class Finish {
  Transparent,
  SemiReflective,
  SemiMatte,
  OpaqueReflective,
  OpaqueMatte,
};

std::string to_string(Finish f);
Finish finish_from_string(const std::string& s);

struct MembraneSpec {
  Finish finish = Finish::SemiReflective;
  double opacity = 0.2446;           // fraction of external light blocked, [0,1]
  double specular_exponent = 8.0;    // specular lobe sharpness in tactile shading
  double specular_gain = 0.0;        // specular weight (reflective finishes)
  double coating_gain = 1.0;         // diffuse tactile signal strength of the coating
  double speckle_density = 0.0;      // fraction of pixels with static paint spots, [0,1]
  double stiffness_radius_px = 14.0;  // deformation smoothing radius
  double tactile_noise = 0.004;      // per-frame additive noise, normalized intensity
  double tactile_gain_jitter = 0.005;  // per-frame LED row gain instability (relative)
  double stereo_jitter = 1.0;        // per-frame additive noise in vision mode, u8 units
  double stereo_blur_px_per_opacity = 8.0;  // view blur sigma = opacity * this

  /// Defaults reproducing the characterization table for each finish.
  static MembraneSpec preset(Finish f);

  void validate() const;
};

struct SensorGrid {
  int width = 640;
  int height = 480;
  double px_per_mm = 15.0;
};

struct IndenterSpec {
  enum class Shape { Sphere, Disk, Plane, Heightfield };

  Shape shape = Shape::Disk;
  double sphere_radius_mm = 4.0;
  double disk_diameter_mm = 13.0;
  double penetration_mm = 1.0;
  double center_x_px = 320.0;
  double center_y_px = 240.0;
  /// Shape::Heightfield only: depth-into-membrane profile in mm, >= 0, on the
  /// sensor grid.
  FloatMap heightfield;

  static IndenterSpec disk(double diameter_mm, double penetration_mm,
                           double cx_px, double cy_px);
  static IndenterSpec sphere(double radius_mm, double penetration_mm,
                             double cx_px, double cy_px);
  static IndenterSpec plane(double penetration_mm);
};

/// Membrane surface height in mm after pressing the indenter in: h <= 0
/// everywhere, |h| <= penetration, smoothed by a Gaussian kernel of radius
/// stiffness_radius_px (none when the radius is 0).
FloatMap deform_membrane(const IndenterSpec& indenter, const MembraneSpec& membrane,
                         const SensorGrid& grid = {});

struct OpacityReading {
  double transmitted_lux;
  double opacity_pct;
};

/// Lux-meter procedure: transmitted light under the membrane and the opacity
/// percentage relative to the uncovered reading.
OpacityReading measure_opacity(const MembraneSpec& membrane, double source_lux);

}  // namespace stereotac::sim
