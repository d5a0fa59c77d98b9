// Rendering oracle for the sensor: two-step tactile illumination frames and
// stereo views of the outside scene through the membrane.
#pragma once

#include <array>
#include <optional>
#include <vector>

#include "stereotac/image.hpp"
#include "stereotac/sim/membrane.hpp"
#include "stereotac/stereo/camera.hpp"

namespace stereotac::sim {

enum class RowColor { Red, Blue, Off };

/// Four LED rows on the square perimeter. Row order follows the sensor
/// layout: row 1 = left edge, row 2 = top, row 3 = right, row 4 = bottom.
/// The two-step protocol drives rows 1/3 for the x-gradient frame and rows
/// 2/4 for the y-gradient frame, blue/red respectively.
struct LightRig {
  std::array<RowColor, 4> dx_colors = {RowColor::Blue, RowColor::Off, RowColor::Red,
                                       RowColor::Off};
  std::array<RowColor, 4> dy_colors = {RowColor::Off, RowColor::Blue, RowColor::Off,
                                       RowColor::Red};
  double intensity = 1.4;
  double attenuation_per_px = 0.0009;  // lateral falloff rate, per pixel
  double elevation_deg = 25.0;         // LED beam elevation above the membrane

  void validate() const;
};

struct ReflectiveObject {
  double standoff_mm = 1.0;
  double reflectivity = 0.6;
  double diameter_mm = 8.0;  // footprint of the reflecting face
  double center_x_px = 320.0;
  double center_y_px = 240.0;
  // The face is not flat: a shallow dome whose orientation steers the
  // returned light, so the ghost carries contact-like structure.
  double face_slope = 0.7;
};

/// Outside world seen through (or leaking into) the membrane.
struct ExternalScene {
  std::optional<double> plane_distance_mm;  // flat target, vision mode
  ImageRgb8 texture;                        // empty -> procedural texture
  std::uint64_t texture_seed = 1;
  double texture_px_per_mm = 1.5;  // texel density on the target plane
  double ambient = 0.0;            // normalized ambient radiance, tactile mode
  std::optional<ReflectiveObject> reflective_object;

  void validate() const;

  static ExternalScene dark() { return {}; }
  static ExternalScene plane(double distance_mm, std::uint64_t texture_seed = 1);
};

struct TactileFramePair {
  ImageRgb8 frame_dx;
  ImageRgb8 frame_dy;
};

/// Renders the two sequentially illuminated frames for a deformed membrane
/// surface (mm heightfield, <= 0). Deterministic for a given seed.
TactileFramePair render_tactile_pair(const FloatMap& surface, const LightRig& rig,
                                     const MembraneSpec& membrane,
                                     const ExternalScene& scene,
                                     std::uint64_t seed = 0,
                                     const SensorGrid& grid = {});

struct StereoRenderOptions {
  std::uint64_t seed = 0;
  int frame_index = 0;      // advances per-frame jitter only
  bool zero_noise = false;  // disables speckle and jitter, keeps blur
};

/// Projects the textured scene plane into both cameras, then applies the
/// membrane degradation: opacity-proportional blur, static speckle for
/// painted finishes and per-frame intensity jitter.
std::pair<ImageRgb8, ImageRgb8> render_stereo_pair(const ExternalScene& scene,
                                                   const MembraneSpec& membrane,
                                                   const stereo::StereoRig& rig,
                                                   const StereoRenderOptions& opt = {});

struct BallPress {
  TactileFramePair frames;
  double center_x_px = 0;
  double center_y_px = 0;
  double ball_radius_px = 0;
  double penetration_mm = 0;
};

/// Calibration sequence: n presses of a ball at seeded random positions.
/// Ground truth is exact by construction.
std::vector<BallPress> ball_press_sequence(const MembraneSpec& membrane,
                                           double ball_radius_mm, int n_frames,
                                           std::uint64_t seed,
                                           const SensorGrid& grid = {},
                                           const LightRig& rig = {});

/// No-contact reference pair (flat membrane, no per-frame noise); stored next
/// to calibration data and subtracted before masking.
TactileFramePair render_reference_pair(const MembraneSpec& membrane,
                                       const LightRig& rig = {},
                                       const SensorGrid& grid = {});

}  // namespace stereotac::sim
