#include "stereotac/sim/membrane.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace stereotac::sim {

std::string to_string(Finish f) {
  switch (f) {
    case Finish::Transparent: return "transparent";
    case Finish::SemiReflective: return "semi_reflective";
    case Finish::SemiMatte: return "semi_matte";
    case Finish::OpaqueReflective: return "opaque_reflective";
    case Finish::OpaqueMatte: return "opaque_matte";
  }
  return "semi_reflective";
}

Finish finish_from_string(const std::string& s) {
  if (s == "transparent") return Finish::Transparent;
  if (s == "semi_reflective") return Finish::SemiReflective;
  if (s == "semi_matte") return Finish::SemiMatte;
  if (s == "opaque_reflective") return Finish::OpaqueReflective;
  if (s == "opaque_matte") return Finish::OpaqueMatte;
  throw Error("unknown membrane finish: " + s);
}

MembraneSpec MembraneSpec::preset(Finish f) {
  MembraneSpec m;
  m.finish = f;
  switch (f) {
    case Finish::Transparent:
      m.opacity = 0.0515;
      m.coating_gain = 0.55;  // barely coated, weakest tactile reflection
      m.specular_gain = 0.05;
      m.speckle_density = 0.0;
      m.tactile_noise = 0.012;
      m.tactile_gain_jitter = 0.035;
      m.stereo_jitter = 1.2;
      break;
    case Finish::SemiReflective:
      m.opacity = 0.2446;
      m.coating_gain = 1.0;  // mirror paint, strongest tactile reflection
      m.specular_gain = 0.05;
      m.speckle_density = 0.08;  // visible paint spots
      m.tactile_noise = 0.004;
      m.tactile_gain_jitter = 0.004;
      m.stereo_jitter = 6.0;
      break;
    case Finish::SemiMatte:
      m.opacity = 0.2210;
      m.coating_gain = 0.80;
      m.specular_gain = 0.02;
      m.speckle_density = 0.015;
      m.tactile_noise = 0.007;
      m.tactile_gain_jitter = 0.03;
      m.stereo_jitter = 2.5;
      break;
    case Finish::OpaqueReflective:
      m.opacity = 0.8004;
      m.coating_gain = 1.0;
      m.specular_gain = 0.05;
      m.speckle_density = 0.08;
      m.tactile_noise = 0.003;
      m.tactile_gain_jitter = 0.005;
      m.stereo_jitter = 8.0;
      break;
    case Finish::OpaqueMatte:
      m.opacity = 0.6974;
      m.coating_gain = 0.85;
      m.specular_gain = 0.02;
      m.speckle_density = 0.02;
      m.tactile_noise = 0.006;
      m.tactile_gain_jitter = 0.015;
      m.stereo_jitter = 4.0;
      break;
  }
  return m;
}

void MembraneSpec::validate() const {
  if (opacity < 0.0 || opacity > 1.0) throw Error("membrane opacity must be in [0,1]");
  if (speckle_density < 0.0 || speckle_density > 1.0) {
    throw Error("membrane speckle density must be in [0,1]");
  }
  if (stiffness_radius_px < 0.0) throw Error("membrane stiffness radius must be >= 0");
}

IndenterSpec IndenterSpec::disk(double diameter_mm, double penetration_mm,
                                double cx_px, double cy_px) {
  IndenterSpec s;
  s.shape = Shape::Disk;
  s.disk_diameter_mm = diameter_mm;
  s.penetration_mm = penetration_mm;
  s.center_x_px = cx_px;
  s.center_y_px = cy_px;
  return s;
}

IndenterSpec IndenterSpec::sphere(double radius_mm, double penetration_mm,
                                  double cx_px, double cy_px) {
  IndenterSpec s;
  s.shape = Shape::Sphere;
  s.sphere_radius_mm = radius_mm;
  s.penetration_mm = penetration_mm;
  s.center_x_px = cx_px;
  s.center_y_px = cy_px;
  return s;
}

IndenterSpec IndenterSpec::plane(double penetration_mm) {
  IndenterSpec s;
  s.shape = Shape::Plane;
  s.penetration_mm = penetration_mm;
  return s;
}

namespace {

// Depth-into-membrane profile of the indenter at the requested penetration,
// in mm, >= 0. This is the unsmoothed contact geometry.
std::vector<double> indenter_depth_field(const IndenterSpec& ind, const SensorGrid& grid) {
  const int w = grid.width, h = grid.height;
  std::vector<double> d(static_cast<std::size_t>(w) * h, 0.0);
  const double p = ind.penetration_mm;
  if (p < 0.0) throw Error("indenter penetration must be >= 0");
  if (p == 0.0 && ind.shape != IndenterSpec::Shape::Heightfield) return d;

  switch (ind.shape) {
    case IndenterSpec::Shape::Plane: {
      std::fill(d.begin(), d.end(), p);
      break;
    }
    case IndenterSpec::Shape::Disk: {
      const double r_px = 0.5 * ind.disk_diameter_mm * grid.px_per_mm;
      if (2.0 * r_px > std::min(w, h)) {
        throw Error("indenter larger than the sensor grid");
      }
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double dx = x - ind.center_x_px;
          const double dy = y - ind.center_y_px;
          if (dx * dx + dy * dy < r_px * r_px) {
            d[static_cast<std::size_t>(y) * w + x] = p;
          }
        }
      }
      break;
    }
    case IndenterSpec::Shape::Sphere: {
      const double r_mm = ind.sphere_radius_mm;
      if (r_mm <= 0.0) throw Error("ball radius must be > 0");
      const double r_px = r_mm * grid.px_per_mm;
      if (2.0 * r_px > std::min(w, h)) {
        throw Error("indenter larger than the sensor grid");
      }
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double dx = (x - ind.center_x_px) / grid.px_per_mm;
          const double dy = (y - ind.center_y_px) / grid.px_per_mm;
          const double rho2 = dx * dx + dy * dy;
          if (rho2 >= r_mm * r_mm) continue;
          // Sphere bottom sits p below the membrane plane.
          const double depth = p - r_mm + std::sqrt(r_mm * r_mm - rho2);
          if (depth > 0.0) d[static_cast<std::size_t>(y) * w + x] = depth;
        }
      }
      break;
    }
    case IndenterSpec::Shape::Heightfield: {
      if (ind.heightfield.width() != w || ind.heightfield.height() != h) {
        throw Error("indenter larger than the sensor grid");
      }
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          d[static_cast<std::size_t>(y) * w + x] =
              std::max(0.0, static_cast<double>(ind.heightfield.at(x, y)));
        }
      }
      break;
    }
  }
  return d;
}

void gaussian_blur_2d(std::vector<double>& data, int w, int h, double sigma) {
  if (sigma <= 0.0) return;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double norm = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    norm += kernel[i + radius];
  }
  for (double& k : kernel) k /= norm;

  std::vector<double> tmp(data.size());
  // horizontal pass, edge-clamped
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int xx = std::clamp(x + i, 0, w - 1);
        acc += kernel[i + radius] * data[static_cast<std::size_t>(y) * w + xx];
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  // vertical pass
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int yy = std::clamp(y + i, 0, h - 1);
        acc += kernel[i + radius] * tmp[static_cast<std::size_t>(yy) * w + x];
      }
      data[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
}

}  // namespace

FloatMap deform_membrane(const IndenterSpec& indenter, const MembraneSpec& membrane,
                         const SensorGrid& grid) {
  membrane.validate();
  std::vector<double> depth = indenter_depth_field(indenter, grid);

  const double cap = indenter.shape == IndenterSpec::Shape::Heightfield
                         ? *std::max_element(depth.begin(), depth.end())
                         : indenter.penetration_mm;
  for (double& v : depth) v = std::clamp(v, 0.0, cap);

  if (membrane.stiffness_radius_px > 0.0) {
    gaussian_blur_2d(depth, grid.width, grid.height, membrane.stiffness_radius_px / 2.0);
  }

  FloatMap surface(grid.width, grid.height, MapUnit::Millimeters);
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      const double v = depth[static_cast<std::size_t>(y) * grid.width + x];
      surface.at(x, y) = static_cast<float>(-std::clamp(v, 0.0, cap));
    }
  }
  return surface;
}

OpacityReading measure_opacity(const MembraneSpec& membrane, double source_lux) {
  if (source_lux <= 0.0) throw Error("source luminance must be > 0");
  membrane.validate();
  OpacityReading r;
  r.transmitted_lux = source_lux * (1.0 - membrane.opacity);
  r.opacity_pct = (1.0 - r.transmitted_lux / source_lux) * 100.0;
  return r;
}

}  // namespace stereotac::sim
