#include "stereotac/tactile/recon.hpp"

#include <cmath>

#include "stereotac/poisson.hpp"

namespace stereotac::tactile {

namespace {

// Correlation of (R - B) with each image axis over the masked pixels. In a
// correctly ordered pair the x-step frame correlates along x (its red and
// blue rows sit on the left/right edges) and the y-step frame along y.
struct AxisScores {
  double along_x = 0.0;
  double along_y = 0.0;
  std::size_t count = 0;
};

AxisScores illumination_axis(const ImageRgb8& frame,
                             const std::vector<std::uint8_t>& mask) {
  AxisScores scores;
  const int w = frame.width(), h = frame.height();
  double sum_d = 0, sum_x = 0, sum_y = 0;
  std::size_t n = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (!mask[i]) continue;
      const double d = frame.pixels()[i].r - static_cast<double>(frame.pixels()[i].b);
      sum_d += d;
      sum_x += x;
      sum_y += y;
      ++n;
    }
  }
  if (n < 32) return scores;  // not enough signal to judge
  const double mean_d = sum_d / n, mean_x = sum_x / n, mean_y = sum_y / n;
  double cov_x = 0, cov_y = 0, var_x = 0, var_y = 0, var_d = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (!mask[i]) continue;
      const double d =
          frame.pixels()[i].r - static_cast<double>(frame.pixels()[i].b) - mean_d;
      cov_x += d * (x - mean_x);
      cov_y += d * (y - mean_y);
      var_x += (x - mean_x) * (x - mean_x);
      var_y += (y - mean_y) * (y - mean_y);
      var_d += d * d;
    }
  }
  if (var_d <= 0.0 || var_x <= 0.0 || var_y <= 0.0) return scores;
  scores.along_x = std::abs(cov_x / std::sqrt(var_d * var_x));
  scores.along_y = std::abs(cov_y / std::sqrt(var_d * var_y));
  scores.count = n;
  return scores;
}

}  // namespace

GradientField predict_gradients(const CalibModel& model,
                                const sim::TactileFramePair& pair,
                                const sim::TactileFramePair& reference,
                                const FeatureOptions& opt) {
  const int w = pair.frame_dx.width();
  const int h = pair.frame_dx.height();
  if (pair.frame_dy.width() != w || pair.frame_dy.height() != h) {
    throw Error("tactile frame pair dimensions differ");
  }
  if (model.grid_width() > 0 && (model.grid_width() != w || model.grid_height() != h)) {
    throw Error("frame size does not match the calibration geometry");
  }

  // The raw LED layout (before reference subtraction) identifies the step.
  {
    const std::vector<std::uint8_t> mask_dx = hsv_mask(pair.frame_dx, opt.hsv);
    const std::vector<std::uint8_t> mask_dy = hsv_mask(pair.frame_dy, opt.hsv);
    const AxisScores sx = illumination_axis(pair.frame_dx, mask_dx);
    const AxisScores sy = illumination_axis(pair.frame_dy, mask_dy);
    // Only a decisively wrong orientation counts as a swap.
    if (sx.count > 0 && sx.along_y > sx.along_x * 1.15) {
      throw Error("illumination step mismatch: first frame is not the x-step");
    }
    if (sy.count > 0 && sy.along_x > sy.along_y * 1.15) {
      throw Error("illumination step mismatch: second frame is not the y-step");
    }
  }

  GradientField field{FloatMap(w, h, MapUnit::DimensionlessSlope, 0.0f),
                      FloatMap(w, h, MapUnit::DimensionlessSlope, 0.0f)};

  const ImageRgb8* frames[2] = {&pair.frame_dx, &pair.frame_dy};
  const ImageRgb8* refs[2] = {&reference.frame_dx, &reference.frame_dy};
  FloatMap* out[2] = {&field.gx, &field.gy};

  for (int step = 0; step < 2; ++step) {
    const FeaturePlanes planes = compute_features(*frames[step], *refs[step], opt);
    std::vector<float> features;
    std::vector<std::size_t> where;
    features.reserve(1024);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (!planes.mask[i]) continue;
        features.push_back(planes.r[i]);
        features.push_back(planes.b[i]);
        features.push_back(static_cast<float>(2.0 * x / (w - 1) - 1.0));
        features.push_back(static_cast<float>(2.0 * y / (h - 1) - 1.0));
        where.push_back(i);
      }
    }
    if (where.empty()) continue;
    std::vector<float> pred(where.size() * 2);
    model.predict_batch(features.data(), where.size(), pred.data());
    for (std::size_t s = 0; s < where.size(); ++s) {
      const float angle = pred[s * 2 + step];
      out[step]->values()[where[s]] = std::tan(angle);
    }
  }
  return field;
}

FloatMap integrate_fast_poisson(const GradientField& field, double px_per_mm) {
  const int w = field.gx.width();
  const int h = field.gx.height();
  if (field.gy.width() != w || field.gy.height() != h) {
    throw Error("gradient field dimensions differ");
  }
  if (w < 3 || h < 3) throw Error("gradient field must be at least 3x3");
  for (const float v : field.gx.values()) {
    if (!std::isfinite(v)) throw Error("non-finite gradient value");
  }
  for (const float v : field.gy.values()) {
    if (!std::isfinite(v)) throw Error("non-finite gradient value");
  }

  // Divergence on the interior via central differences; the rim stays at 0.
  const int iw = w - 2, ih = h - 2;
  std::vector<double> rhs(static_cast<std::size_t>(iw) * ih);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double div =
          0.5 * (field.gx.at(x + 1, y) - field.gx.at(x - 1, y)) +
          0.5 * (field.gy.at(x, y + 1) - field.gy.at(x, y - 1));
      rhs[static_cast<std::size_t>(y - 1) * iw + (x - 1)] = div;
    }
  }

  const std::vector<double> z = poisson::solve_dirichlet(rhs, iw, ih);

  FloatMap depth(w, h, MapUnit::Millimeters, 0.0f);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double d = -z[static_cast<std::size_t>(y - 1) * iw + (x - 1)] / px_per_mm;
      depth.at(x, y) = static_cast<float>(std::max(0.0, d));
    }
  }
  return depth;
}

DiskDepth measure_disk_depth(const FloatMap& depth_mm, double center_x_px,
                             double center_y_px, double disk_diameter_mm,
                             double px_per_mm) {
  const double inner_px = 0.8 * 0.5 * disk_diameter_mm * px_per_mm;
  double sum = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < depth_mm.height(); ++y) {
    for (int x = 0; x < depth_mm.width(); ++x) {
      const double dx = x - center_x_px;
      const double dy = y - center_y_px;
      if (dx * dx + dy * dy >= inner_px * inner_px) continue;
      if (!depth_mm.is_valid(x, y)) continue;
      sum += depth_mm.at(x, y);
      ++n;
    }
  }
  if (n == 0) throw Error("region empty");
  return {sum / n, n};
}

}  // namespace stereotac::tactile
