// Calibration-ball labeling: turns pressed-ball frames with known geometry
// into angle-labeled training samples for the gradient regressor.
#pragma once

#include <filesystem>
#include <vector>

#include "stereotac/sim/render.hpp"
#include "stereotac/tactile/hsv.hpp"

namespace stereotac::tactile {

/// One contact pixel from one illumination step. Features are the step
/// frame's red/blue values after reference subtraction (0.5 = resting level)
/// plus the normalized pixel position; labels are the ball-geometry angles
/// for both axes. `axis` records which step produced the features (0 = the
/// x-gradient frame, 1 = the y-gradient frame) and therefore which label the
/// features can explain.
struct CalibrationSample {
  float r = 0.5f;
  float b = 0.5f;
  float x = 0.0f;  // normalized to [-1, 1]
  float y = 0.0f;
  double dx_rad = 0.0;
  double dy_rad = 0.0;
  std::uint8_t axis = 0;
};

struct FeatureOptions {
  HsvFilterSpec hsv;
  /// Minimum |r diff| + |b diff| (normalized) for a pixel to count as signal
  /// after reference subtraction.
  double diff_threshold = 0.03;
};

/// Per-pixel features of one step frame: mask plus (r, b, x, y) planes.
struct FeaturePlanes {
  std::vector<std::uint8_t> mask;  // LED-toned and significant vs reference
  std::vector<float> r, b;
  int width = 0, height = 0;
};

FeaturePlanes compute_features(const ImageRgb8& frame, const ImageRgb8& reference,
                               const FeatureOptions& opt);

/// Labels every masked contact pixel (distance to the press center < ball
/// radius) with dx = asin((px - cx) / r), dy = asin((py - cy) / r).
/// `max_radius_px` tightens the acceptance circle below the ball radius so
/// pixels outside the true contact area (where the labeling geometry does not
/// hold) are dropped; 0 keeps the full ball radius.
/// Throws "empty calibration frame" when nothing survives the masks.
std::vector<CalibrationSample> gen_ball_labels(const sim::TactileFramePair& pair,
                                               const sim::TactileFramePair& reference,
                                               double center_x_px, double center_y_px,
                                               double ball_radius_px,
                                               const FeatureOptions& opt = {},
                                               double max_radius_px = 0.0);

void write_samples_csv(const std::vector<CalibrationSample>& samples,
                       const std::filesystem::path& path);
std::vector<CalibrationSample> read_samples_csv(const std::filesystem::path& path);

}  // namespace stereotac::tactile
