// Depth-quality metrics over flat-target captures: best-fit plane, signed
// median Z-accuracy with tilt correction, plane-residual RMSE and per-pixel
// temporal noise, all normalized by the ground-truth distance.
#pragma once

#include <string>
#include <vector>

#include "stereotac/image.hpp"
#include "stereotac/report.hpp"

namespace stereotac::eval {

struct Roi {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open

  bool empty() const { return x1 <= x0 || y1 <= y0; }
  /// Central fraction of a frame (default 60% per side).
  static Roi central(int width, int height, double fraction = 0.6);
};

struct EvalConfig {
  double gt_mm = 0.0;
  Roi roi;
  int frame_count = 10;
  std::string membrane_label;
  bool absolute_median = false;  // |median| variant of the accuracy metric
};

struct PlaneFit {
  double a = 0, b = 0, c = 0;  // z = a*x + b*y + c over pixel coordinates
  double residual_rms = 0.0;
  std::size_t valid_count = 0;
  std::vector<float> residuals;  // per valid pixel, fit order
};

/// Least-squares plane over the valid ROI pixels. Throws on fewer than three
/// valid pixels or a rank-deficient (collinear) arrangement.
PlaneFit fit_plane(const FloatMap& depth, const Roi& roi);

/// Signed median depth error after rotating the ROI points so the fitted
/// plane normal aligns with the optical axis; percent of GT.
double z_accuracy_pct(const FloatMap& depth, const EvalConfig& cfg);

/// RMS of the best-fit-plane residuals over the ROI, percent of GT.
double spatial_rmse_pct(const FloatMap& depth, const EvalConfig& cfg);

/// Mean over ROI pixels of the per-pixel std across frames (population
/// divisor), percent of GT. Pixels must be valid in every frame to count.
double temporal_noise_pct(const std::vector<FloatMap>& frames, const EvalConfig& cfg);

struct EvalResult {
  std::string membrane_label;
  double distance_mm = 0.0;
  bool valid = false;  // false marks a gap in the report
  double z_accuracy_mean_pct = 0.0;
  double rmse_mean_pct = 0.0;
  double rmse_std_pct = 0.0;
  double temporal_noise_pct = 0.0;
  std::vector<double> per_frame_rmse_pct;
  std::vector<double> per_frame_zacc_pct;
};

/// Per-frame metrics plus the cross-frame temporal noise for one cell.
EvalResult evaluate_sequence(const std::vector<FloatMap>& frames, const EvalConfig& cfg,
                             double distance_mm);

/// Tables in the sweep layout: one row per distance (ascending), one column
/// per membrane; missing cells stay gaps.
ReportTable assemble_rmse_report(const std::vector<EvalResult>& results);
ReportTable assemble_temporal_report(const std::vector<EvalResult>& results);
ReportTable assemble_zacc_report(const std::vector<EvalResult>& results);

}  // namespace stereotac::eval
