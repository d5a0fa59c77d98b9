#include "stereotac/eval/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "stereotac/kernels.hpp"

namespace stereotac::eval {

Roi Roi::central(int width, int height, double fraction) {
  Roi roi;
  roi.x0 = static_cast<int>(width * (1.0 - fraction) / 2.0);
  roi.y0 = static_cast<int>(height * (1.0 - fraction) / 2.0);
  roi.x1 = width - roi.x0;
  roi.y1 = height - roi.y0;
  return roi;
}

PlaneFit fit_plane(const FloatMap& depth, const Roi& roi) {
  if (roi.empty() || roi.x0 < 0 || roi.y0 < 0 || roi.x1 > depth.width() ||
      roi.y1 > depth.height()) {
    throw Error("empty or out-of-range ROI");
  }
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  std::size_t n = 0;
  for (int y = roi.y0; y < roi.y1; ++y) {
    for (int x = roi.x0; x < roi.x1; ++x) {
      if (!depth.is_valid(x, y)) continue;
      const Eigen::Vector3d row(x, y, 1.0);
      ata += row * row.transpose();
      atb += row * static_cast<double>(depth.at(x, y));
      ++n;
    }
  }
  if (n < 3) throw Error("plane fit needs at least 3 valid pixels");
  const Eigen::FullPivLU<Eigen::Matrix3d> lu(ata);
  if (!lu.isInvertible()) throw Error("plane fit is rank-deficient (collinear pixels)");
  const Eigen::Vector3d coeff = lu.solve(atb);

  PlaneFit fit;
  fit.a = coeff[0];
  fit.b = coeff[1];
  fit.c = coeff[2];
  fit.valid_count = n;
  fit.residuals.reserve(n);
  for (int y = roi.y0; y < roi.y1; ++y) {
    for (int x = roi.x0; x < roi.x1; ++x) {
      if (!depth.is_valid(x, y)) continue;
      fit.residuals.push_back(
          static_cast<float>(depth.at(x, y) - (fit.a * x + fit.b * y + fit.c)));
    }
  }
  const kernels::Sums sums =
      kernels::active().sum_sq_f32(fit.residuals.data(), fit.residuals.size());
  fit.residual_rms = std::sqrt(sums.sum_sq / static_cast<double>(n));
  return fit;
}

double z_accuracy_pct(const FloatMap& depth, const EvalConfig& cfg) {
  if (cfg.gt_mm <= 0.0) throw Error("ground-truth distance must be > 0");
  const PlaneFit fit = fit_plane(depth, cfg.roi);

  // Rotate the ROI point set about its centroid so the fitted normal lands on
  // the optical axis, then take the median of the corrected depths.
  const Eigen::Vector3d normal = Eigen::Vector3d(-fit.a, -fit.b, 1.0).normalized();
  const Eigen::Vector3d z_axis(0.0, 0.0, 1.0);
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  const Eigen::Vector3d axis = normal.cross(z_axis);
  const double axis_norm = axis.norm();
  if (axis_norm > 1e-15) {
    const double angle = std::atan2(axis_norm, normal.dot(z_axis));
    Eigen::AngleAxisd aa(angle, axis / axis_norm);
    rot = aa.toRotationMatrix();
  }

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  std::size_t n = 0;
  for (int y = cfg.roi.y0; y < cfg.roi.y1; ++y) {
    for (int x = cfg.roi.x0; x < cfg.roi.x1; ++x) {
      if (!depth.is_valid(x, y)) continue;
      centroid += Eigen::Vector3d(x, y, depth.at(x, y));
      ++n;
    }
  }
  centroid /= static_cast<double>(n);

  std::vector<double> corrected;
  corrected.reserve(n);
  for (int y = cfg.roi.y0; y < cfg.roi.y1; ++y) {
    for (int x = cfg.roi.x0; x < cfg.roi.x1; ++x) {
      if (!depth.is_valid(x, y)) continue;
      const Eigen::Vector3d p(x, y, depth.at(x, y));
      corrected.push_back((rot * (p - centroid) + centroid).z());
    }
  }
  std::sort(corrected.begin(), corrected.end());
  const std::size_t m = corrected.size();
  const double median = m % 2 == 1 ? corrected[m / 2]
                                   : 0.5 * (corrected[m / 2 - 1] + corrected[m / 2]);
  const double acc = (median - cfg.gt_mm) / cfg.gt_mm * 100.0;
  return cfg.absolute_median ? std::abs(acc) : acc;
}

double spatial_rmse_pct(const FloatMap& depth, const EvalConfig& cfg) {
  if (cfg.gt_mm <= 0.0) throw Error("ground-truth distance must be > 0");
  const PlaneFit fit = fit_plane(depth, cfg.roi);
  return fit.residual_rms / cfg.gt_mm * 100.0;
}

double temporal_noise_pct(const std::vector<FloatMap>& frames, const EvalConfig& cfg) {
  if (frames.size() < 2) throw Error("temporal noise needs at least 2 frames");
  if (cfg.gt_mm <= 0.0) throw Error("ground-truth distance must be > 0");
  const int w = frames.front().width();
  const int h = frames.front().height();
  for (const FloatMap& f : frames) {
    if (f.width() != w || f.height() != h) throw Error("frame size mismatch");
  }
  if (cfg.roi.empty() || cfg.roi.x1 > w || cfg.roi.y1 > h) {
    throw Error("empty or out-of-range ROI");
  }

  const double n_frames = static_cast<double>(frames.size());
  double sum_std = 0.0;
  std::size_t n_pixels = 0;
  for (int y = cfg.roi.y0; y < cfg.roi.y1; ++y) {
    for (int x = cfg.roi.x0; x < cfg.roi.x1; ++x) {
      bool all_valid = true;
      double sum = 0.0, sum_sq = 0.0;
      for (const FloatMap& f : frames) {
        if (!f.is_valid(x, y)) {
          all_valid = false;
          break;
        }
        const double v = f.at(x, y);
        sum += v;
        sum_sq += v * v;
      }
      if (!all_valid) continue;
      const double mean = sum / n_frames;
      const double var = std::max(0.0, sum_sq / n_frames - mean * mean);
      sum_std += std::sqrt(var);
      ++n_pixels;
    }
  }
  if (n_pixels == 0) throw Error("no pixel is valid across all frames");
  return sum_std / static_cast<double>(n_pixels) / cfg.gt_mm * 100.0;
}

EvalResult evaluate_sequence(const std::vector<FloatMap>& frames, const EvalConfig& cfg,
                             double distance_mm) {
  EvalResult result;
  result.membrane_label = cfg.membrane_label;
  result.distance_mm = distance_mm;
  double zacc_sum = 0.0, rmse_sum = 0.0, rmse_sq = 0.0;
  for (const FloatMap& frame : frames) {
    const double z = z_accuracy_pct(frame, cfg);
    const double r = spatial_rmse_pct(frame, cfg);
    result.per_frame_zacc_pct.push_back(z);
    result.per_frame_rmse_pct.push_back(r);
    zacc_sum += z;
    rmse_sum += r;
    rmse_sq += r * r;
  }
  const double n = static_cast<double>(frames.size());
  result.z_accuracy_mean_pct = zacc_sum / n;
  result.rmse_mean_pct = rmse_sum / n;
  result.rmse_std_pct = std::sqrt(std::max(0.0, rmse_sq / n - result.rmse_mean_pct *
                                                                  result.rmse_mean_pct));
  result.temporal_noise_pct = temporal_noise_pct(frames, cfg);
  result.valid = true;
  return result;
}

namespace {

ReportTable assemble(const std::vector<EvalResult>& results, const std::string& title,
                     const std::string& unit,
                     double (*value)(const EvalResult&),
                     double (*spread)(const EvalResult&)) {
  std::set<double> distances;
  std::vector<std::string> membranes;  // first-seen order
  for (const EvalResult& r : results) {
    distances.insert(r.distance_mm);
    if (std::find(membranes.begin(), membranes.end(), r.membrane_label) ==
        membranes.end()) {
      membranes.push_back(r.membrane_label);
    }
  }
  std::vector<std::string> row_labels;
  for (double d : distances) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g mm", d);
    row_labels.push_back(buf);
  }
  ReportTable table(title, row_labels, membranes,
                    std::vector<std::string>(membranes.size(), unit));
  for (const EvalResult& r : results) {
    if (!r.valid) continue;
    const std::size_t row =
        std::distance(distances.begin(), distances.find(r.distance_mm));
    const std::size_t col = std::distance(
        membranes.begin(), std::find(membranes.begin(), membranes.end(), r.membrane_label));
    if (spread) {
      table.cell(row, col) = ReportCell::of(value(r), spread(r));
    } else {
      table.cell(row, col) = ReportCell::of(value(r));
    }
  }
  return table;
}

}  // namespace

ReportTable assemble_rmse_report(const std::vector<EvalResult>& results) {
  return assemble(
      results, "plane rmse by membrane and distance", "%",
      [](const EvalResult& r) { return r.rmse_mean_pct; },
      [](const EvalResult& r) { return r.rmse_std_pct; });
}

ReportTable assemble_temporal_report(const std::vector<EvalResult>& results) {
  return assemble(
      results, "temporal noise by membrane and distance", "%",
      [](const EvalResult& r) { return r.temporal_noise_pct; }, nullptr);
}

ReportTable assemble_zacc_report(const std::vector<EvalResult>& results) {
  return assemble(
      results, "z-accuracy by membrane and distance", "%",
      [](const EvalResult& r) { return r.z_accuracy_mean_pct; }, nullptr);
}

}  // namespace stereotac::eval
