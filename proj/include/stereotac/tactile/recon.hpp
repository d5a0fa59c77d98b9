// Tactile imprint reconstruction: per-pixel gradient prediction from the
// two-step frames, Poisson integration to a millimeter depth map, and the
// flat-disk depth measurement.
#pragma once

#include "stereotac/tactile/mlp.hpp"

namespace stereotac::tactile {

/// Per-pixel surface slopes (dz/dx, dz/dy, dimensionless). Pixels outside the
/// masks carry slope 0.
struct GradientField {
  FloatMap gx;
  FloatMap gy;
};

/// Predicts slopes for every masked pixel: the x-head on the dx frame, the
/// y-head on the dy frame, tan() applied to the predicted angles. Rejects
/// swapped step frames via the dominant-axis check on the raw illumination.
GradientField predict_gradients(const CalibModel& model,
                                const sim::TactileFramePair& pair,
                                const sim::TactileFramePair& reference,
                                const FeatureOptions& opt = {});

/// Integrates the gradient field through the sine-transform Poisson solver
/// (zero-Dirichlet rim) and converts to millimeters of indentation (>= 0).
FloatMap integrate_fast_poisson(const GradientField& field, double px_per_mm = 15.0);

struct DiskDepth {
  double mean_mm = 0.0;
  std::size_t pixel_count = 0;
};

/// Mean depth over the inner 80% of the disk footprint.
DiskDepth measure_disk_depth(const FloatMap& depth_mm, double center_x_px,
                             double center_y_px, double disk_diameter_mm,
                             double px_per_mm = 15.0);

}  // namespace stereotac::tactile
