// Gradient regressor: a small fully-connected network mapping per-pixel
// (R, B, x, y) features to surface angles for both axes. One head per
// illumination step; each training sample supervises the head its features
// can explain. Training is deterministic full-batch gradient descent.
#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "stereotac/tactile/calibration.hpp"

namespace stereotac::tactile {

struct TrainConfig {
  std::array<int, 3> hidden = {32, 32, 32};
  double learning_rate = 0.2;
  int epochs = 300;
  double holdout_fraction = 0.10;
  std::size_t max_samples = 8000;  // seeded subsample cap on large press sets
  std::uint64_t seed = 1;
};

struct TrainReport {
  std::vector<double> loss_history;  // training MSE per epoch, rad^2
  double holdout_rmse_rad = 0.0;
  std::size_t train_count = 0;
  std::size_t holdout_count = 0;
  bool degenerate_labels = false;  // all supervised labels identical
};

class CalibModel {
 public:
  CalibModel() = default;

  /// Trains on labeled samples; deterministic for a given config seed.
  static CalibModel fit(const std::vector<CalibrationSample>& samples,
                        const TrainConfig& config, TrainReport* report = nullptr);

  /// Angle predictions (x-head, y-head), clamped to (-pi/2, pi/2).
  std::array<double, 2> predict(float r, float b, float x, float y) const;

  /// Batched forward pass over n feature rows (r, b, x, y); out is n x 2.
  void predict_batch(const float* features, std::size_t n, float* out) const;

  int grid_width() const { return grid_width_; }
  int grid_height() const { return grid_height_; }
  void set_grid(int width, int height);
  double holdout_rmse_rad() const { return holdout_rmse_; }

  void save(const std::filesystem::path& path) const;
  static CalibModel load(const std::filesystem::path& path);

  struct Layer {
    int in = 0, out = 0;
    std::vector<float> weights;  // row-major out x in
    std::vector<float> bias;
    bool tanh_activation = true;
  };
  const std::vector<Layer>& layers() const { return layers_; }

 private:
  std::vector<Layer> layers_;
  // Input normalization: net input = (feature - offset) * scale. The color
  // features sit near 0.5 with small excursions; scaling them up keeps the
  // first layer in its responsive range.
  std::array<float, 4> in_offset_ = {0.5f, 0.5f, 0.0f, 0.0f};
  std::array<float, 4> in_scale_ = {4.0f, 4.0f, 1.0f, 1.0f};
  int grid_width_ = 0;
  int grid_height_ = 0;
  std::uint64_t seed_ = 0;
  double holdout_rmse_ = 0.0;
};

}  // namespace stereotac::tactile
