#include "stereotac/tactile/mlp.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "stereotac/image_io.hpp"
#include "stereotac/kernels.hpp"

namespace stereotac::tactile {

namespace {

constexpr double kAngleClamp = M_PI / 2.0 - 1e-6;

// Forward one layer for a batch: out[s] = W * in[s] + b, optional tanh.
void forward_layer(const CalibModel::Layer& layer, const std::vector<float>& in,
                   std::size_t n, std::vector<float>& out) {
  const auto& k = kernels::active();
  out.resize(n * layer.out);
  for (std::size_t s = 0; s < n; ++s) {
    const float* x = in.data() + s * layer.in;
    float* y = out.data() + s * layer.out;
    for (int o = 0; o < layer.out; ++o) {
      const double z =
          k.dot_f32(layer.weights.data() + static_cast<std::size_t>(o) * layer.in, x,
                    layer.in) +
          layer.bias[o];
      y[o] = layer.tanh_activation ? static_cast<float>(std::tanh(z))
                                   : static_cast<float>(z);
    }
  }
}

}  // namespace

void CalibModel::set_grid(int width, int height) {
  grid_width_ = width;
  grid_height_ = height;
}

std::array<double, 2> CalibModel::predict(float r, float b, float x, float y) const {
  const float features[4] = {r, b, x, y};
  float out[2];
  predict_batch(features, 1, out);
  return {out[0], out[1]};
}

void CalibModel::predict_batch(const float* features, std::size_t n, float* out) const {
  if (layers_.empty()) throw Error("calibration model is untrained");
  std::vector<float> a(n * 4);
  for (std::size_t s = 0; s < n; ++s) {
    for (int i = 0; i < 4; ++i) {
      a[s * 4 + i] = (features[s * 4 + i] - in_offset_[i]) * in_scale_[i];
    }
  }
  std::vector<float> next;
  for (const Layer& layer : layers_) {
    forward_layer(layer, a, n, next);
    std::swap(a, next);
  }
  for (std::size_t i = 0; i < n * 2; ++i) {
    out[i] = static_cast<float>(
        std::clamp(static_cast<double>(a[i]), -kAngleClamp, kAngleClamp));
  }
}

CalibModel CalibModel::fit(const std::vector<CalibrationSample>& samples,
                           const TrainConfig& config, TrainReport* report) {
  if (samples.empty()) throw Error("empty calibration dataset");
  Rng rng(config.seed);

  // Seeded shuffle, optional subsample, then a trailing holdout split.
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_int(0, static_cast<int>(i - 1))]);
  }
  if (config.max_samples > 0 && order.size() > config.max_samples) {
    order.resize(config.max_samples);
  }
  std::size_t holdout = static_cast<std::size_t>(order.size() * config.holdout_fraction);
  if (order.size() >= 10 && holdout == 0) holdout = 1;
  const std::size_t n_train = order.size() - holdout;
  if (n_train == 0) throw Error("empty calibration dataset");

  auto supervised_label = [&](const CalibrationSample& s) {
    return s.axis == 0 ? s.dx_rad : s.dy_rad;
  };

  bool degenerate = true;
  {
    const double first = supervised_label(samples[order[0]]);
    for (std::size_t i : order) {
      if (std::abs(supervised_label(samples[i]) - first) > 1e-12) {
        degenerate = false;
        break;
      }
    }
  }

  CalibModel model;
  model.seed_ = config.seed;
  const int dims[5] = {4, config.hidden[0], config.hidden[1], config.hidden[2], 2};
  for (int l = 0; l < 4; ++l) {
    Layer layer;
    layer.in = dims[l];
    layer.out = dims[l + 1];
    layer.tanh_activation = l < 3;
    layer.weights.resize(static_cast<std::size_t>(layer.in) * layer.out);
    layer.bias.assign(layer.out, 0.0f);
    const double bound = std::sqrt(6.0 / (layer.in + layer.out));
    for (auto& w : layer.weights) {
      w = static_cast<float>(rng.uniform(-bound, bound));
    }
    model.layers_.push_back(std::move(layer));
  }

  // Pack the training batch, pre-normalized.
  std::vector<float> x_train(n_train * 4);
  std::vector<float> label(n_train);
  std::vector<std::uint8_t> axis(n_train);
  for (std::size_t s = 0; s < n_train; ++s) {
    const CalibrationSample& smp = samples[order[s]];
    const float raw[4] = {smp.r, smp.b, smp.x, smp.y};
    for (int i = 0; i < 4; ++i) {
      x_train[s * 4 + i] = (raw[i] - model.in_offset_[i]) * model.in_scale_[i];
    }
    label[s] = static_cast<float>(supervised_label(smp));
    axis[s] = smp.axis;
  }

  const auto& k = kernels::active();
  TrainReport local_report;
  TrainReport& rep = report ? *report : local_report;
  rep.loss_history.clear();
  rep.train_count = n_train;
  rep.holdout_count = holdout;
  rep.degenerate_labels = degenerate;

  std::vector<std::vector<float>> acts(5);  // acts[0] = inputs
  acts[0] = x_train;
  std::vector<std::vector<float>> deltas(5);
  std::vector<Layer> grads = model.layers_;  // same shapes, zeroed per epoch

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (int l = 0; l < 4; ++l) {
      forward_layer(model.layers_[l], acts[l], n_train, acts[l + 1]);
    }

    // Masked MSE on the supervised head of each sample.
    double loss = 0.0;
    deltas[4].assign(n_train * 2, 0.0f);
    for (std::size_t s = 0; s < n_train; ++s) {
      const int head = axis[s];
      const double err = acts[4][s * 2 + head] - label[s];
      loss += err * err;
      deltas[4][s * 2 + head] = static_cast<float>(2.0 * err / n_train);
    }
    if (!std::isfinite(loss)) {
      throw Error("training diverged; lower the learning rate");
    }
    rep.loss_history.push_back(loss / n_train);

    // Backward pass.
    for (int l = 3; l >= 0; --l) {
      Layer& layer = model.layers_[l];
      Layer& grad = grads[l];
      std::fill(grad.weights.begin(), grad.weights.end(), 0.0f);
      std::fill(grad.bias.begin(), grad.bias.end(), 0.0f);
      deltas[l].assign(n_train * layer.in, 0.0f);
      for (std::size_t s = 0; s < n_train; ++s) {
        const float* a_in = acts[l].data() + s * layer.in;
        const float* d_out = deltas[l + 1].data() + s * layer.out;
        float* d_in = deltas[l].data() + s * layer.in;
        for (int o = 0; o < layer.out; ++o) {
          const float d = d_out[o];
          if (d == 0.0f) continue;
          k.axpy_f32(grad.weights.data() + static_cast<std::size_t>(o) * layer.in, d,
                     a_in, layer.in);
          grad.bias[o] += d;
          k.axpy_f32(d_in, d, layer.weights.data() + static_cast<std::size_t>(o) * layer.in,
                     layer.in);
        }
      }
      if (l > 0) {
        // tanh' through the previous layer's activation.
        for (std::size_t i = 0; i < deltas[l].size(); ++i) {
          const float a = acts[l][i];
          deltas[l][i] *= 1.0f - a * a;
        }
      }
      const float step = static_cast<float>(-config.learning_rate);
      k.axpy_f32(layer.weights.data(), step, grad.weights.data(), layer.weights.size());
      k.axpy_f32(layer.bias.data(), step, grad.bias.data(), layer.bias.size());
    }
  }

  // Held-out error on the supervised heads.
  if (holdout > 0) {
    std::vector<float> xh(holdout * 4);
    std::vector<float> out(holdout * 2);
    for (std::size_t i = 0; i < holdout; ++i) {
      const CalibrationSample& smp = samples[order[n_train + i]];
      xh[i * 4 + 0] = smp.r;
      xh[i * 4 + 1] = smp.b;
      xh[i * 4 + 2] = smp.x;
      xh[i * 4 + 3] = smp.y;
    }
    model.predict_batch(xh.data(), holdout, out.data());
    double sq = 0.0;
    for (std::size_t i = 0; i < holdout; ++i) {
      const CalibrationSample& smp = samples[order[n_train + i]];
      const double err = out[i * 2 + smp.axis] - supervised_label(smp);
      sq += err * err;
    }
    rep.holdout_rmse_rad = std::sqrt(sq / holdout);
  }
  model.holdout_rmse_ = rep.holdout_rmse_rad;
  return model;
}

void CalibModel::save(const std::filesystem::path& path) const {
  nlohmann::ordered_json j;
  j["inputs"] = 4;
  j["outputs"] = 2;
  j["activation"] = "tanh";
  j["seed"] = seed_;
  j["grid"] = {{"width", grid_width_}, {"height", grid_height_}};
  j["input_offset"] = in_offset_;
  j["input_scale"] = in_scale_;
  j["holdout_rmse_rad"] = holdout_rmse_;
  j["layers"] = nlohmann::ordered_json::array();
  for (const Layer& l : layers_) {
    nlohmann::ordered_json layer;
    layer["in"] = l.in;
    layer["out"] = l.out;
    layer["tanh"] = l.tanh_activation;
    layer["weights"] = l.weights;
    layer["bias"] = l.bias;
    j["layers"].push_back(layer);
  }
  io::atomic_write_bytes(path, j.dump() + "\n");
}

CalibModel CalibModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path.string());
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(in, nullptr, true);
  CalibModel model;
  model.seed_ = j.value("seed", 0ull);
  model.holdout_rmse_ = j.value("holdout_rmse_rad", 0.0);
  if (j.contains("grid")) {
    model.grid_width_ = j["grid"].value("width", 0);
    model.grid_height_ = j["grid"].value("height", 0);
  }
  if (j.contains("input_offset")) {
    const auto off = j["input_offset"].get<std::vector<float>>();
    const auto scl = j["input_scale"].get<std::vector<float>>();
    if (off.size() != 4 || scl.size() != 4) {
      throw Error("model normalization shape mismatch: " + path.string());
    }
    std::copy(off.begin(), off.end(), model.in_offset_.begin());
    std::copy(scl.begin(), scl.end(), model.in_scale_.begin());
  }
  for (const auto& lj : j.at("layers")) {
    Layer l;
    l.in = lj.at("in");
    l.out = lj.at("out");
    l.tanh_activation = lj.at("tanh");
    l.weights = lj.at("weights").get<std::vector<float>>();
    l.bias = lj.at("bias").get<std::vector<float>>();
    if (l.weights.size() != static_cast<std::size_t>(l.in) * l.out ||
        l.bias.size() != static_cast<std::size_t>(l.out)) {
      throw Error("model layer shape mismatch: " + path.string());
    }
    model.layers_.push_back(std::move(l));
  }
  if (model.layers_.empty()) throw Error("model has no layers: " + path.string());
  return model;
}

}  // namespace stereotac::tactile
