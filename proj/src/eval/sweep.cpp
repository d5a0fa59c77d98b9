#include <cmath>
#include <future>

#include "stereotac/pipeline.hpp"
#include "stereotac/stereo/rectify.hpp"

namespace stereotac::pipeline {

namespace {

std::uint64_t cell_seed(std::uint64_t base, std::size_t membrane_idx,
                        std::size_t distance_idx) {
  return Rng(base).fork(membrane_idx * 101 + distance_idx).next_u64();
}

}  // namespace

FloatMap stereo_depth_frame(const sim::MembraneSpec& membrane, double distance_mm,
                            const stereo::StereoRig& rig,
                            const stereo::BlockMatchSettings& match,
                            std::uint64_t seed, int frame_index, bool zero_noise) {
  sim::ExternalScene scene = sim::ExternalScene::plane(distance_mm, seed);
  sim::StereoRenderOptions opt;
  opt.seed = seed;
  opt.frame_index = frame_index;
  opt.zero_noise = zero_noise;
  const auto [left, right] = render_stereo_pair(scene, membrane, rig, opt);
  const auto [left_rect, right_rect] = stereo::rectify_pair(left, right, rig);
  const stereo::DisparityMap disparity = stereo::block_match(left_rect, right_rect, match);
  return stereo::disparity_to_depth(disparity, rig);
}

std::vector<eval::EvalResult> run_stereo_sweep(const StereoSweepConfig& config,
                                               const stereo::StereoRig& rig) {
  struct Cell {
    std::size_t membrane_idx;
    std::size_t distance_idx;
  };
  std::vector<Cell> cells;
  for (std::size_t m = 0; m < config.membranes.size(); ++m) {
    for (std::size_t d = 0; d < config.distances_mm.size(); ++d) {
      cells.push_back({m, d});
    }
  }

  auto run_cell = [&](const Cell& cell) {
    const sim::MembraneSpec membrane = sim::MembraneSpec::preset(
        config.membranes[cell.membrane_idx]);
    const double distance = config.distances_mm[cell.distance_idx];
    const std::uint64_t seed = cell_seed(config.seed, cell.membrane_idx,
                                         cell.distance_idx);
    std::vector<FloatMap> depth_frames;
    depth_frames.reserve(static_cast<std::size_t>(config.frames_per_cell));
    for (int f = 0; f < config.frames_per_cell; ++f) {
      depth_frames.push_back(stereo_depth_frame(membrane, distance, rig, config.match,
                                                seed, f, config.zero_noise));
    }
    eval::EvalConfig cfg;
    cfg.gt_mm = distance;
    cfg.roi = eval::Roi::central(rig.left.width, rig.left.height, config.roi_fraction);
    cfg.frame_count = config.frames_per_cell;
    cfg.membrane_label = to_string(membrane.finish);
    return eval::evaluate_sequence(depth_frames, cfg, distance);
  };

  std::vector<std::future<eval::EvalResult>> futures;
  futures.reserve(cells.size());
  for (const Cell& cell : cells) {
    futures.push_back(std::async(std::launch::async, run_cell, cell));
  }
  std::vector<eval::EvalResult> results;
  results.reserve(cells.size());
  for (auto& f : futures) results.push_back(f.get());
  return results;
}

TactileCalibration calibrate_membrane(const sim::MembraneSpec& membrane, int n_presses,
                                      std::uint64_t seed,
                                      const tactile::TrainConfig& train,
                                      const sim::SensorGrid& grid,
                                      double ball_radius_mm) {
  TactileCalibration calib;
  calib.reference = sim::render_reference_pair(membrane, {}, grid);

  const std::vector<sim::BallPress> presses =
      sim::ball_press_sequence(membrane, ball_radius_mm, n_presses, seed, grid);
  std::vector<tactile::CalibrationSample> samples;
  for (const sim::BallPress& press : presses) {
    // Only true-contact pixels carry valid geometry; stay inside the contact
    // circle minus the deformation-smoothing skirt.
    const double contact_px =
        std::sqrt(press.penetration_mm * (2.0 * ball_radius_mm - press.penetration_mm)) *
        grid.px_per_mm;
    const double accept_px =
        std::max(6.0, contact_px - 1.25 * membrane.stiffness_radius_px - 2.0);
    const auto press_samples =
        tactile::gen_ball_labels(press.frames, calib.reference, press.center_x_px,
                                 press.center_y_px, press.ball_radius_px, {}, accept_px);
    samples.insert(samples.end(), press_samples.begin(), press_samples.end());
  }

  tactile::TrainConfig cfg = train;
  cfg.seed = cfg.seed ^ seed;
  calib.model = tactile::CalibModel::fit(samples, cfg, &calib.report);
  calib.model.set_grid(grid.width, grid.height);
  return calib;
}

FloatMap reconstruct_depth(const TactileCalibration& calib,
                           const sim::TactileFramePair& pair,
                           const tactile::FeatureOptions& opt) {
  const tactile::GradientField field =
      tactile::predict_gradients(calib.model, pair, calib.reference, opt);
  return tactile::integrate_fast_poisson(field);
}

DiskTrialStats run_disk_trials(const sim::MembraneSpec& membrane,
                               const TactileCalibration& calib, int n_trials,
                               double disk_diameter_mm, double depth_mm,
                               std::uint64_t seed, const sim::SensorGrid& grid) {
  DiskTrialStats stats;
  Rng rng(seed);
  const double radius_px = 0.5 * disk_diameter_mm * grid.px_per_mm;
  const double margin = radius_px + 3.0 * membrane.stiffness_radius_px + 6.0;

  for (int t = 0; t < n_trials; ++t) {
    const double cx = rng.uniform(margin, grid.width - 1 - margin);
    const double cy = rng.uniform(margin, grid.height - 1 - margin);
    const sim::IndenterSpec disk = sim::IndenterSpec::disk(disk_diameter_mm, depth_mm,
                                                           cx, cy);
    const FloatMap surface = sim::deform_membrane(disk, membrane, grid);
    const sim::TactileFramePair pair = sim::render_tactile_pair(
        surface, {}, membrane, sim::ExternalScene::dark(), rng.next_u64(), grid);
    const FloatMap depth = reconstruct_depth(calib, pair);
    const tactile::DiskDepth measured =
        tactile::measure_disk_depth(depth, cx, cy, disk_diameter_mm, grid.px_per_mm);
    stats.depths_mm.push_back(measured.mean_mm);
  }

  double sum = 0.0, sq = 0.0;
  for (double d : stats.depths_mm) {
    sum += d;
    sq += d * d;
  }
  const double n = static_cast<double>(stats.depths_mm.size());
  stats.mean_mm = sum / n;
  stats.std_mm = std::sqrt(std::max(0.0, sq / n - stats.mean_mm * stats.mean_mm));
  return stats;
}

}  // namespace stereotac::pipeline
