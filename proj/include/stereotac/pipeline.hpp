// End-to-end experiment drivers shared by the CLI and the acceptance suite:
// the membrane x distance stereo sweep and the tactile calibration / disk
// indentation runs.
#pragma once

#include <vector>

#include "stereotac/eval/metrics.hpp"
#include "stereotac/sim/render.hpp"
#include "stereotac/stereo/cloud.hpp"
#include "stereotac/tactile/recon.hpp"

namespace stereotac::pipeline {

struct StereoSweepConfig {
  std::vector<sim::Finish> membranes = {sim::Finish::Transparent, sim::Finish::SemiMatte,
                                        sim::Finish::SemiReflective};
  std::vector<double> distances_mm = {100, 150, 200, 250, 300};
  int frames_per_cell = 10;
  std::uint64_t seed = 1;
  bool zero_noise = false;
  stereo::BlockMatchSettings match;
  double roi_fraction = 0.6;
};

/// Renders, matches and evaluates every membrane x distance cell. Cells run
/// concurrently; per-cell seeds derive from (seed, membrane, distance) so the
/// schedule does not affect results.
std::vector<eval::EvalResult> run_stereo_sweep(const StereoSweepConfig& config,
                                               const stereo::StereoRig& rig);

/// One rendered + matched + reprojected frame; building block of the sweep.
FloatMap stereo_depth_frame(const sim::MembraneSpec& membrane, double distance_mm,
                            const stereo::StereoRig& rig,
                            const stereo::BlockMatchSettings& match,
                            std::uint64_t seed, int frame_index, bool zero_noise);

struct TactileCalibration {
  tactile::CalibModel model;
  sim::TactileFramePair reference;
  tactile::TrainReport report;
};

/// Full calibration for one membrane: ball presses, geometric labels, model
/// fit. Deterministic in the seed.
TactileCalibration calibrate_membrane(const sim::MembraneSpec& membrane,
                                      int n_presses, std::uint64_t seed,
                                      const tactile::TrainConfig& train = {},
                                      const sim::SensorGrid& grid = {},
                                      double ball_radius_mm = 4.0);

struct DiskTrialStats {
  std::vector<double> depths_mm;  // one measured plateau depth per press
  double mean_mm = 0.0;
  double std_mm = 0.0;
};

/// Presses a flat disk n times at seeded random positions and measures the
/// reconstructed plateau depth each time.
DiskTrialStats run_disk_trials(const sim::MembraneSpec& membrane,
                               const TactileCalibration& calib, int n_trials,
                               double disk_diameter_mm, double depth_mm,
                               std::uint64_t seed, const sim::SensorGrid& grid = {});

/// Reconstructs one tactile pair into a depth map via the calibrated model.
FloatMap reconstruct_depth(const TactileCalibration& calib,
                           const sim::TactileFramePair& pair,
                           const tactile::FeatureOptions& opt = {});

}  // namespace stereotac::pipeline
