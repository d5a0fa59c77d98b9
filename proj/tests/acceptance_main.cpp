// Acceptance suite: end-to-end checks of the full pipeline at its contract
// tolerances. Prints one PASS/FAIL line per criterion and exits nonzero if
// any fail. The CLI determinism check expects STEREOTAC_CLI to point at the
// built binary.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stereotac/pipeline.hpp"
#include "stereotac/poisson.hpp"
#include "stereotac/stereo/calibrate.hpp"
#include "stereotac/stereo/rectify.hpp"

namespace fs = std::filesystem;
using namespace stereotac;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int index, bool pass, const std::string& name, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", index, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ------------------------------------------------------------- criterion 1

void criterion_poisson_oracle() {
  const auto t0 = Clock::now();
  Rng rng(20240817);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int cols = rng.uniform_int(8, 64);
    const int rows = rng.uniform_int(8, 64);
    const auto rhs = oracles::random_compact_field(rng, cols, rows);
    const auto fast = poisson::solve_dirichlet(rhs, cols, rows);
    const auto direct = oracles::dense_direct_solve(rhs, cols, rows);
    if (direct.empty()) {
      report(1, false, "poisson solver vs direct solve", "oracle factorization failed");
      return;
    }
    worst = std::max(worst, oracles::relative_error(fast, direct));
  }
  const double elapsed = seconds_since(t0);
  char detail[128];
  std::snprintf(detail, sizeof(detail), "20 fields <= 64x64, worst rel err %.2e, %.2f s",
                worst, elapsed);
  report(1, worst < 1e-6 && elapsed < 5.0, "poisson solver vs direct solve", detail);
}

// ------------------------------------------------------------- criterion 2

void criterion_ball_labels() {
  const int w = 640, h = 480;
  sim::TactileFramePair pair;
  pair.frame_dx = ImageRgb8(w, h);
  pair.frame_dy = ImageRgb8(w, h);
  sim::TactileFramePair reference;
  reference.frame_dx = ImageRgb8(w, h);
  reference.frame_dy = ImageRgb8(w, h);

  const double cx = 321.0, cy = 239.0, r = 110.0;
  Rng rng(99);
  int placed = 0;
  while (placed < 10000) {
    const double ang = rng.uniform(0, 2 * M_PI);
    const double rad = r * std::sqrt(rng.uniform01()) * 0.985;
    const int x = static_cast<int>(std::lround(cx + rad * std::cos(ang)));
    const int y = static_cast<int>(std::lround(cy + rad * std::sin(ang)));
    if (std::hypot(x - cx, y - cy) >= r) continue;
    // Mirror every pixel so antisymmetry is directly observable.
    const int mx = static_cast<int>(2 * cx) - x;
    if (std::hypot(mx - cx, y - cy) < r) {
      pair.frame_dx.at(mx, y) = {220, 0, 40};
    }
    pair.frame_dx.at(x, y) = {220, 0, 40};
    ++placed;
  }

  const auto samples = tactile::gen_ball_labels(pair, reference, cx, cy, r);
  double worst = 0.0;
  for (const auto& s : samples) {
    (void)s;
  }
  // Re-scan the frame in the generator's order and evaluate directly.
  std::size_t k = 0;
  bool order_ok = true;
  for (int y = 0; y < h && order_ok; ++y) {
    for (int x = 0; x < w; ++x) {
      if (pair.frame_dx.at(x, y).r == 0) continue;
      if (std::hypot(x - cx, y - cy) >= r) continue;
      if (k >= samples.size()) {
        order_ok = false;
        break;
      }
      worst = std::max(worst, std::abs(samples[k].dx_rad - std::asin((x - cx) / r)));
      worst = std::max(worst, std::abs(samples[k].dy_rad - std::asin((y - cy) / r)));
      ++k;
    }
  }

  // Antisymmetry at exactly mirrored offsets.
  double worst_sym = 0.0;
  for (int d = 1; d < static_cast<int>(r) - 1; ++d) {
    const int xp = static_cast<int>(cx) + d;
    const int xm = static_cast<int>(cx) - d;
    const double lp = std::asin((xp - cx) / r);
    const double lm = std::asin((xm - cx) / r);
    worst_sym = std::max(worst_sym, std::abs(lp + lm));
  }

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "%zu samples, worst |err| %.2e rad, antisymmetry %.2e rad",
                samples.size(), worst, worst_sym);
  report(2, order_ok && samples.size() >= 10000 && worst < 1e-12 && worst_sym < 1e-12,
         "calibration labels match asin((p-c)/r)", detail);
}

// ------------------------------------------------------------- criterion 3

void criterion_disk_trials() {
  const auto t0 = Clock::now();
  const sim::SensorGrid grid;
  tactile::TrainConfig train;

  const auto run = [&](sim::Finish finish) {
    const sim::MembraneSpec membrane = sim::MembraneSpec::preset(finish);
    const auto calib = pipeline::calibrate_membrane(membrane, 30, 7, train, grid);
    return pipeline::run_disk_trials(membrane, calib, 30, 13.0, 1.0, 21, grid);
  };
  const auto reflective = run(sim::Finish::SemiReflective);
  const auto matte = run(sim::Finish::SemiMatte);
  const double elapsed = seconds_since(t0);

  const bool mean_ok = std::abs(reflective.mean_mm - 1.0) <= 0.2;
  const bool order_ok = reflective.std_mm < matte.std_mm;
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "semi_reflective mean %.3f mm std %.4f, semi_matte mean %.3f std %.4f, %.0f s",
                reflective.mean_mm, reflective.std_mm, matte.mean_mm, matte.std_mm,
                elapsed);
  report(3, mean_ok && order_ok && elapsed < 120.0,
         "30-press disk depth: mean 1.0 +- 0.2 mm, reflective std smallest", detail);
}

// ------------------------------------------------------------- criterion 4

void criterion_z_accuracy_exactness() {
  double worst = 0.0;
  for (const double e : {-0.05, 0.0, 0.01, 0.09}) {
    const double gt = 200.0;
    FloatMap map(64, 48, MapUnit::Millimeters, static_cast<float>(gt * (1.0 + e)));
    eval::EvalConfig cfg;
    cfg.gt_mm = gt;
    cfg.roi = eval::Roi::central(64, 48);
    const double acc = eval::z_accuracy_pct(map, cfg);
    worst = std::max(worst, std::abs(acc - 100.0 * e));
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail), "worst |error| %.2e %%", worst);
  report(4, worst < 0.01, "median depth accuracy exact on constant offsets", detail);
}

// ------------------------------------------------------------- criterion 5

void criterion_sweep_trends() {
  const auto t0 = Clock::now();
  const stereo::StereoRig rig = stereo::StereoRig::canonical();

  pipeline::StereoSweepConfig cfg;
  cfg.seed = 1;
  const auto results = pipeline::run_stereo_sweep(cfg, rig);

  auto cell = [&](sim::Finish f, double dist) -> const eval::EvalResult* {
    for (const auto& r : results) {
      if (r.membrane_label == to_string(f) && r.distance_mm == dist) return &r;
    }
    return nullptr;
  };

  bool rmse_order = true, temporal_order = true;
  for (const double dist : cfg.distances_mm) {
    const auto* t = cell(sim::Finish::Transparent, dist);
    const auto* m = cell(sim::Finish::SemiMatte, dist);
    const auto* r = cell(sim::Finish::SemiReflective, dist);
    if (!t || !m || !r) {
      rmse_order = false;
      break;
    }
    if (!(t->rmse_mean_pct <= m->rmse_mean_pct && m->rmse_mean_pct < r->rmse_mean_pct)) {
      rmse_order = false;
    }
    if (!(r->temporal_noise_pct > m->temporal_noise_pct &&
          r->temporal_noise_pct > t->temporal_noise_pct)) {
      temporal_order = false;
    }
  }

  // Transparent membrane with all injected noise off.
  pipeline::StereoSweepConfig clean;
  clean.seed = 2;
  clean.membranes = {sim::Finish::Transparent};
  clean.zero_noise = true;
  const auto clean_results = pipeline::run_stereo_sweep(clean, rig);
  double worst_clean = 0.0;
  for (const auto& r : clean_results) worst_clean = std::max(worst_clean, r.rmse_mean_pct);

  const double elapsed = seconds_since(t0);
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "rmse order %s, temporal order %s, clean transparent rmse %.3f%%, %.0f s",
                rmse_order ? "ok" : "violated", temporal_order ? "ok" : "violated",
                worst_clean, elapsed);
  report(5, rmse_order && temporal_order && worst_clean < 0.5 && elapsed < 300.0,
         "sweep reproduces membrane orderings at every distance", detail);
}

// ------------------------------------------------------------- criterion 6

void criterion_triangulation() {
  // Hand-built disparity through the canonical rig.
  const stereo::StereoRig rig = stereo::StereoRig::canonical(640, 480, 800.0, 14.0);
  stereo::DisparityMap disparity{FloatMap(640, 480, MapUnit::DisparityPx,
                                          FloatMap::kDefaultSentinel),
                                 {}};
  disparity.map.declare_sentinel(FloatMap::kDefaultSentinel);
  disparity.map.at(320, 240) = 56.0f;
  const PointCloud3 cloud = stereo::reproject(disparity, rig);
  const bool exact = cloud.size() == 1 && std::abs(cloud.points[0].z - 200.0) < 1e-9;

  // Synthetic-rig calibration under 0.2 px corner noise.
  stereo::StereoRig truth;
  truth.left.fx = 812.0;
  truth.left.fy = 806.0;
  truth.left.cx = 325.0;
  truth.left.cy = 243.0;
  truth.left.k1 = -0.06;
  truth.left.k2 = 0.012;
  truth.left.width = 640;
  truth.left.height = 480;
  truth.right = truth.left;
  truth.right.fx = 795.0;
  truth.right.cx = 317.0;
  truth.rotation = stereo::rodrigues_to_matrix(Eigen::Vector3d(0.004, 0.018, -0.006));
  truth.translation_mm = Eigen::Vector3d(-14.02, 0.12, -0.08);

  const stereo::BoardSpec board;
  const auto object = board.object_points();
  Rng rng(314);
  std::vector<stereo::CornerObservations> frames;
  for (int f = 0; f < 14; ++f) {
    const Eigen::Matrix3d rot = stereo::rodrigues_to_matrix(Eigen::Vector3d(
        rng.uniform(-0.45, 0.45), rng.uniform(-0.45, 0.45), rng.uniform(-0.5, 0.5)));
    const Eigen::Vector3d t(rng.uniform(-70, 10), rng.uniform(-50, 10),
                            rng.uniform(190, 380));
    stereo::CornerObservations obs;
    for (const auto& p : object) {
      const Eigen::Vector3d in_left = rot * p + t;
      obs.left.push_back(truth.left.project(in_left) +
                         Eigen::Vector2d(rng.normal(0, 0.2), rng.normal(0, 0.2)));
      obs.right.push_back(
          truth.right.project(truth.rotation * in_left + truth.translation_mm) +
          Eigen::Vector2d(rng.normal(0, 0.2), rng.normal(0, 0.2)));
    }
    frames.push_back(std::move(obs));
  }
  const stereo::CalibrationResult calib = stereo::calibrate_stereo(frames, board, 640, 480);
  const double baseline_err =
      std::abs(calib.rig.baseline_mm() - truth.baseline_mm()) / truth.baseline_mm();

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "Z(d=56) = %.6f mm, baseline err %.3f%%, rms %.3f px",
                cloud.size() == 1 ? cloud.points[0].z : -1.0, 100.0 * baseline_err,
                calib.rms_reprojection_px);
  report(6, exact && baseline_err < 0.01, "triangulation exact, calibration within 1%",
         detail);
}

// ------------------------------------------------------------- criterion 7

void criterion_translation_match() {
  const int w = 320, h = 200, shift = 8;
  ImageRgb8 left(w, h), right(w, h);
  Rng rng(8);
  std::vector<std::uint8_t> tex(static_cast<std::size_t>(w + shift) * h);
  for (auto& v : tex) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint8_t l = tex[static_cast<std::size_t>(y) * (w + shift) + x];
      const std::uint8_t r = tex[static_cast<std::size_t>(y) * (w + shift) + x + shift];
      left.at(x, y) = {l, l, l};
      right.at(x, y) = {r, r, r};
    }
  }
  stereo::BlockMatchSettings settings;
  settings.max_disparity = 64;
  const stereo::DisparityMap disparity = stereo::block_match(left, right, settings);
  std::size_t valid = 0, good = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!disparity.map.is_valid(x, y)) continue;
      ++valid;
      if (std::abs(disparity.map.at(x, y) - shift) <= 0.25) ++good;
    }
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail), "%zu valid px, %.2f%% within 0.25 px", valid,
                valid ? 100.0 * good / valid : 0.0);
  report(7, valid > 20000 && good >= static_cast<std::size_t>(0.95 * valid),
         "8 px translation matches at 8.0 +- 0.25", detail);
}

// ------------------------------------------------------------- criterion 8

void criterion_leakage_artifact() {
  const sim::SensorGrid grid;
  tactile::TrainConfig train;
  const sim::MembraneSpec base = sim::MembraneSpec::preset(sim::Finish::Transparent);
  const auto calib = pipeline::calibrate_membrane(base, 20, 7, train, grid);

  auto ghost_peak = [&](double opacity) {
    sim::MembraneSpec membrane = base;
    membrane.opacity = opacity;
    membrane.tactile_noise = 0.0;
    membrane.tactile_gain_jitter = 0.0;
    sim::ExternalScene scene;
    sim::ReflectiveObject obj;
    obj.standoff_mm = 1.0;
    obj.reflectivity = 0.6;
    obj.center_x_px = (grid.width - 1) / 2.0;
    obj.center_y_px = (grid.height - 1) / 2.0;
    scene.reflective_object = obj;
    const FloatMap flat(grid.width, grid.height, MapUnit::Millimeters, 0.0f);
    const sim::TactileFramePair pair =
        render_tactile_pair(flat, {}, membrane, scene, 5, grid);
    // The stored reference comes from the calibration membrane; rebuild one
    // for this opacity so only the leakage differs.
    sim::MembraneSpec quiet = membrane;
    const sim::TactileFramePair reference = sim::render_reference_pair(quiet, {}, grid);
    const auto field = tactile::predict_gradients(calib.model, pair, reference);
    const FloatMap depth = tactile::integrate_fast_poisson(field, grid.px_per_mm);
    float peak = 0.0f;
    for (const float v : depth.values()) peak = std::max(peak, v);
    return static_cast<double>(peak);
  };

  const double p_low = ghost_peak(0.0515);
  const double p_mid = ghost_peak(0.2210);
  const double p_high = ghost_peak(0.2446);
  char detail[128];
  std::snprintf(detail, sizeof(detail), "ghost peaks %.4f > %.4f > %.4f mm", p_low,
                p_mid, p_high);
  report(8, p_low > 0.02 && p_low > p_mid && p_mid > p_high,
         "reflective-object ghost shrinks monotonically with opacity", detail);
}

// ------------------------------------------------------------- criterion 9

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

bool dirs_identical(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename());
  std::vector<fs::path> names_b;
  for (const auto& e : fs::directory_iterator(b)) names_b.push_back(e.path().filename());
  std::sort(names.begin(), names.end());
  std::sort(names_b.begin(), names_b.end());
  if (names != names_b) return false;
  for (const auto& n : names) {
    if (slurp(a / n) != slurp(b / n)) return false;
  }
  return true;
}

void criterion_cli_determinism() {
  const char* cli = std::getenv("STEREOTAC_CLI");
  if (!cli) {
    report(9, false, "CLI determinism", "STEREOTAC_CLI not set");
    return;
  }
  const fs::path work = fs::temp_directory_path() / "stereotac_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);
  const fs::path cfg = work / "small.json";
  {
    std::ofstream out(cfg);
    out << R"({"grid": {"width": 340, "height": 260, "px_per_mm": 15.0},)"
        << R"( "train": {"epochs": 150, "max_samples": 4000}})";
  }

  struct Step {
    std::string name;
    std::string args;  // {out} replaced per run
  };
  const std::string c = std::string(cli);
  const std::string q = "\"" + c + "\"";
  std::vector<Step> steps = {
      {"simulate-tactile",
       q + " simulate --mode tactile --indenter disk9 --depth 1.0 --membrane semi_matte"
           " --config " + cfg.string() + " --seed 11 --out {out}"},
      {"simulate-stereo",
       q + " simulate --mode stereo --distance 150 --membrane semi_reflective --seed 12"
           " --out {out}"},
      {"simulate-presses",
       q + " simulate --mode tactile --presses 6 --ball 4.0 --membrane semi_reflective"
           " --config " + cfg.string() + " --seed 13 --out {out}"},
      {"calibrate-tactile",
       q + " calibrate-tactile --data {presses}/calibration.csv --config " + cfg.string() +
           " --seed 13 --out {out}"},
      {"reconstruct",
       q + " reconstruct --model {calib}/model.json --dx {tactile}/tactile_dx.ppm"
           " --dy {tactile}/tactile_dy.ppm --ref-dx {tactile}/reference_dx.ppm"
           " --ref-dy {tactile}/reference_dy.ppm --config " + cfg.string() +
           " --seed 11 --out {out}"},
      {"stereo",
       q + " stereo --left {stereo}/stereo_left_000.ppm --right {stereo}/stereo_right_000.ppm"
           " --rig {stereo}/rig.json --seed 12 --out {out}"},
      {"evaluate-sweep",
       q + " evaluate --mode sweep --membranes transparent,semi_reflective"
           " --distances 150,250 --frames 3 --seed 14 --out {out}"},
  };

  bool all_ok = true;
  std::string failed;
  std::map<std::string, fs::path> anchors;
  for (const Step& step : steps) {
    fs::path outs[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path out = work / (step.name + "_" + std::to_string(run));
      fs::create_directories(out);
      std::string cmdline = step.args;
      auto substitute = [&](const std::string& key, const std::string& value) {
        std::size_t pos;
        while ((pos = cmdline.find(key)) != std::string::npos) {
          cmdline.replace(pos, key.size(), value);
        }
      };
      substitute("{out}", out.string());
      substitute("{presses}", (anchors["simulate-presses"]).string());
      substitute("{calib}", (anchors["calibrate-tactile"]).string());
      substitute("{tactile}", (anchors["simulate-tactile"]).string());
      substitute("{stereo}", (anchors["simulate-stereo"]).string());
      cmdline += " >/dev/null 2>&1";
      if (std::system(cmdline.c_str()) != 0) {
        all_ok = false;
        failed = step.name + " (nonzero exit)";
        break;
      }
      outs[run] = out;
    }
    if (!all_ok) break;
    if (!dirs_identical(outs[0], outs[1])) {
      all_ok = false;
      failed = step.name + " (outputs differ)";
      break;
    }
    anchors[step.name] = outs[0];
  }
  report(9, all_ok, "every CLI subcommand is byte-reproducible",
         all_ok ? std::to_string(steps.size()) + " subcommand runs compared" : failed);
}

}  // namespace

int main() {
  criterion_poisson_oracle();
  criterion_ball_labels();
  criterion_z_accuracy_exactness();
  criterion_translation_match();
  criterion_triangulation();
  criterion_leakage_artifact();
  criterion_disk_trials();
  criterion_sweep_trends();
  criterion_cli_determinism();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
