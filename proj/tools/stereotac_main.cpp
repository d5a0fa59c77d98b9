// stereotac: batch front-end for the simulated visuotactile sensor.
// Subcommands: simulate, calibrate-tactile, reconstruct, stereo, evaluate.
// Every run is byte-reproducible for a fixed --seed; each artifact directory
// gets a sidecar JSON recording the exact inputs.
#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "stereotac/config.hpp"
#include "stereotac/image_io.hpp"
#include "stereotac/pipeline.hpp"
#include "stereotac/stereo/rectify.hpp"

namespace fs = std::filesystem;
using namespace stereotac;
using config::json;

namespace {

int log_level() {
  const char* env = std::getenv("STEREOTAC_LOG");
  if (!env) return 1;
  const std::string v = env;
  if (v == "quiet" || v == "0") return 0;
  if (v == "debug" || v == "2") return 2;
  return 1;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[stereotac] " << msg << "\n";
}

void write_sidecar(const fs::path& dir, const json& payload) {
  io::atomic_write_bytes(dir / "truth.json", payload.dump(2) + "\n");
}

json section(const json& cfg, const char* key) {
  return cfg.contains(key) ? cfg.at(key) : json(nullptr);
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;

  json load() const {
    return config_path.empty() ? json::object() : config::load_config(config_path);
  }
  fs::path out() const {
    fs::create_directories(out_dir);
    return out_dir;
  }
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--seed", args.seed, "run seed (fixed default for reproducibility)");
  cmd->add_option("--out", args.out_dir, "output directory");
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const CommonArgs& common, const std::string& mode,
                 const std::string& indenter_name, double depth_mm,
                 const std::string& membrane_name, double distance_mm, int presses,
                 double ball_mm, int frames, double object_standoff,
                 double object_reflectivity) {
  const json cfg = common.load();
  const sim::SensorGrid grid = config::grid_from_json(section(cfg, "grid"));
  sim::MembraneSpec membrane = cfg.contains("membrane")
                                   ? config::membrane_from_json(cfg.at("membrane"))
                                   : sim::MembraneSpec::preset(
                                         sim::finish_from_string(membrane_name));
  if (!membrane_name.empty() && !cfg.contains("membrane")) {
    membrane = sim::MembraneSpec::preset(sim::finish_from_string(membrane_name));
  }
  const fs::path out = common.out();

  json sidecar;
  sidecar["command"] = "simulate";
  sidecar["seed"] = common.seed;
  sidecar["mode"] = mode;
  sidecar["grid"] = config::grid_to_json(grid);
  sidecar["membrane"] = config::membrane_to_json(membrane);

  if (mode == "stereo") {
    sim::ExternalScene scene = cfg.contains("scene")
                                   ? config::scene_from_json(cfg.at("scene"))
                                   : sim::ExternalScene::plane(distance_mm, common.seed);
    if (!scene.plane_distance_mm) scene.plane_distance_mm = distance_mm;
    const stereo::StereoRig rig = stereo::StereoRig::canonical(grid.width, grid.height);
    for (int f = 0; f < frames; ++f) {
      sim::StereoRenderOptions opt;
      opt.seed = common.seed;
      opt.frame_index = f;
      const auto [left, right] = render_stereo_pair(scene, membrane, rig, opt);
      char name[64];
      std::snprintf(name, sizeof(name), "stereo_left_%03d.ppm", f);
      io::write_image(left, out / name);
      std::snprintf(name, sizeof(name), "stereo_right_%03d.ppm", f);
      io::write_image(right, out / name);
    }
    stereo::save_rig(rig, out / "rig.json");
    sidecar["scene"] = config::scene_to_json(scene);
    sidecar["truth"] = {{"plane_distance_mm", *scene.plane_distance_mm},
                        {"rig", "rig.json"}};
    write_sidecar(out, sidecar);
    log_info("wrote " + std::to_string(frames) + " stereo pair(s) to " + out.string());
    return 0;
  }

  if (mode != "tactile") throw Error("unknown simulate mode: " + mode);

  const sim::TactileFramePair reference = sim::render_reference_pair(membrane, {}, grid);
  io::write_image(reference.frame_dx, out / "reference_dx.ppm");
  io::write_image(reference.frame_dy, out / "reference_dy.ppm");

  if (presses > 0) {
    // Calibration sequence: ball presses plus the labeled dataset.
    const auto sequence =
        sim::ball_press_sequence(membrane, ball_mm, presses, common.seed, grid);
    std::vector<tactile::CalibrationSample> samples;
    json press_truth = json::array();
    for (std::size_t i = 0; i < sequence.size(); ++i) {
      const sim::BallPress& press = sequence[i];
      char name[64];
      std::snprintf(name, sizeof(name), "press_%02zu_dx.ppm", i);
      io::write_image(press.frames.frame_dx, out / name);
      std::snprintf(name, sizeof(name), "press_%02zu_dy.ppm", i);
      io::write_image(press.frames.frame_dy, out / name);
      const double contact_px =
          std::sqrt(press.penetration_mm * (2.0 * ball_mm - press.penetration_mm)) *
          grid.px_per_mm;
      const double accept_px =
          std::max(6.0, contact_px - 1.25 * membrane.stiffness_radius_px - 2.0);
      const auto press_samples = tactile::gen_ball_labels(
          press.frames, reference, press.center_x_px, press.center_y_px,
          press.ball_radius_px, {}, accept_px);
      samples.insert(samples.end(), press_samples.begin(), press_samples.end());
      press_truth.push_back({{"center_x_px", press.center_x_px},
                             {"center_y_px", press.center_y_px},
                             {"ball_radius_px", press.ball_radius_px},
                             {"penetration_mm", press.penetration_mm}});
    }
    tactile::write_samples_csv(samples, out / "calibration.csv");
    sidecar["truth"] = {{"presses", press_truth}, {"samples", samples.size()}};
    write_sidecar(out, sidecar);
    log_info("wrote " + std::to_string(presses) + " press pair(s) and " +
             std::to_string(samples.size()) + " samples to " + out.string());
    return 0;
  }

  // Single indenter press (or none when penetration is 0).
  const sim::IndenterSpec indenter =
      cfg.contains("indenter")
          ? config::indenter_from_json(cfg.at("indenter"), grid)
          : config::indenter_preset(indenter_name, depth_mm, grid);
  sim::ExternalScene scene =
      cfg.contains("scene") ? config::scene_from_json(cfg.at("scene"))
                            : sim::ExternalScene::dark();
  if (object_standoff > 0.0) {
    sim::ReflectiveObject obj;
    obj.standoff_mm = object_standoff;
    obj.reflectivity = object_reflectivity;
    obj.center_x_px = (grid.width - 1) / 2.0;
    obj.center_y_px = (grid.height - 1) / 2.0;
    scene.reflective_object = obj;
  }

  const FloatMap surface = sim::deform_membrane(indenter, membrane, grid);
  const sim::TactileFramePair pair =
      sim::render_tactile_pair(surface, {}, membrane, scene, common.seed, grid);
  io::write_image(pair.frame_dx, out / "tactile_dx.ppm");
  io::write_image(pair.frame_dy, out / "tactile_dy.ppm");
  io::write_floatmap(surface, out / "surface_truth.pfm");

  sidecar["indenter"] = config::indenter_to_json(indenter);
  sidecar["scene"] = config::scene_to_json(scene);
  sidecar["truth"] = {{"surface", "surface_truth.pfm"},
                      {"penetration_mm", indenter.penetration_mm}};
  write_sidecar(out, sidecar);
  log_info("wrote tactile pair to " + out.string());
  return 0;
}

// -------------------------------------------------------- calibrate-tactile

int cmd_calibrate_tactile(const CommonArgs& common, const std::string& data_csv,
                          const std::string& model_out) {
  const json cfg = common.load();
  tactile::TrainConfig train = config::train_from_json(section(cfg, "train"));
  train.seed ^= common.seed;
  const sim::SensorGrid grid = config::grid_from_json(section(cfg, "grid"));

  const auto samples = tactile::read_samples_csv(data_csv);
  if (samples.empty()) throw Error("empty calibration dataset: " + data_csv);
  if (samples.size() < 1000) {
    std::cout << "warning: only " << samples.size()
              << " samples; expect overfitting below ~1000\n";
  }
  tactile::TrainReport report;
  tactile::CalibModel model = tactile::CalibModel::fit(samples, train, &report);
  model.set_grid(grid.width, grid.height);
  if (report.degenerate_labels) {
    std::cout << "warning: degenerate dataset (all labels identical)\n";
  }

  const fs::path out = common.out();
  model.save(out / model_out);
  std::cout << "held-out rmse: " << report.holdout_rmse_rad << " rad over "
            << report.holdout_count << " samples\n";
  log_info("model written to " + (out / model_out).string());
  return 0;
}

// --------------------------------------------------------------- reconstruct

int cmd_reconstruct(const CommonArgs& common, const std::string& model_path,
                    const std::string& dx_path, const std::string& dy_path,
                    const std::string& ref_dx_path, const std::string& ref_dy_path,
                    const std::string& depth_out, const std::string& cloud_out,
                    double disk_cx, double disk_cy, double disk_diameter,
                    bool expect_no_contact) {
  const json cfg = common.load();
  const sim::SensorGrid grid = config::grid_from_json(section(cfg, "grid"));

  const tactile::CalibModel model = tactile::CalibModel::load(model_path);
  sim::TactileFramePair pair;
  pair.frame_dx = io::read_image(dx_path);
  pair.frame_dy = io::read_image(dy_path);
  sim::TactileFramePair reference;
  reference.frame_dx = io::read_image(ref_dx_path);
  reference.frame_dy = io::read_image(ref_dy_path);

  const tactile::GradientField field =
      tactile::predict_gradients(model, pair, reference);
  const FloatMap depth = tactile::integrate_fast_poisson(field, grid.px_per_mm);

  const fs::path out = common.out();
  io::write_floatmap(depth, out / depth_out);

  float peak = 0.0f;
  for (const float v : depth.values()) peak = std::max(peak, v);
  if (peak < 0.02f) {
    std::cout << "no contact detected (peak depth " << peak << " mm)\n";
  } else if (expect_no_contact) {
    std::cout << "warning: spurious imprint with no contact expected (peak depth "
              << peak << " mm); likely reflective-object leakage\n";
  }
  if (disk_diameter > 0.0) {
    const tactile::DiskDepth measured =
        tactile::measure_disk_depth(depth, disk_cx, disk_cy, disk_diameter, grid.px_per_mm);
    std::cout << "disk plateau depth: " << measured.mean_mm << " mm over "
              << measured.pixel_count << " px\n";
  }
  if (!cloud_out.empty()) {
    PointCloud3 cloud;
    for (int y = 0; y < depth.height(); ++y) {
      for (int x = 0; x < depth.width(); ++x) {
        if (depth.at(x, y) <= 0.0f) continue;
        cloud.points.push_back({x / grid.px_per_mm, y / grid.px_per_mm,
                                static_cast<double>(depth.at(x, y))});
      }
    }
    if (!cloud.points.empty()) io::write_pointcloud(cloud, out / cloud_out);
  }
  log_info("depth written to " + (out / depth_out).string());
  return 0;
}

// -------------------------------------------------------------------- stereo

int cmd_stereo(const CommonArgs& common, const std::string& left_path,
               const std::string& right_path, const std::string& rig_path,
               const std::string& disparity_out, const std::string& cloud_out,
               const std::string& depth_out, bool filter_outliers) {
  const json cfg = common.load();
  const stereo::BlockMatchSettings settings =
      config::match_from_json(section(cfg, "match"));

  const ImageRgb8 left = io::read_image(left_path);
  const ImageRgb8 right = io::read_image(right_path);
  const stereo::StereoRig rig =
      rig_path.empty() ? stereo::StereoRig::canonical(left.width(), left.height())
                       : stereo::load_rig(rig_path);

  const auto [left_rect, right_rect] = stereo::rectify_pair(left, right, rig);
  const stereo::DisparityMap disparity =
      stereo::block_match(left_rect, right_rect, settings);

  const fs::path out = common.out();
  io::write_floatmap(disparity.map, out / disparity_out);

  stereo::ReprojectStats stats;
  PointCloud3 cloud = stereo::reproject(disparity, rig, &left_rect, &stats);
  if (cloud.points.empty()) throw Error("no valid disparities to reproject");
  if (filter_outliers && cloud.size() > 20) {
    cloud = stereo::remove_outliers(cloud, 20, 2.0);
  }
  if (!cloud_out.empty()) io::write_pointcloud(cloud, out / cloud_out);
  if (!depth_out.empty()) {
    io::write_floatmap(stereo::disparity_to_depth(disparity, rig), out / depth_out);
  }

  std::vector<double> zs;
  zs.reserve(cloud.size());
  for (const auto& p : cloud.points) zs.push_back(p.z);
  std::nth_element(zs.begin(), zs.begin() + zs.size() / 2, zs.end());
  std::cout << "valid pixels: " << stats.valid_points
            << ", skipped nonpositive: " << stats.skipped_nonpositive
            << ", median Z: " << zs[zs.size() / 2] << " mm\n";
  return 0;
}

// ------------------------------------------------------------------ evaluate

std::vector<sim::Finish> parse_membranes(const std::string& csv) {
  std::vector<sim::Finish> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(sim::finish_from_string(tok));
  if (out.empty()) throw Error("no membranes given");
  return out;
}

int cmd_evaluate(const CommonArgs& common, const std::string& mode,
                 const std::string& membranes_csv, const std::string& distances_csv,
                 int frames, int trials, double disk_mm, double depth_mm) {
  const json cfg = common.load();
  const fs::path out = common.out();

  if (mode == "sweep") {
    pipeline::StereoSweepConfig sweep;
    sweep.membranes = parse_membranes(membranes_csv);
    sweep.distances_mm.clear();
    std::stringstream ss(distances_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) sweep.distances_mm.push_back(std::stod(tok));
    sweep.frames_per_cell = frames;
    sweep.seed = common.seed;
    sweep.match = config::match_from_json(section(cfg, "match"));
    const stereo::StereoRig rig = stereo::StereoRig::canonical();

    const auto results = pipeline::run_stereo_sweep(sweep, rig);
    write_report(eval::assemble_rmse_report(results), out / "rmse.csv",
                 ReportFormat::Csv);
    write_report(eval::assemble_rmse_report(results), out / "rmse.json",
                 ReportFormat::Json);
    write_report(eval::assemble_temporal_report(results), out / "temporal_noise.csv",
                 ReportFormat::Csv);
    write_report(eval::assemble_zacc_report(results), out / "z_accuracy.csv",
                 ReportFormat::Csv);
    json sidecar{{"command", "evaluate"}, {"mode", "sweep"}, {"seed", common.seed},
                 {"frames_per_cell", frames}};
    write_sidecar(out, sidecar);
    std::cout << "sweep complete: " << results.size() << " cells\n";
    return 0;
  }

  if (mode != "tactile") throw Error("unknown evaluate mode: " + mode);

  const auto membranes = parse_membranes(membranes_csv);
  tactile::TrainConfig train = config::train_from_json(section(cfg, "train"));
  const sim::SensorGrid grid = config::grid_from_json(section(cfg, "grid"));

  std::vector<std::string> row_labels;
  std::vector<pipeline::DiskTrialStats> stats;
  for (const sim::Finish finish : membranes) {
    const sim::MembraneSpec membrane = sim::MembraneSpec::preset(finish);
    log_info("calibrating " + to_string(finish));
    const pipeline::TactileCalibration calib =
        pipeline::calibrate_membrane(membrane, 30, common.seed, train, grid);
    log_info("running " + std::to_string(trials) + " disk trials");
    stats.push_back(pipeline::run_disk_trials(membrane, calib, trials, disk_mm,
                                              depth_mm, common.seed + 1, grid));
    row_labels.push_back(to_string(finish));
  }

  ReportTable table("disk indentation depth by membrane", row_labels,
                    {"mean", "std"}, {"mm", "mm"});
  for (std::size_t i = 0; i < stats.size(); ++i) {
    table.cell(i, 0) = ReportCell::of(stats[i].mean_mm);
    table.cell(i, 1) = ReportCell::of(stats[i].std_mm);
  }
  write_report(table, out / "tactile_depth.csv", ReportFormat::Csv);
  write_report(table, out / "tactile_depth.json", ReportFormat::Json);
  json sidecar{{"command", "evaluate"}, {"mode", "tactile"}, {"seed", common.seed},
               {"trials", trials}, {"disk_diameter_mm", disk_mm},
               {"depth_mm", depth_mm}};
  write_sidecar(out, sidecar);
  for (std::size_t i = 0; i < stats.size(); ++i) {
    std::cout << row_labels[i] << ": mean " << stats[i].mean_mm << " mm, std "
              << stats[i].std_mm << " mm\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulated visuotactile sensor: rendering, reconstruction, evaluation"};
  app.require_subcommand(1);

  CommonArgs sim_args, calib_args, recon_args, stereo_args, eval_args;

  auto* sim_cmd = app.add_subcommand("simulate", "render tactile or stereo frames");
  std::string sim_mode = "tactile", indenter = "disk13", sim_membrane = "semi_reflective";
  double sim_depth = 1.0, sim_distance = 200.0, ball_mm = 4.0;
  double object_standoff = 0.0, object_reflectivity = 0.6;
  int presses = 0, sim_frames = 1;
  add_common(sim_cmd, sim_args);
  sim_cmd->add_option("--mode", sim_mode, "tactile | stereo");
  sim_cmd->add_option("--indenter", indenter, "disk<mm> | sphere<mm> | plane");
  sim_cmd->add_option("--depth", sim_depth, "indenter penetration, mm");
  sim_cmd->add_option("--membrane", sim_membrane, "membrane finish preset");
  sim_cmd->add_option("--distance", sim_distance, "scene plane distance, mm");
  sim_cmd->add_option("--presses", presses, "render a calibration press sequence");
  sim_cmd->add_option("--ball", ball_mm, "calibration ball radius, mm");
  sim_cmd->add_option("--frames", sim_frames, "stereo frame count");
  sim_cmd->add_option("--object-standoff", object_standoff,
                      "reflective object standoff, mm (0 = none)");
  sim_cmd->add_option("--object-reflectivity", object_reflectivity,
                      "reflective object reflectivity");

  auto* calib_cmd =
      app.add_subcommand("calibrate-tactile", "fit the gradient regressor");
  std::string data_csv, model_out = "model.json";
  add_common(calib_cmd, calib_args);
  calib_cmd->add_option("--data", data_csv, "calibration CSV")->required();
  calib_cmd->add_option("--model-out", model_out, "model file name");

  auto* recon_cmd = app.add_subcommand("reconstruct", "tactile frames to depth");
  std::string model_path, dx_path, dy_path, ref_dx, ref_dy;
  std::string depth_out = "depth.pfm", recon_cloud;
  double disk_cx = -1, disk_cy = -1, disk_diameter = 0.0;
  bool expect_no_contact = false;
  add_common(recon_cmd, recon_args);
  recon_cmd->add_option("--model", model_path)->required();
  recon_cmd->add_option("--dx", dx_path, "x-step frame")->required();
  recon_cmd->add_option("--dy", dy_path, "y-step frame")->required();
  recon_cmd->add_option("--ref-dx", ref_dx, "no-contact x-step frame")->required();
  recon_cmd->add_option("--ref-dy", ref_dy, "no-contact y-step frame")->required();
  recon_cmd->add_option("--depth-out", depth_out);
  recon_cmd->add_option("--cloud-out", recon_cloud, "optional PLY of the imprint");
  recon_cmd->add_option("--disk-cx", disk_cx, "disk center x, px");
  recon_cmd->add_option("--disk-cy", disk_cy, "disk center y, px");
  recon_cmd->add_option("--disk-diameter", disk_diameter, "disk diameter, mm");
  recon_cmd->add_flag("--expect-no-contact", expect_no_contact,
                      "flag any imprint as a leakage artifact");

  auto* stereo_cmd = app.add_subcommand("stereo", "disparity and point cloud");
  std::string left_path, right_path, rig_path;
  std::string disparity_out = "disparity.pfm", stereo_cloud = "cloud.ply", depth_map_out;
  bool filter_outliers = false;
  add_common(stereo_cmd, stereo_args);
  stereo_cmd->add_option("--left", left_path)->required();
  stereo_cmd->add_option("--right", right_path)->required();
  stereo_cmd->add_option("--rig", rig_path, "rig JSON (default: canonical rig)");
  stereo_cmd->add_option("--disparity-out", disparity_out);
  stereo_cmd->add_option("--cloud-out", stereo_cloud);
  stereo_cmd->add_option("--depth-out", depth_map_out, "optional Z map PFM");
  stereo_cmd->add_flag("--remove-outliers", filter_outliers);

  auto* eval_cmd = app.add_subcommand("evaluate", "paper-shaped report tables");
  std::string eval_mode = "sweep";
  std::string membranes = "transparent,semi_matte,semi_reflective";
  std::string distances = "100,150,200,250,300";
  int eval_frames = 10, eval_trials = 30;
  double eval_disk = 13.0, eval_depth = 1.0;
  add_common(eval_cmd, eval_args);
  eval_cmd->add_option("--mode", eval_mode, "sweep | tactile");
  eval_cmd->add_option("--membranes", membranes, "comma-separated finishes");
  eval_cmd->add_option("--distances", distances, "comma-separated distances, mm");
  eval_cmd->add_option("--frames", eval_frames, "frames per sweep cell");
  eval_cmd->add_option("--trials", eval_trials, "disk trials per membrane");
  eval_cmd->add_option("--disk", eval_disk, "disk diameter, mm");
  eval_cmd->add_option("--depth", eval_depth, "disk penetration, mm");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim_cmd->parsed()) {
      return cmd_simulate(sim_args, sim_mode, indenter, sim_depth, sim_membrane,
                          sim_distance, presses, ball_mm, sim_frames, object_standoff,
                          object_reflectivity);
    }
    if (calib_cmd->parsed()) {
      return cmd_calibrate_tactile(calib_args, data_csv, model_out);
    }
    if (recon_cmd->parsed()) {
      return cmd_reconstruct(recon_args, model_path, dx_path, dy_path, ref_dx, ref_dy,
                             depth_out, recon_cloud, disk_cx, disk_cy, disk_diameter,
                             expect_no_contact);
    }
    if (stereo_cmd->parsed()) {
      return cmd_stereo(stereo_args, left_path, right_path, rig_path, disparity_out,
                        stereo_cloud, depth_map_out, filter_outliers);
    }
    if (eval_cmd->parsed()) {
      return cmd_evaluate(eval_args, eval_mode, membranes, distances, eval_frames,
                          eval_trials, eval_disk, eval_depth);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
