#include "stereotac/config.hpp"

#include <fstream>

namespace stereotac::config {

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path.string());
  try {
    return json::parse(in);
  } catch (const std::exception& e) {
    throw Error("invalid spec schema: " + std::string(e.what()));
  }
}

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw Error("invalid spec schema: " + what);
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const std::exception&) {
    schema_error(std::string("bad value for '") + key + "'");
  }
}

}  // namespace

sim::MembraneSpec membrane_from_json(const json& j) {
  if (j.is_string()) return sim::MembraneSpec::preset(sim::finish_from_string(j.get<std::string>()));
  if (!j.is_object()) schema_error("membrane must be a name or an object");
  sim::MembraneSpec spec =
      sim::MembraneSpec::preset(sim::finish_from_string(field_or<std::string>(
          j, "finish", "semi_reflective")));
  spec.opacity = field_or(j, "opacity", spec.opacity);
  spec.specular_exponent = field_or(j, "specular_exponent", spec.specular_exponent);
  spec.specular_gain = field_or(j, "specular_gain", spec.specular_gain);
  spec.coating_gain = field_or(j, "coating_gain", spec.coating_gain);
  spec.speckle_density = field_or(j, "speckle_density", spec.speckle_density);
  spec.stiffness_radius_px = field_or(j, "stiffness_radius_px", spec.stiffness_radius_px);
  spec.tactile_noise = field_or(j, "tactile_noise", spec.tactile_noise);
  spec.tactile_gain_jitter = field_or(j, "tactile_gain_jitter", spec.tactile_gain_jitter);
  spec.stereo_jitter = field_or(j, "stereo_jitter", spec.stereo_jitter);
  spec.stereo_blur_px_per_opacity =
      field_or(j, "stereo_blur_px_per_opacity", spec.stereo_blur_px_per_opacity);
  spec.validate();
  return spec;
}

json membrane_to_json(const sim::MembraneSpec& spec) {
  return json{{"finish", to_string(spec.finish)},
              {"opacity", spec.opacity},
              {"specular_exponent", spec.specular_exponent},
              {"specular_gain", spec.specular_gain},
              {"coating_gain", spec.coating_gain},
              {"speckle_density", spec.speckle_density},
              {"stiffness_radius_px", spec.stiffness_radius_px},
              {"tactile_noise", spec.tactile_noise},
              {"tactile_gain_jitter", spec.tactile_gain_jitter},
              {"stereo_jitter", spec.stereo_jitter},
              {"stereo_blur_px_per_opacity", spec.stereo_blur_px_per_opacity}};
}

sim::IndenterSpec indenter_from_json(const json& j, const sim::SensorGrid& grid) {
  if (!j.is_object()) schema_error("indenter must be an object");
  const std::string shape = field_or<std::string>(j, "shape", "disk");
  sim::IndenterSpec spec;
  spec.penetration_mm = field_or(j, "penetration_mm", 1.0);
  spec.center_x_px = field_or(j, "center_x_px", (grid.width - 1) / 2.0);
  spec.center_y_px = field_or(j, "center_y_px", (grid.height - 1) / 2.0);
  if (shape == "disk") {
    spec.shape = sim::IndenterSpec::Shape::Disk;
    spec.disk_diameter_mm = field_or(j, "diameter_mm", 13.0);
  } else if (shape == "sphere") {
    spec.shape = sim::IndenterSpec::Shape::Sphere;
    spec.sphere_radius_mm = field_or(j, "radius_mm", 4.0);
  } else if (shape == "plane") {
    spec.shape = sim::IndenterSpec::Shape::Plane;
  } else {
    schema_error("unknown indenter shape: " + shape);
  }
  return spec;
}

json indenter_to_json(const sim::IndenterSpec& spec) {
  json j;
  switch (spec.shape) {
    case sim::IndenterSpec::Shape::Disk:
      j["shape"] = "disk";
      j["diameter_mm"] = spec.disk_diameter_mm;
      break;
    case sim::IndenterSpec::Shape::Sphere:
      j["shape"] = "sphere";
      j["radius_mm"] = spec.sphere_radius_mm;
      break;
    case sim::IndenterSpec::Shape::Plane:
      j["shape"] = "plane";
      break;
    case sim::IndenterSpec::Shape::Heightfield:
      j["shape"] = "heightfield";
      break;
  }
  j["penetration_mm"] = spec.penetration_mm;
  j["center_x_px"] = spec.center_x_px;
  j["center_y_px"] = spec.center_y_px;
  return j;
}

sim::ExternalScene scene_from_json(const json& j) {
  if (!j.is_object()) schema_error("scene must be an object");
  sim::ExternalScene scene;
  if (j.contains("plane_distance_mm") && !j.at("plane_distance_mm").is_null()) {
    scene.plane_distance_mm = field_or(j, "plane_distance_mm", 200.0);
  }
  scene.texture_seed = field_or<std::uint64_t>(j, "texture_seed", 1);
  scene.texture_px_per_mm = field_or(j, "texture_px_per_mm", 1.5);
  scene.ambient = field_or(j, "ambient", 0.0);
  if (j.contains("reflective_object") && !j.at("reflective_object").is_null()) {
    const json& o = j.at("reflective_object");
    sim::ReflectiveObject obj;
    obj.standoff_mm = field_or(o, "standoff_mm", 1.0);
    obj.reflectivity = field_or(o, "reflectivity", 0.6);
    obj.diameter_mm = field_or(o, "diameter_mm", 8.0);
    obj.center_x_px = field_or(o, "center_x_px", 320.0);
    obj.center_y_px = field_or(o, "center_y_px", 240.0);
    scene.reflective_object = obj;
  }
  scene.validate();
  return scene;
}

json scene_to_json(const sim::ExternalScene& scene) {
  json j;
  if (scene.plane_distance_mm) j["plane_distance_mm"] = *scene.plane_distance_mm;
  j["texture_seed"] = scene.texture_seed;
  j["texture_px_per_mm"] = scene.texture_px_per_mm;
  j["ambient"] = scene.ambient;
  if (scene.reflective_object) {
    j["reflective_object"] = {{"standoff_mm", scene.reflective_object->standoff_mm},
                              {"reflectivity", scene.reflective_object->reflectivity},
                              {"diameter_mm", scene.reflective_object->diameter_mm},
                              {"center_x_px", scene.reflective_object->center_x_px},
                              {"center_y_px", scene.reflective_object->center_y_px}};
  }
  return j;
}

sim::SensorGrid grid_from_json(const json& j) {
  sim::SensorGrid grid;
  if (j.is_null()) return grid;
  grid.width = field_or(j, "width", grid.width);
  grid.height = field_or(j, "height", grid.height);
  grid.px_per_mm = field_or(j, "px_per_mm", grid.px_per_mm);
  if (grid.width < 8 || grid.height < 8 || grid.px_per_mm <= 0) {
    schema_error("grid dimensions out of range");
  }
  return grid;
}

json grid_to_json(const sim::SensorGrid& grid) {
  return json{{"width", grid.width}, {"height", grid.height}, {"px_per_mm", grid.px_per_mm}};
}

stereo::BlockMatchSettings match_from_json(const json& j) {
  stereo::BlockMatchSettings s;
  if (j.is_null()) return s;
  s.window = field_or(j, "window", s.window);
  s.min_disparity = field_or(j, "min_disparity", s.min_disparity);
  s.max_disparity = field_or(j, "max_disparity", s.max_disparity);
  s.uniqueness_ratio = field_or(j, "uniqueness_ratio", s.uniqueness_ratio);
  s.texture_threshold = field_or(j, "texture_threshold", s.texture_threshold);
  s.validate();
  return s;
}

tactile::TrainConfig train_from_json(const json& j) {
  tactile::TrainConfig c;
  if (j.is_null()) return c;
  c.learning_rate = field_or(j, "learning_rate", c.learning_rate);
  c.epochs = field_or(j, "epochs", c.epochs);
  c.holdout_fraction = field_or(j, "holdout_fraction", c.holdout_fraction);
  c.max_samples = field_or<std::size_t>(j, "max_samples", c.max_samples);
  c.seed = field_or<std::uint64_t>(j, "seed", c.seed);
  return c;
}

sim::IndenterSpec indenter_preset(const std::string& name, double penetration_mm,
                                  const sim::SensorGrid& grid) {
  const double cx = (grid.width - 1) / 2.0;
  const double cy = (grid.height - 1) / 2.0;
  if (name == "plane") return sim::IndenterSpec::plane(penetration_mm);
  if (name.rfind("disk", 0) == 0) {
    const double d = name.size() > 4 ? std::stod(name.substr(4)) : 13.0;
    return sim::IndenterSpec::disk(d, penetration_mm, cx, cy);
  }
  if (name.rfind("sphere", 0) == 0) {
    const double r = name.size() > 6 ? std::stod(name.substr(6)) : 4.0;
    return sim::IndenterSpec::sphere(r, penetration_mm, cx, cy);
  }
  throw Error("unknown indenter preset: " + name);
}

}  // namespace stereotac::config
