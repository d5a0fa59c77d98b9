// JSON (de)serialization for the spec objects the CLI exchanges: membranes,
// indenters, scenes, sensor grid, matcher and training settings.
#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>

#include "stereotac/sim/render.hpp"
#include "stereotac/stereo/match.hpp"
#include "stereotac/tactile/mlp.hpp"

namespace stereotac::config {

using json = nlohmann::ordered_json;

/// Parses a config file; throws Error("invalid spec schema: ...") on
/// malformed content.
json load_config(const std::filesystem::path& path);

sim::MembraneSpec membrane_from_json(const json& j);
json membrane_to_json(const sim::MembraneSpec& spec);

sim::IndenterSpec indenter_from_json(const json& j, const sim::SensorGrid& grid);
json indenter_to_json(const sim::IndenterSpec& spec);

sim::ExternalScene scene_from_json(const json& j);
json scene_to_json(const sim::ExternalScene& scene);

sim::SensorGrid grid_from_json(const json& j);
json grid_to_json(const sim::SensorGrid& grid);

stereo::BlockMatchSettings match_from_json(const json& j);
tactile::TrainConfig train_from_json(const json& j);

/// Named indenter shorthand: "disk13", "sphere4", "plane".
sim::IndenterSpec indenter_preset(const std::string& name, double penetration_mm,
                                  const sim::SensorGrid& grid);

}  // namespace stereotac::config
