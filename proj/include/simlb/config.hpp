#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "simlb/scenario.hpp"

namespace simlb {

nlohmann::json to_json(const ScenarioConfig& config);

// Overlays the keys present in `j` onto the defaults of the scenario named by
// `j["scenario"]` (or `base` when absent). Unknown keys are rejected.
ScenarioConfig config_from_json(const nlohmann::json& j, const ScenarioConfig& base);
ScenarioConfig config_from_json(const nlohmann::json& j);

// Reads a config file or a run manifest (whose "config" member is used).
ScenarioConfig load_config(const std::filesystem::path& path);

// Hex SHA-1 of the canonical JSON text framed as a git blob object.
std::string content_hash(const nlohmann::json& j);

}  // namespace simlb
