#pragma once

#include "arc/pipeline.hpp"

#include "json.hpp"

#include <filesystem>

namespace arc {

using Json = nlohmann::ordered_json;

Json to_json(const ScenarioSpec& spec);
// Fields absent from `j` keep their value from `base`; unknown keys throw.
ScenarioSpec scenario_from_json(const Json& j, ScenarioSpec base = {});

Json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const Json& j, RunConfig base = {});

RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& cfg, const std::filesystem::path& path);

}  // namespace arc
