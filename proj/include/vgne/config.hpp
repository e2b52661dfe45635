#pragma once

#include "vgne/scenarios.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace vgne {

/// Version of the scenario document layout written by scenario_to_json.
inline constexpr int kScenarioSchemaVersion = 1;

/// Serializes a quadratic scenario. Agents given only as gradient callbacks
/// cannot be written and raise ConfigError.
nlohmann::json scenario_to_json(const ScenarioSpec& spec);

/// Parses and validates a scenario document; throws ConfigError with the
/// offending key on malformed input.
ScenarioSpec scenario_from_json(const nlohmann::json& doc);

ScenarioSpec load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path);

/// A built-in name or a path to a scenario document.
ScenarioSpec resolve_scenario(const std::string& name_or_path);

nlohmann::json vector_to_json(const VectorRef& v);
Vector vector_from_json(const nlohmann::json& j, const std::string& key);

}  // namespace vgne
