#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "fluidlob/model.hpp"

namespace fluidlob {

/// A model config file: the model plus an optional initial state "q0".
struct Fixture {
  ModelConfig model;
  std::optional<std::vector<double>> q0;
};

/// Parses a config object. Errors are ConfigError with a JSON pointer key.
/// Missing size distributions default to deterministic sizes at the means.
Fixture parse_fixture(const nlohmann::json& j);
Fixture load_fixture(const std::filesystem::path& path);
ModelConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const TypeDistribution& d);
nlohmann::json to_json(const SizeDistribution& d);
nlohmann::json to_json(const ModelConfig& cfg);
nlohmann::json to_json(const Fixture& fx);

}  // namespace fluidlob
