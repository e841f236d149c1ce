#pragma once

#include <string>

#include <json.hpp>

#include "qrc/experiments.hpp"

namespace qrc {

/// Serializes the full effective configuration with stable key order.
nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);

/// Builds a configuration from a JSON document. The document must carry an
/// "experiment" key; remaining keys overlay that experiment's defaults.
/// A run manifest ({"config": {...}, ...}) is accepted as well, so a run can
/// be reproduced from its manifest alone.
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Loads and parses a config or manifest file. Throws ConfigError on parse or
/// validation problems.
ExperimentConfig config_from_file(const std::string& path);

}  // namespace qrc
