#pragma once

#include <string>

#include <json.hpp>

#include "fedsim/orchestration.hpp"

namespace fedsim {

// Config file schema is documented in README.md. Unknown keys and bad value
// types raise ConfigError naming the offending key.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);

ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace fedsim
