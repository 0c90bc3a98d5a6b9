#pragma once

#include <string>

#include "qvlab/experiments.hpp"

namespace qvlab {

// Parses an experiment config from JSON text. Unknown keys anywhere in the
// document are rejected (fail closed), as are type mismatches and values the
// validators refuse. Throws std::invalid_argument with a key path on error.
ExperimentConfig parse_config_json(const std::string& json_text);

ExperimentConfig load_config_file(const std::string& path);

// Deterministic re-serialization with a fixed key order; input to the
// run-manifest hash, so two configs hash equal iff they parse equal.
std::string canonical_config_json(const ExperimentConfig& config);

// Built-in scenario: Brownian motion + compound Poisson + fractional noise on
// a 2^18-step unit horizon, square transform, additive-Brownian perturbation
// family, 50 seeds.
ExperimentConfig desk_scenario_config();

}  // namespace qvlab
