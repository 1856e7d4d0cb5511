#pragma once

#include <string>

#include "avmarket/types.hpp"

namespace avmarket {

// Desk-scale defaults: 400 km^2 at 5000/km^2, 30% vehicle ownership, 10% AV
// penetration, peak 4 h at 300k travelers/h, off-peak 20 h at 100k/h.
ExperimentConfig default_config();

// Strict JSON: unknown keys anywhere are a ConfigError; all invariants checked.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

// Invariant checks shared by parse and programmatic construction.
void validate_config(const ExperimentConfig& config);

}  // namespace avmarket
