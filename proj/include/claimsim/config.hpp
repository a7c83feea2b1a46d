#pragma once

#include <string>

#include <json.hpp>

#include "claimsim/harness.hpp"

namespace claimsim {

/// Parses a law written as name(p1, p2), e.g. "pareto(1.5, 1)".
ScalarLaw parse_law(const std::string& text);

/// Reads a sectioned key-value file. Unknown sections and keys are errors;
/// every error message starts with the offending key path.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

nlohmann::ordered_json to_json(const ModelSpec& spec);
nlohmann::ordered_json to_json(const ExperimentConfig& config);

}  // namespace claimsim
