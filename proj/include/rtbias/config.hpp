#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rtbias/bayes_latent.hpp"
#include "rtbias/estimators.hpp"
#include "rtbias/simulator.hpp"

namespace rtbias::config {

using nlohmann::json;

/// Parses JSON text; syntax errors become ParseError with line and column.
json parse_json(std::string_view text, const std::string& source = "<input>");

/// Closest known key by edit distance after normalizing case, separators and
/// spelled-out digits ("r_zero" -> "r0"). Empty when nothing is close.
std::string suggest_key(std::string_view unknown, const std::vector<std::string>& known);

/// Applies flat `key=value` overrides to a top-level object. The value is read
/// as JSON when it parses, otherwise as a string. Unknown keys are rejected.
void apply_overrides(json& document, const std::vector<std::string>& overrides,
                     const std::vector<std::string>& known_keys);

// Strict schemas: unknown keys, wrong types and violated constraints raise
// ValidationError naming the offending field.
ScenarioConfig scenario_from_json(const json& document);
EstimatorOptions estimator_options_from_json(const json& document);
McmcConfig mcmc_config_from_json(const json& document);

json to_json(const ScenarioConfig& config);
json to_json(const EstimatorOptions& opts);
json to_json(const McmcConfig& config);

const std::vector<std::string>& scenario_keys();
const std::vector<std::string>& estimator_keys();
const std::vector<std::string>& mcmc_keys();

ScenarioConfig load_scenario_config(const std::filesystem::path& path,
                                    const std::vector<std::string>& overrides = {});
EstimatorOptions load_estimator_options(const std::filesystem::path& path);
McmcConfig load_mcmc_config(const std::filesystem::path& path);

}  // namespace rtbias::config
