#include "rtbias/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>

#include "rtbias/error.hpp"
#include "rtbias/io.hpp"

namespace rtbias::config {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& constraint) {
  throw Error(ErrorCode::ValidationError, field + ": " + constraint);
}

std::string normalize_key(std::string_view key) {
  static constexpr std::array<std::string_view, 10> kDigits = {
      "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine"};
  std::string lowered;
  for (const char c : key) {
    if (c == '_' || c == '-' || c == ' ' || c == '.') continue;
    lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  std::string out;
  for (std::size_t i = 0; i < lowered.size();) {
    bool replaced = false;
    for (std::size_t d = 0; d < kDigits.size(); ++d) {
      if (lowered.compare(i, kDigits[d].size(), kDigits[d]) == 0) {
        out.push_back(static_cast<char>('0' + d));
        i += kDigits[d].size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out.push_back(lowered[i++]);
  }
  return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

void reject_unknown_keys(const json& document, const std::vector<std::string>& known,
                         const std::string& where) {
  if (!document.is_object()) invalid(where.empty() ? "<document>" : where, "must be a JSON object");
  for (const auto& [key, value] : document.items()) {
    if (std::find(known.begin(), known.end(), key) != known.end()) continue;
    std::string message = "unknown key";
    const auto suggestion = suggest_key(key, known);
    if (!suggestion.empty()) message += "; did you mean \"" + suggestion + "\"?";
    invalid(where.empty() ? key : where + "." + key, message);
  }
}

double get_real(const json& node, const std::string& field) {
  if (!node.is_number()) invalid(field, "must be a number");
  const double v = node.get<double>();
  if (!std::isfinite(v)) invalid(field, "must be finite");
  return v;
}

std::int64_t get_integer(const json& node, const std::string& field) {
  if (node.is_number_integer()) return node.get<std::int64_t>();
  if (node.is_number_float()) {
    const double v = node.get<double>();
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15) {
      return static_cast<std::int64_t>(v);
    }
  }
  invalid(field, "must be an integer");
}

std::uint64_t get_unsigned(const json& node, const std::string& field) {
  if (node.is_number_unsigned()) return node.get<std::uint64_t>();
  const auto v = get_integer(node, field);
  if (v < 0) invalid(field, "must be >= 0");
  return static_cast<std::uint64_t>(v);
}

std::size_t get_count(const json& node, const std::string& field, std::int64_t minimum) {
  const auto v = get_integer(node, field);
  if (v < minimum) invalid(field, "must be >= " + std::to_string(minimum));
  return static_cast<std::size_t>(v);
}

const json& require(const json& document, const char* key) {
  const auto it = document.find(key);
  if (it == document.end()) invalid(key, "required key is missing");
  return *it;
}

std::vector<double> get_real_array(const json& node, const std::string& field) {
  if (!node.is_array()) invalid(field, "must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(get_real(node[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace

json parse_json(std::string_view text, const std::string& source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t offset = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line) + ":" +
                                           std::to_string(column) + ": invalid JSON");
  }
}

std::string suggest_key(std::string_view unknown, const std::vector<std::string>& known) {
  const auto target = normalize_key(unknown);
  std::string best;
  std::size_t best_distance = std::numeric_limits<std::size_t>::max();
  for (const auto& candidate : known) {
    const auto d = edit_distance(target, normalize_key(candidate));
    if (d < best_distance) {
      best_distance = d;
      best = candidate;
    }
  }
  const std::size_t limit = std::max<std::size_t>(2, target.size() / 2);
  return best_distance <= limit ? best : std::string{};
}

void apply_overrides(json& document, const std::vector<std::string>& overrides,
                     const std::vector<std::string>& known_keys) {
  for (const auto& entry : overrides) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::InvalidArguments, "override '" + entry + "' is not key=value");
    }
    const std::string key = entry.substr(0, eq);
    const std::string value = entry.substr(eq + 1);
    if (std::find(known_keys.begin(), known_keys.end(), key) == known_keys.end()) {
      std::string message = "unknown override key";
      const auto suggestion = suggest_key(key, known_keys);
      if (!suggestion.empty()) message += "; did you mean \"" + suggestion + "\"?";
      invalid(key, message);
    }
    json parsed = json::parse(value, nullptr, false);
    document[key] = parsed.is_discarded() ? json(value) : parsed;
  }
}

const std::vector<std::string>& scenario_keys() {
  static const std::vector<std::string> keys = {
      "description", "group_sizes", "group_labels", "r0",     "gi",
      "coupling",    "seed_infections", "horizon",  "rates",  "rng_seed"};
  return keys;
}

const std::vector<std::string>& estimator_keys() {
  static const std::vector<std::string> keys = {"window", "min_denominator"};
  return keys;
}

const std::vector<std::string>& mcmc_keys() {
  static const std::vector<std::string> keys = {"n_samples",      "burn_in",        "thin",
                                                "proposal_width", "scale_proposal", "rng_seed"};
  return keys;
}

ScenarioConfig scenario_from_json(const json& document) {
  reject_unknown_keys(document, scenario_keys(), "");
  if (auto it = document.find("description"); it != document.end() && !it->is_string()) {
    invalid("description", "must be a string");
  }
  ScenarioConfig config;

  const auto& sizes = require(document, "group_sizes");
  if (!sizes.is_array() || sizes.empty()) invalid("group_sizes", "must be a non-empty array");
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    const auto field = "group_sizes[" + std::to_string(l) + "]";
    const auto n = get_integer(sizes[l], field);
    if (n <= 0) invalid(field, "must be > 0");
    config.group_sizes.push_back(n);
  }
  const std::size_t L = config.group_sizes.size();

  if (auto it = document.find("group_labels"); it != document.end()) {
    if (!it->is_array() || it->size() != L) {
      invalid("group_labels", "must be an array of " + std::to_string(L) + " strings");
    }
    for (std::size_t l = 0; l < L; ++l) {
      if (!(*it)[l].is_string() || (*it)[l].get<std::string>().empty()) {
        invalid("group_labels[" + std::to_string(l) + "]", "must be a non-empty string");
      }
      config.group_labels.push_back((*it)[l].get<std::string>());
    }
  }

  config.r0 = get_real(require(document, "r0"), "r0");
  if (config.r0 < 0.0) invalid("r0", "must be >= 0");

  try {
    config.gi = validate_generation_interval(get_real_array(require(document, "gi"), "gi"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationError) throw;
    invalid("gi", std::string(error_name(e.code())) + ": " + e.what());
  }

  const auto& coupling = require(document, "coupling");
  if (!coupling.is_array() || coupling.size() != L) {
    invalid("coupling", "must be a " + std::to_string(L) + "x" + std::to_string(L) + " matrix");
  }
  for (std::size_t l = 0; l < L; ++l) {
    const auto field = "coupling[" + std::to_string(l) + "]";
    auto row = get_real_array(coupling[l], field);
    if (row.size() != L) invalid(field, "must have " + std::to_string(L) + " entries");
    for (std::size_t m = 0; m < L; ++m) {
      if (row[m] < 0.0) invalid(field + "[" + std::to_string(m) + "]", "must be >= 0");
    }
    if (row[l] != 1.0) invalid(field + "[" + std::to_string(l) + "]", "diagonal entries must be 1");
    config.coupling.push_back(std::move(row));
  }

  const auto& seeds = require(document, "seed_infections");
  if (!seeds.is_array()) invalid("seed_infections", "must be an array");
  static const std::vector<std::string> seed_keys = {"time", "group", "count"};
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto where = "seed_infections[" + std::to_string(i) + "]";
    reject_unknown_keys(seeds[i], seed_keys, where);
    SeedInfection seed;
    for (const auto& key : seed_keys) {
      if (!seeds[i].contains(key)) invalid(where + "." + key, "required key is missing");
    }
    seed.time = get_count(seeds[i]["time"], where + ".time", 0);
    seed.group = get_count(seeds[i]["group"], where + ".group", 0);
    seed.count = static_cast<Count>(get_count(seeds[i]["count"], where + ".count", 0));
    config.seed_infections.push_back(seed);
  }

  config.horizon = get_count(require(document, "horizon"), "horizon", 1);

  const auto rates = get_real_array(require(document, "rates"), "rates");
  if (rates.size() != L) invalid("rates", "must have " + std::to_string(L) + " entries");
  for (std::size_t l = 0; l < L; ++l) {
    if (!(rates[l] > 0.0 && rates[l] <= 1.0)) {
      invalid("rates[" + std::to_string(l) + "]", "symptomatic rate must lie in (0, 1]");
    }
  }
  config.rates = SymptomaticRates(rates);

  config.rng_seed = get_unsigned(require(document, "rng_seed"), "rng_seed");

  try {
    validate(config);
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationError, e.what());
  }
  return config;
}

EstimatorOptions estimator_options_from_json(const json& document) {
  reject_unknown_keys(document, estimator_keys(), "");
  EstimatorOptions opts;
  if (document.contains("window")) opts.window = get_count(document["window"], "window", 1);
  if (document.contains("min_denominator")) {
    opts.min_denominator = get_real(document["min_denominator"], "min_denominator");
    if (!(opts.min_denominator > 0.0)) invalid("min_denominator", "must be > 0");
  }
  return opts;
}

McmcConfig mcmc_config_from_json(const json& document) {
  reject_unknown_keys(document, mcmc_keys(), "");
  McmcConfig config;
  if (document.contains("n_samples")) config.n_samples = get_count(document["n_samples"], "n_samples", 1);
  if (document.contains("burn_in")) config.burn_in = get_count(document["burn_in"], "burn_in", 1);
  if (document.contains("thin")) config.thin = get_count(document["thin"], "thin", 1);
  if (document.contains("proposal_width")) {
    config.proposal_width = get_count(document["proposal_width"], "proposal_width", 1);
  }
  if (document.contains("scale_proposal")) {
    if (!document["scale_proposal"].is_boolean()) invalid("scale_proposal", "must be true or false");
    config.scale_proposal = document["scale_proposal"].get<bool>();
  }
  if (document.contains("rng_seed")) config.rng_seed = get_unsigned(document["rng_seed"], "rng_seed");
  return config;
}

json to_json(const ScenarioConfig& config) {
  json seeds = json::array();
  for (const auto& s : config.seed_infections) {
    seeds.push_back({{"time", s.time}, {"group", s.group}, {"count", s.count}});
  }
  json out = {
      {"group_sizes", config.group_sizes},
      {"r0", config.r0},
      {"gi", std::vector<double>(config.gi.probs().begin(), config.gi.probs().end())},
      {"coupling", config.coupling},
      {"seed_infections", seeds},
      {"horizon", config.horizon},
      {"rates", std::vector<double>(config.rates.values().begin(), config.rates.values().end())},
      {"rng_seed", config.rng_seed},
  };
  if (!config.group_labels.empty()) out["group_labels"] = config.group_labels;
  return out;
}

json to_json(const EstimatorOptions& opts) {
  return {{"window", opts.window}, {"min_denominator", opts.min_denominator}};
}

json to_json(const McmcConfig& config) {
  return {{"n_samples", config.n_samples},         {"burn_in", config.burn_in},
          {"thin", config.thin},                   {"proposal_width", config.proposal_width},
          {"scale_proposal", config.scale_proposal}, {"rng_seed", config.rng_seed}};
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path,
                                    const std::vector<std::string>& overrides) {
  auto document = parse_json(io::read_text_file(path), path.string());
  apply_overrides(document, overrides, scenario_keys());
  return scenario_from_json(document);
}

EstimatorOptions load_estimator_options(const std::filesystem::path& path) {
  return estimator_options_from_json(parse_json(io::read_text_file(path), path.string()));
}

McmcConfig load_mcmc_config(const std::filesystem::path& path) {
  return mcmc_config_from_json(parse_json(io::read_text_file(path), path.string()));
}

}  // namespace rtbias::config
