#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rtbias/bayes_latent.hpp"
#include "rtbias/estimators.hpp"
#include "rtbias/simulator.hpp"

namespace rtbias::experiments {

enum class Scenario {
  A,  ///< no incubation: p(1) = 1, r0 = 1.4
  B,  ///< incubation: p(3) = p(4) = 1/2, r0 = 2.4
};

std::string scenario_name(Scenario s);
Scenario parse_scenario(const std::string& name);

struct ScenarioId {
  Scenario scenario = Scenario::A;
  /// Flat key=value overrides applied on top of the built-in configuration.
  std::vector<std::string> overrides;
};

/// Built-in configuration of a scenario, identical to configs/scenario_<x>.json.
ScenarioConfig default_scenario(Scenario s);
ScenarioConfig make_scenario(const ScenarioId& id, std::uint64_t rng_seed);

struct TransitionThresholds {
  double lower = 0.35;
  double upper = 0.75;
  /// Days with fewer total infections are ignored when locating the window.
  Count min_infections = 100;
};

struct TimeWindow {
  Count start = 0;
  Count end = 0;  ///< inclusive
};

/// Span during which the symptomatic fraction climbs from the first plateau
/// to the second: from just after the last day at or below `lower` that
/// precedes the first day at or above `upper`, up to just before that day.
std::optional<TimeWindow> detect_transition_window(const GroupedSeries& infections,
                                                   const GroupedSeries& symptomatics,
                                                   const TransitionThresholds& thresholds = {});

/// Day of maximum total incidence per group (first maximum on ties).
std::vector<Count> incidence_peaks(const GroupedSeries& infections);

struct Figure1Result {
  ScenarioConfig config;
  SimulationOutput simulation;
  std::vector<std::optional<double>> fraction;
  RtSeries naive;
  RtSeries truth;
  RtSeries corrected;
  std::optional<TimeWindow> window;
};

Figure1Result run_figure1(const ScenarioId& id, std::uint64_t rng_seed,
                          const EstimatorOptions& opts = {});

/// fig1_infections.csv, fig1_symptomatics.csv, fig1_fraction.csv,
/// fig1_rt_{naive,true,corrected}.csv and fig1_meta.json.
void write_figure1(const Figure1Result& result, const std::filesystem::path& dir);

enum class BayesMode {
  Off,
  SpotCheck,  ///< replicate 0 only
  All,
};

struct ReplicateOptions {
  EstimatorOptions estimator;
  BayesMode bayes = BayesMode::SpotCheck;
  McmcConfig mcmc;
  double prior_cap = kDefaultPriorCap;
  TransitionThresholds thresholds;
  /// Alternative thresholds reported as a sensitivity analysis.
  std::vector<TransitionThresholds> sensitivity = {{0.32, 0.78, 100}, {0.40, 0.70, 100},
                                                   {0.45, 0.65, 100}};
  unsigned threads = 0;
};

struct ErrorStats {
  double mean_difference = 0.0;
  double mean_absolute = 0.0;
  double max_absolute = 0.0;
  std::optional<double> mean_relative;
  std::size_t compared = 0;
  std::size_t skipped = 0;
};

ErrorStats to_stats(const RtErrorSummary& summary);

struct ReplicateResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::optional<TimeWindow> window;
  std::optional<ErrorStats> naive;
  std::optional<ErrorStats> corrected;
  std::optional<ErrorStats> bayes;
  /// Per-time differences (estimate - truth) inside the window.
  std::vector<RtDifference> naive_differences;
  std::vector<RtDifference> corrected_differences;
  /// MAE (naive, corrected) under each alternative threshold pair; nullopt
  /// when that window is empty.
  std::vector<std::optional<std::pair<double, double>>> sensitivity;
  std::vector<Count> peaks;
};

struct SensitivityEntry {
  TransitionThresholds thresholds;
  std::size_t replicates_with_window = 0;
  std::optional<double> mae_ratio;
};

struct ReplicateReport {
  Scenario scenario = Scenario::A;
  std::vector<std::string> overrides;
  std::size_t requested = 0;
  std::uint64_t base_seed = 0;
  ScenarioConfig config;  ///< configuration of replicate 0
  std::vector<ReplicateResult> replicates;

  std::size_t replicates_with_window = 0;
  double mean_mae_naive = 0.0;
  double mean_mae_corrected = 0.0;
  std::optional<double> mae_ratio;          ///< mean_mae_naive / mean_mae_corrected
  std::optional<double> mean_relative_naive;
  std::optional<double> mean_relative_corrected;
  std::size_t corrected_better = 0;         ///< replicates with MAE(corrected) <= MAE(naive)
  std::optional<double> median_peak_lag;    ///< last group's peak minus first group's
  std::optional<double> mean_mae_bayes;
  std::vector<SensitivityEntry> sensitivity;
  double wall_seconds = 0.0;  ///< not part of the deterministic report
};

/// Runs n independent simulations with seeds base_seed + i and compares the
/// naive and corrected estimators against the all-infections estimator over
/// each run's transition window. Aggregation is ordered by replicate index,
/// so the report does not depend on the thread count.
ReplicateReport run_replicates(const ScenarioId& id, std::size_t n, std::uint64_t base_seed,
                               const ReplicateOptions& options = {});

/// report_<s>.json (aggregates and metadata), replicates_<s>.csv (one row per
/// replicate), differences_<s>.csv (pooled per-time differences) and
/// timing_<s>.json (wall time, kept apart so the report is reproducible).
void write_replicate_report(const ReplicateReport& report, const std::filesystem::path& dir);

std::string report_json(const ReplicateReport& report);

}  // namespace rtbias::experiments
