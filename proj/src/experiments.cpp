#include "rtbias/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "rtbias/config.hpp"
#include "rtbias/error.hpp"
#include "rtbias/io.hpp"
#include "rtbias/parallel.hpp"
#include "rtbias/rng.hpp"

namespace rtbias::experiments {

namespace {

using nlohmann::json;

// Y -> O leakage, calibrated so that the median O incidence peak trails the Y
// peak by about 20 days over 100 runs (see configs/).
constexpr double kCouplingA = 1.5e-4;
constexpr double kCouplingB = 1.0e-3;
constexpr Count kGroupSize = 200000;
constexpr Count kInitialSeed = 20;
constexpr std::size_t kHorizon = 100;

ScenarioConfig two_group_base(double epsilon) {
  ScenarioConfig config;
  config.group_sizes = {kGroupSize, kGroupSize};
  config.group_labels = {"Y", "O"};
  config.coupling = {{1.0, 0.0}, {epsilon, 1.0}};
  config.seed_infections = {{0, 0, kInitialSeed}};
  config.horizon = kHorizon;
  config.rates = SymptomaticRates({0.3, 0.8});
  config.rng_seed = 1;
  return config;
}

template <class T>
json optional_json(const std::optional<T>& value) {
  return value ? json(*value) : json(nullptr);
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? io::format_double(*v) : std::string{};
}

std::optional<ErrorStats> compare(const RtSeries& estimate, const RtSeries& truth,
                                  const std::optional<TimeWindow>& window,
                                  std::vector<RtDifference>* differences = nullptr) {
  if (!window) return std::nullopt;
  try {
    auto summary = rt_error_summary(estimate, truth, window->start, window->end);
    if (differences) *differences = summary.differences;
    return to_stats(summary);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyOverlap) throw;
    return std::nullopt;
  }
}

std::optional<double> median_of(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::string scenario_name(Scenario s) { return s == Scenario::A ? "A" : "B"; }

Scenario parse_scenario(const std::string& name) {
  if (name == "A" || name == "a") return Scenario::A;
  if (name == "B" || name == "b") return Scenario::B;
  throw Error(ErrorCode::InvalidArguments, "unknown scenario '" + name + "' (expected A or B)");
}

ScenarioConfig default_scenario(Scenario s) {
  if (s == Scenario::A) {
    auto config = two_group_base(kCouplingA);
    config.r0 = 1.4;
    config.gi = validate_generation_interval(std::vector<double>{1.0});
    return config;
  }
  auto config = two_group_base(kCouplingB);
  config.r0 = 2.4;
  config.gi = validate_generation_interval(std::vector<double>{0.0, 0.0, 0.5, 0.5});
  return config;
}

ScenarioConfig make_scenario(const ScenarioId& id, std::uint64_t rng_seed) {
  auto base = default_scenario(id.scenario);
  base.rng_seed = rng_seed;
  if (id.overrides.empty()) return base;
  auto document = config::to_json(base);
  config::apply_overrides(document, id.overrides, config::scenario_keys());
  return config::scenario_from_json(document);
}

std::optional<TimeWindow> detect_transition_window(const GroupedSeries& infections,
                                                   const GroupedSeries& symptomatics,
                                                   const TransitionThresholds& thresholds) {
  const auto fraction = symptomatic_fraction(infections, symptomatics);
  const auto totals = infections.totals();
  auto usable = [&](std::size_t t) { return fraction[t] && totals[t] >= thresholds.min_infections; };

  std::optional<std::size_t> high;
  for (std::size_t t = 0; t < fraction.size(); ++t) {
    if (usable(t) && *fraction[t] >= thresholds.upper) {
      high = t;
      break;
    }
  }
  if (!high) return std::nullopt;
  std::optional<std::size_t> low;
  for (std::size_t t = *high; t-- > 0;) {
    if (usable(t) && *fraction[t] <= thresholds.lower) {
      low = t;
      break;
    }
  }
  if (!low) return std::nullopt;
  const Count origin = infections.origin();
  if (*high - *low >= 2) {
    return TimeWindow{origin + static_cast<Count>(*low + 1), origin + static_cast<Count>(*high - 1)};
  }
  return TimeWindow{origin + static_cast<Count>(*low), origin + static_cast<Count>(*high)};
}

std::vector<Count> incidence_peaks(const GroupedSeries& infections) {
  std::vector<Count> peaks(infections.groups(), 0);
  for (std::size_t l = 0; l < infections.groups(); ++l) {
    Count best = -1;
    for (std::size_t t = 0; t < infections.times(); ++t) {
      if (infections.at(t, l) > best) {
        best = infections.at(t, l);
        peaks[l] = infections.origin() + static_cast<Count>(t);
      }
    }
  }
  return peaks;
}

Figure1Result run_figure1(const ScenarioId& id, std::uint64_t rng_seed, const EstimatorOptions& opts) {
  Figure1Result out;
  out.config = make_scenario(id, rng_seed);
  out.simulation = simulate(out.config);
  const auto& sim = out.simulation;
  out.fraction = symptomatic_fraction(sim.infections, sim.symptomatics);
  out.naive = estimate_rt_naive(sim.symptomatics, out.config.gi, opts);
  out.truth = estimate_rt_true(sim.infections, out.config.gi, opts);
  out.corrected = estimate_rt_corrected(sim.symptomatics, out.config.rates, out.config.gi, opts);
  out.window = detect_transition_window(sim.infections, sim.symptomatics);
  return out;
}

void write_figure1(const Figure1Result& result, const std::filesystem::path& dir) {
  const auto& sim = result.simulation;
  io::write_file(dir / "fig1_infections.csv",
                 [&](std::ostream& o) { io::write_grouped_csv(o, sim.infections); });
  io::write_file(dir / "fig1_symptomatics.csv",
                 [&](std::ostream& o) { io::write_grouped_csv(o, sim.symptomatics); });
  io::write_file(dir / "fig1_fraction.csv", [&](std::ostream& o) {
    io::write_optional_series_csv(o, "fraction", result.fraction, sim.infections.origin());
  });
  io::write_file(dir / "fig1_rt_naive.csv", [&](std::ostream& o) { io::write_rt_csv(o, result.naive); });
  io::write_file(dir / "fig1_rt_true.csv", [&](std::ostream& o) { io::write_rt_csv(o, result.truth); });
  io::write_file(dir / "fig1_rt_corrected.csv",
                 [&](std::ostream& o) { io::write_rt_csv(o, result.corrected); });
  json meta = {{"config", config::to_json(result.config)},
               {"burn_in_end", result.truth.burn_in_end}};
  meta["transition_window"] =
      result.window ? json{{"start", result.window->start}, {"end", result.window->end}} : json(nullptr);
  io::write_text_file(dir / "fig1_meta.json", meta.dump(2) + "\n");
}

ErrorStats to_stats(const RtErrorSummary& summary) {
  return {summary.mean_difference, summary.mean_absolute, summary.max_absolute,
          summary.mean_relative,   summary.differences.size(), summary.skipped};
}

ReplicateReport run_replicates(const ScenarioId& id, std::size_t n, std::uint64_t base_seed,
                               const ReplicateOptions& options) {
  if (n < 1) throw Error(ErrorCode::InvalidArguments, "replicate count must be >= 1");
  validate(options.estimator);
  const auto started = std::chrono::steady_clock::now();

  ReplicateReport report;
  report.scenario = id.scenario;
  report.overrides = id.overrides;
  report.requested = n;
  report.base_seed = base_seed;
  report.config = make_scenario(id, base_seed);
  report.replicates.resize(n);

  parallel_for(
      n,
      [&](std::size_t i) {
        ReplicateResult& rep = report.replicates[i];
        rep.index = i;
        rep.seed = base_seed + i;
        const auto config = make_scenario(id, rep.seed);
        const auto sim = simulate(config);
        const auto truth = estimate_rt_true(sim.infections, config.gi, options.estimator);
        const auto naive = estimate_rt_naive(sim.symptomatics, config.gi, options.estimator);
        const auto corrected =
            estimate_rt_corrected(sim.symptomatics, config.rates, config.gi, options.estimator);
        rep.peaks = incidence_peaks(sim.infections);
        rep.window = detect_transition_window(sim.infections, sim.symptomatics, options.thresholds);
        rep.naive = compare(naive, truth, rep.window, &rep.naive_differences);
        rep.corrected = compare(corrected, truth, rep.window, &rep.corrected_differences);

        const bool run_bayes = options.bayes == BayesMode::All ||
                               (options.bayes == BayesMode::SpotCheck && i == 0);
        if (run_bayes) {
          auto mcmc = options.mcmc;
          mcmc.rng_seed = derive_seed(rep.seed, stream::kMcmc);
          const auto posterior =
              sample_latent_known_rates(sim.symptomatics, config.rates, options.prior_cap, mcmc);
          rep.bayes = compare(rt_posterior(posterior, config.gi, options.estimator), truth, rep.window);
        }

        for (const auto& alt : options.sensitivity) {
          const auto w = detect_transition_window(sim.infections, sim.symptomatics, alt);
          const auto a = compare(naive, truth, w);
          const auto b = compare(corrected, truth, w);
          if (a && b) rep.sensitivity.emplace_back(std::make_pair(a->mean_absolute, b->mean_absolute));
          else rep.sensitivity.emplace_back(std::nullopt);
        }
      },
      options.threads);

  // Deterministic reduction in replicate order.
  double naive_sum = 0.0, corrected_sum = 0.0, rel_naive = 0.0, rel_corrected = 0.0, bayes_sum = 0.0;
  std::size_t rel_naive_n = 0, rel_corrected_n = 0, bayes_n = 0;
  std::vector<double> lags;
  for (const auto& rep : report.replicates) {
    if (rep.peaks.size() >= 2) lags.push_back(static_cast<double>(rep.peaks.back() - rep.peaks.front()));
    if (rep.bayes) {
      bayes_sum += rep.bayes->mean_absolute;
      ++bayes_n;
    }
    if (!rep.naive || !rep.corrected) continue;
    ++report.replicates_with_window;
    naive_sum += rep.naive->mean_absolute;
    corrected_sum += rep.corrected->mean_absolute;
    if (rep.corrected->mean_absolute <= rep.naive->mean_absolute) ++report.corrected_better;
    if (rep.naive->mean_relative) {
      rel_naive += *rep.naive->mean_relative;
      ++rel_naive_n;
    }
    if (rep.corrected->mean_relative) {
      rel_corrected += *rep.corrected->mean_relative;
      ++rel_corrected_n;
    }
  }
  if (report.replicates_with_window > 0) {
    const auto k = static_cast<double>(report.replicates_with_window);
    report.mean_mae_naive = naive_sum / k;
    report.mean_mae_corrected = corrected_sum / k;
    if (report.mean_mae_corrected > 0.0) {
      report.mae_ratio = report.mean_mae_naive / report.mean_mae_corrected;
    }
  }
  if (rel_naive_n > 0) report.mean_relative_naive = rel_naive / static_cast<double>(rel_naive_n);
  if (rel_corrected_n > 0) {
    report.mean_relative_corrected = rel_corrected / static_cast<double>(rel_corrected_n);
  }
  if (bayes_n > 0) report.mean_mae_bayes = bayes_sum / static_cast<double>(bayes_n);
  report.median_peak_lag = median_of(lags);

  for (std::size_t s = 0; s < options.sensitivity.size(); ++s) {
    SensitivityEntry entry;
    entry.thresholds = options.sensitivity[s];
    double a = 0.0, b = 0.0;
    for (const auto& rep : report.replicates) {
      if (!rep.sensitivity[s]) continue;
      ++entry.replicates_with_window;
      a += rep.sensitivity[s]->first;
      b += rep.sensitivity[s]->second;
    }
    if (entry.replicates_with_window > 0 && b > 0.0) entry.mae_ratio = a / b;
    report.sensitivity.push_back(entry);
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

std::string report_json(const ReplicateReport& report) {
  json sensitivity = json::array();
  for (const auto& s : report.sensitivity) {
    sensitivity.push_back({{"lower", s.thresholds.lower},
                           {"upper", s.thresholds.upper},
                           {"replicates_with_window", s.replicates_with_window},
                           {"mae_ratio", optional_json(s.mae_ratio)}});
  }
  json out = {
      {"scenario", scenario_name(report.scenario)},
      {"overrides", report.overrides},
      {"replicates", report.requested},
      {"base_seed", report.base_seed},
      {"seeds", {{"first", report.base_seed}, {"last", report.base_seed + report.requested - 1}}},
      {"coupling", report.config.coupling},
      {"config", config::to_json(report.config)},
      {"replicates_with_window", report.replicates_with_window},
      {"mean_mae_naive", report.mean_mae_naive},
      {"mean_mae_corrected", report.mean_mae_corrected},
      {"mae_ratio", optional_json(report.mae_ratio)},
      {"mean_relative_naive", optional_json(report.mean_relative_naive)},
      {"mean_relative_corrected", optional_json(report.mean_relative_corrected)},
      {"corrected_better", report.corrected_better},
      {"median_peak_lag", optional_json(report.median_peak_lag)},
      {"mean_mae_bayes", optional_json(report.mean_mae_bayes)},
      {"window_sensitivity", sensitivity},
  };
  return out.dump(2) + "\n";
}

void write_replicate_report(const ReplicateReport& report, const std::filesystem::path& dir) {
  const auto s = scenario_name(report.scenario);
  io::write_text_file(dir / ("report_" + s + ".json"), report_json(report));

  io::write_file(dir / ("replicates_" + s + ".csv"), [&](std::ostream& o) {
    o << "replicate,seed,window_start,window_end,mae_naive,mae_corrected,mean_diff_naive,"
         "mean_diff_corrected,max_abs_naive,max_abs_corrected,mean_rel_naive,mean_rel_corrected,"
         "mae_bayes,peak_first,peak_last\n";
    for (const auto& rep : report.replicates) {
      auto field = [](const std::optional<ErrorStats>& st, auto member) -> std::string {
        return st ? io::format_double((*st).*member) : std::string{};
      };
      o << rep.index << ',' << rep.seed << ',';
      if (rep.window) o << rep.window->start << ',' << rep.window->end;
      else o << ',';
      o << ',' << field(rep.naive, &ErrorStats::mean_absolute) << ','
        << field(rep.corrected, &ErrorStats::mean_absolute) << ','
        << field(rep.naive, &ErrorStats::mean_difference) << ','
        << field(rep.corrected, &ErrorStats::mean_difference) << ','
        << field(rep.naive, &ErrorStats::max_absolute) << ','
        << field(rep.corrected, &ErrorStats::max_absolute) << ','
        << optional_cell(rep.naive ? rep.naive->mean_relative : std::nullopt) << ','
        << optional_cell(rep.corrected ? rep.corrected->mean_relative : std::nullopt) << ','
        << field(rep.bayes, &ErrorStats::mean_absolute) << ',';
      if (rep.peaks.size() >= 2) o << rep.peaks.front() << ',' << rep.peaks.back();
      else o << ',';
      o << '\n';
    }
  });

  io::write_file(dir / ("differences_" + s + ".csv"), [&](std::ostream& o) {
    o << "replicate,t,true_rt,naive_diff,corrected_diff\n";
    for (const auto& rep : report.replicates) {
      // Both series are compared against the same truth over the same window.
      std::size_t j = 0;
      for (const auto& d : rep.naive_differences) {
        while (j < rep.corrected_differences.size() && rep.corrected_differences[j].t < d.t) ++j;
        o << rep.index << ',' << d.t << ',' << io::format_double(d.truth) << ','
          << io::format_double(d.difference) << ',';
        if (j < rep.corrected_differences.size() && rep.corrected_differences[j].t == d.t) {
          o << io::format_double(rep.corrected_differences[j].difference);
        }
        o << '\n';
      }
    }
  });

  json timing = {{"scenario", s}, {"wall_seconds", report.wall_seconds}};
  io::write_text_file(dir / ("timing_" + s + ".json"), timing.dump(2) + "\n");
}

}  // namespace rtbias::experiments
