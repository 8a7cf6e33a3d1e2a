#include "rtbias/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rtbias/bayes_latent.hpp"
#include "rtbias/config.hpp"
#include "rtbias/error.hpp"
#include "rtbias/estimators.hpp"
#include "rtbias/experiments.hpp"
#include "rtbias/io.hpp"
#include "rtbias/rng.hpp"
#include "rtbias/simulator.hpp"

namespace rtbias::cli {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void usage(const std::string& what) { throw Error(ErrorCode::InvalidArguments, what); }

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

double parse_number(const std::string& text, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    usage(flag + ": '" + text + "' is not a number");
  }
}

SymptomaticRates parse_rates(const std::string& text) {
  std::vector<double> rates;
  for (const auto& item : split_list(text)) rates.push_back(parse_number(item, "--rates"));
  return SymptomaticRates(std::move(rates));
}

std::vector<BetaPrior> parse_priors(const std::string& text) {
  std::vector<BetaPrior> priors;
  for (const auto& item : split_list(text)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) usage("--priors: expected alpha:beta pairs, got '" + item + "'");
    BetaPrior prior{parse_number(item.substr(0, colon), "--priors"),
                    parse_number(item.substr(colon + 1), "--priors")};
    validate(prior);
    priors.push_back(prior);
  }
  return priors;
}

void require_file(const std::string& path, const std::string& flag) {
  if (path.empty()) usage(flag + " is required");
  if (!fs::exists(path)) throw Error(ErrorCode::IoError, flag + ": no such file " + path);
}

EstimatorOptions estimator_options(const CliInvocation& inv, bool config_is_estimator) {
  EstimatorOptions opts;
  if (config_is_estimator && !inv.config.empty()) opts = config::load_estimator_options(inv.config);
  if (inv.window) opts.window = *inv.window;
  if (inv.min_denominator) opts.min_denominator = *inv.min_denominator;
  validate(opts);
  return opts;
}

void run_simulate(const CliInvocation& inv, std::ostream& log) {
  require_file(inv.config, "--config");
  if (inv.output.empty()) usage("--out is required");
  auto config = config::load_scenario_config(inv.config, inv.overrides);
  if (inv.seed) config.rng_seed = *inv.seed;
  log << "simulating " << config.horizon << " steps over " << config.groups() << " groups\n";
  const auto sim = simulate(config);
  const fs::path dir = inv.output;
  io::write_file(dir / "infections.csv", [&](std::ostream& o) { io::write_grouped_csv(o, sim.infections); });
  io::write_file(dir / "symptomatics.csv",
                 [&](std::ostream& o) { io::write_grouped_csv(o, sim.symptomatics); });
  io::write_file(dir / "susceptibles.csv",
                 [&](std::ostream& o) { io::write_grouped_csv(o, sim.susceptibles); });
  log << "wrote infections.csv, symptomatics.csv, susceptibles.csv to " << dir.string() << '\n';
}

void run_thin(const CliInvocation& inv, std::ostream& log) {
  require_file(inv.input, "--input");
  if (inv.rates.empty()) usage("--rates is required");
  if (inv.output.empty()) usage("--output is required");
  const auto infections = io::ingest_grouped_csv(inv.input);
  const auto rates = parse_rates(inv.rates);
  const auto seed = derive_seed(inv.seed.value_or(0), stream::kThinning);
  const auto thinned = thin_symptomatics(infections, rates, seed);
  io::write_file(inv.output, [&](std::ostream& o) { io::write_grouped_csv(o, thinned); });
  log << "wrote " << inv.output << '\n';
}

void run_estimate(const CliInvocation& inv, std::ostream& log) {
  if (inv.method.empty()) usage("--method is required (naive, true or corrected)");
  if (inv.method != "naive" && inv.method != "true" && inv.method != "corrected") {
    usage("--method must be naive, true or corrected");
  }
  if (inv.method == "corrected" && inv.rates.empty()) usage("--rates is required with --method corrected");
  require_file(inv.input, "--input");
  require_file(inv.gi, "--gi");
  if (inv.output.empty()) usage("--output is required");
  const auto series = io::ingest_grouped_csv(inv.input);
  const auto gi = io::load_gi_csv(inv.gi);
  const auto opts = estimator_options(inv, true);
  RtSeries rt;
  if (inv.method == "naive") rt = estimate_rt_naive(series, gi, opts);
  else if (inv.method == "true") rt = estimate_rt_true(series, gi, opts);
  else rt = estimate_rt_corrected(series, parse_rates(inv.rates), gi, opts);
  io::write_file(inv.output, [&](std::ostream& o) { io::write_rt_csv(o, rt); });
  log << "wrote " << inv.method << " Rt estimates to " << inv.output << '\n';
}

void run_mcmc(const CliInvocation& inv, std::ostream& log) {
  require_file(inv.input, "--input");
  require_file(inv.gi, "--gi");
  if (inv.output.empty()) usage("--out is required");
  if (inv.rates.empty() == inv.priors.empty()) usage("exactly one of --rates or --priors is required");
  const auto series = io::ingest_grouped_csv(inv.input);
  const auto gi = io::load_gi_csv(inv.gi);
  McmcConfig mcmc;
  if (!inv.config.empty()) mcmc = config::load_mcmc_config(inv.config);
  if (inv.seed) mcmc.rng_seed = derive_seed(*inv.seed, stream::kMcmc);
  const double cap = inv.prior_cap.value_or(kDefaultPriorCap);
  const auto opts = estimator_options(inv, false);

  LatentPosterior posterior;
  if (!inv.rates.empty()) {
    posterior = sample_latent_known_rates(series, parse_rates(inv.rates), cap, mcmc);
  } else {
    posterior = sample_joint_unknown_rates(series, parse_priors(inv.priors), cap, mcmc);
  }
  log << "acceptance rate " << posterior.acceptance_rate << '\n';
  const auto rt = rt_posterior(posterior, gi, opts);
  const fs::path dir = inv.output;
  io::write_file(dir / "rt_posterior.csv", [&](std::ostream& o) { io::write_rt_csv(o, rt); });
  if (inv.save_draws) {
    io::write_file(dir / "latent_draws.csv",
                   [&](std::ostream& o) { io::write_latent_draws_csv(o, posterior); });
    if (posterior.rate_samples) {
      io::write_file(dir / "rate_draws.csv",
                     [&](std::ostream& o) { io::write_rate_draws_csv(o, posterior); });
    }
  }
  log << "wrote posterior outputs to " << dir.string() << '\n';
}

void run_experiment(const CliInvocation& inv, std::ostream& log) {
  namespace ex = experiments;
  const ex::ScenarioId id{ex::parse_scenario(inv.scenario), inv.overrides};
  const std::uint64_t seed = inv.seed.value_or(1);
  const fs::path dir = inv.output.empty() ? fs::path(".") : fs::path(inv.output);

  ex::ReplicateOptions options;
  options.estimator = estimator_options(inv, false);
  if (!inv.config.empty()) options.mcmc = config::load_mcmc_config(inv.config);
  if (inv.prior_cap) options.prior_cap = *inv.prior_cap;
  options.threads = inv.threads;
  if (inv.bayes == "off") options.bayes = ex::BayesMode::Off;
  else if (inv.bayes == "spot") options.bayes = ex::BayesMode::SpotCheck;
  else if (inv.bayes == "all") options.bayes = ex::BayesMode::All;
  else usage("--bayes must be off, spot or all");

  if (inv.figure1) {
    const auto fig = ex::run_figure1(id, seed, options.estimator);
    ex::write_figure1(fig, dir);
    log << "wrote fig1_*.csv to " << dir.string() << '\n';
  }
  log << "running " << inv.replicates << " replicates of scenario " << ex::scenario_name(id.scenario)
      << '\n';
  const auto report = ex::run_replicates(id, inv.replicates, seed, options);
  ex::write_replicate_report(report, dir);
  log << "MAE naive " << report.mean_mae_naive << ", corrected " << report.mean_mae_corrected;
  if (report.mae_ratio) log << ", ratio " << *report.mae_ratio;
  log << " (" << report.wall_seconds << " s)\n";
}

}  // namespace

std::string exit_code_table() {
  std::ostringstream out;
  out << "Exit codes:\n  0  success\n  1  internal error\n";
  for (const auto code :
       {ErrorCode::InvalidArguments, ErrorCode::ParseError, ErrorCode::ValidationError,
        ErrorCode::IoError, ErrorCode::NegativeMass, ErrorCode::NotNormalized,
        ErrorCode::EmptySupport, ErrorCode::DimensionMismatch, ErrorCode::InvalidConfig,
        ErrorCode::SeedExceedsPopulation, ErrorCode::EmptyOverlap, ErrorCode::InvalidRates,
        ErrorCode::InvalidPrior, ErrorCode::EmptySamples, ErrorCode::NonContiguousTime,
        ErrorCode::NegativeCount}) {
    const auto n = exit_code(code);
    out << "  " << (n < 10 ? " " : "") << n << " " << error_name(code) << '\n';
  }
  return out.str();
}

std::optional<CliInvocation> parse_invocation(const std::vector<std::string>& args,
                                              std::ostream& out) {
  CliInvocation inv;
  CLI::App app{"Rt estimation under covariate-dependent case detection"};
  app.name("rtbias");
  app.footer(exit_code_table());
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::size_t window = 1;
  double min_denominator = 5.0;
  double prior_cap = kDefaultPriorCap;
  std::vector<CLI::Option*> seed_opts, window_opts, min_den_opts, cap_opts;

  auto add_seed = [&](CLI::App* sub, const std::string& help) {
    seed_opts.push_back(sub->add_option("--seed", seed, help));
  };
  auto add_estimator_flags = [&](CLI::App* sub) {
    window_opts.push_back(sub->add_option("--window", window, "smoothing window in days")->check(CLI::PositiveNumber));
    min_den_opts.push_back(sub->add_option("--min-denominator", min_denominator,
                                           "renewal denominator below which Rt is absent"));
  };

  auto* sim = app.add_subcommand("simulate", "run the stochastic SI simulator");
  sim->add_option("--config", inv.config, "scenario JSON")->required();
  sim->add_option("--set", inv.overrides, "key=value override (repeatable)");
  sim->add_option("--out", inv.output, "output directory")->required();
  add_seed(sim, "overrides rng_seed");

  auto* thin = app.add_subcommand("thin", "binomially thin an infection series");
  thin->add_option("--input", inv.input, "grouped infections CSV")->required();
  thin->add_option("--rates", inv.rates, "comma-separated symptomatic rates")->required();
  thin->add_option("--output", inv.output, "output CSV")->required();
  add_seed(thin, "random seed");

  auto* est = app.add_subcommand("estimate", "closed-form Rt estimates");
  est->add_option("--method", inv.method, "naive | true | corrected")->required();
  est->add_option("--input", inv.input, "grouped counts CSV")->required();
  est->add_option("--gi", inv.gi, "generation interval CSV")->required();
  est->add_option("--rates", inv.rates, "comma-separated symptomatic rates (corrected)");
  est->add_option("--config", inv.config, "estimator options JSON");
  est->add_option("--output", inv.output, "output Rt CSV")->required();
  add_estimator_flags(est);

  auto* mcmc = app.add_subcommand("mcmc", "latent-count posterior and Rt posterior");
  mcmc->add_option("--input", inv.input, "grouped symptomatic CSV")->required();
  mcmc->add_option("--gi", inv.gi, "generation interval CSV")->required();
  mcmc->add_option("--rates", inv.rates, "known symptomatic rates");
  mcmc->add_option("--priors", inv.priors, "Beta priors alpha:beta,... for unknown rates");
  mcmc->add_option("--config", inv.config, "MCMC settings JSON");
  cap_opts.push_back(mcmc->add_option("--prior-cap", prior_cap, "latent prior cap multiplier"));
  mcmc->add_option("--out", inv.output, "output directory")->required();
  mcmc->add_flag("--save-draws", inv.save_draws, "also write the posterior draws");
  add_seed(mcmc, "random seed");
  add_estimator_flags(mcmc);

  auto* exp = app.add_subcommand("experiment", "scenario runs and replicate harness");
  exp->add_option("--scenario", inv.scenario, "A (no incubation) or B (incubation)");
  exp->add_option("--replicates", inv.replicates, "number of replicates")->check(CLI::PositiveNumber);
  exp->add_option("--set", inv.overrides, "key=value scenario override (repeatable)");
  exp->add_option("--out", inv.output, "output directory (default: current)");
  exp->add_option("--config", inv.config, "MCMC settings JSON for the Bayesian check");
  exp->add_option("--bayes", inv.bayes, "off | spot | all");
  exp->add_option("--threads", inv.threads, "worker threads (0 = all cores)");
  exp->add_flag("--figure1", inv.figure1, "also write the single-run fig1_*.csv bundle");
  cap_opts.push_back(exp->add_option("--prior-cap", prior_cap, "latent prior cap multiplier"));
  add_seed(exp, "base seed (replicate i uses seed + i)");
  add_estimator_flags(exp);

  std::vector<const char*> argv{"rtbias"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    usage(e.what());
  }

  for (auto* sub : app.get_subcommands()) inv.subcommand = sub->get_name();
  auto given = [](const std::vector<CLI::Option*>& opts) {
    for (auto* o : opts) {
      if (o->count() > 0) return true;
    }
    return false;
  };
  if (given(seed_opts)) inv.seed = seed;
  if (given(window_opts)) inv.window = window;
  if (given(min_den_opts)) inv.min_denominator = min_denominator;
  if (given(cap_opts)) inv.prior_cap = prior_cap;
  return inv;
}

void dispatch(const CliInvocation& inv, std::ostream& log) {
  if (inv.subcommand == "simulate") return run_simulate(inv, log);
  if (inv.subcommand == "thin") return run_thin(inv, log);
  if (inv.subcommand == "estimate") return run_estimate(inv, log);
  if (inv.subcommand == "mcmc") return run_mcmc(inv, log);
  if (inv.subcommand == "experiment") return run_experiment(inv, log);
  usage("unknown subcommand '" + inv.subcommand + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const auto inv = parse_invocation(args, out);
    if (!inv) return 0;
    dispatch(*inv, err);
    return 0;
  } catch (const Error& e) {
    std::string message = e.what();
    for (auto& c : message) {
      if (c == '\n') c = ' ';
    }
    err << "rtbias: " << error_name(e.code()) << ": " << message << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "rtbias: internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace rtbias::cli
