// Sweeps the Y -> O coupling of a scenario and prints, for each value, the
// median lag between the two groups' incidence peaks together with the error
// statistics of the replicate harness. Used to pick the shipped coupling.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rtbias/experiments.hpp"
#include "rtbias/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Coupling calibration sweep"};
  std::string scenario = "A";
  std::vector<double> epsilons = {2e-5, 5e-5, 1e-4, 2e-4};
  std::size_t replicates = 100;
  std::uint64_t seed = 1;
  std::vector<std::string> extra;
  app.add_option("--scenario", scenario, "A or B");
  app.add_option("--epsilon", epsilons, "coupling values to try");
  app.add_option("--replicates", replicates);
  app.add_option("--seed", seed);
  app.add_option("--set", extra, "additional key=value overrides");
  CLI11_PARSE(app, argc, argv);

  namespace ex = rtbias::experiments;
  std::cout << "epsilon,median_lag,mae_ratio,mean_rel_naive,corrected_better,with_window\n";
  for (const double eps : epsilons) {
    ex::ScenarioId id{ex::parse_scenario(scenario), extra};
    id.overrides.push_back("coupling=[[1,0],[" + rtbias::io::format_double(eps) + ",1]]");
    ex::ReplicateOptions opts;
    opts.bayes = ex::BayesMode::Off;
    const auto report = ex::run_replicates(id, replicates, seed, opts);
    std::cout << rtbias::io::format_double(eps) << ','
              << (report.median_peak_lag ? *report.median_peak_lag : -1.0) << ','
              << (report.mae_ratio ? *report.mae_ratio : -1.0) << ','
              << (report.mean_relative_naive ? *report.mean_relative_naive : -1.0) << ','
              << report.corrected_better << ',' << report.replicates_with_window << '\n';
  }
  return 0;
}
