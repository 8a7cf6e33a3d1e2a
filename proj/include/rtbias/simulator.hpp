#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rtbias/core.hpp"

namespace rtbias {

struct SeedInfection {
  std::size_t time = 0;
  std::size_t group = 0;
  Count count = 0;

  bool operator==(const SeedInfection&) const = default;
};

/// Full description of one stochastic multi-group SI run.
struct ScenarioConfig {
  std::vector<Count> group_sizes;
  std::vector<std::string> group_labels;  ///< empty -> default_labels()
  double r0 = 1.0;
  GenerationInterval gi = validate_generation_interval(std::vector<double>{1.0});
  /// coupling[l][m]: relative contact of infectee group l with infector group m.
  std::vector<std::vector<double>> coupling;
  std::vector<SeedInfection> seed_infections;
  std::size_t horizon = 1;
  SymptomaticRates rates{std::vector<double>{1.0}};
  std::uint64_t rng_seed = 0;

  std::size_t groups() const noexcept { return group_sizes.size(); }
  std::vector<std::string> labels() const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Throws InvalidConfig (or SeedExceedsPopulation) on the first violated
/// invariant.
void validate(const ScenarioConfig& config);

struct SimulationOutput {
  GroupedSeries infections;
  GroupedSeries symptomatics;
  /// Susceptibles remaining at the end of each step.
  GroupedSeries susceptibles;
};

/// Discrete-time SI epidemic. For t >= 1 the per-capita force of infection in
/// group l is
///   lambda_t(l) = r0 / N_l * sum_tau p(tau) sum_m C[l][m] I_{t-tau}(m)
/// and new infections are Binomial(susceptibles, 1 - exp(-lambda)). Seeds are
/// added on top of the transmission draw at their (time, group). The outcome
/// is a pure function of the config, including rng_seed.
SimulationOutput simulate(const ScenarioConfig& config);

/// S_t(l) ~ Binomial(I_t(l), pi_l), drawn cell by cell in row-major order.
GroupedSeries thin_symptomatics(const GroupedSeries& infections, const SymptomaticRates& rates,
                                std::uint64_t rng_seed);

/// sum_l S_t(l) / sum_l I_t(l); nullopt on days without infections.
std::vector<std::optional<double>> symptomatic_fraction(const GroupedSeries& infections,
                                                        const GroupedSeries& symptomatics);

}  // namespace rtbias
