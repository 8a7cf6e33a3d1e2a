#include "rtbias/simulator.hpp"

#include <cmath>
#include <random>

#include "rtbias/error.hpp"
#include "rtbias/rng.hpp"

namespace rtbias {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

}  // namespace

std::vector<std::string> ScenarioConfig::labels() const {
  return group_labels.empty() ? default_labels(group_sizes.size()) : group_labels;
}

void validate(const ScenarioConfig& config) {
  const std::size_t L = config.groups();
  if (L == 0) invalid("group_sizes: at least one group is required");
  for (std::size_t l = 0; l < L; ++l) {
    if (config.group_sizes[l] <= 0) {
      invalid("group_sizes[" + std::to_string(l) + "]: must be > 0");
    }
  }
  if (!config.group_labels.empty() && config.group_labels.size() != L) {
    invalid("group_labels: expected " + std::to_string(L) + " labels");
  }
  // r0 = 0 is accepted: it is the no-transmission limit.
  if (!std::isfinite(config.r0) || config.r0 < 0.0) invalid("r0: must be finite and >= 0");
  if (config.horizon < 1) invalid("horizon: must be >= 1");
  if (config.coupling.size() != L) {
    invalid("coupling: expected a " + std::to_string(L) + "x" + std::to_string(L) + " matrix");
  }
  for (std::size_t l = 0; l < L; ++l) {
    if (config.coupling[l].size() != L) {
      invalid("coupling[" + std::to_string(l) + "]: expected " + std::to_string(L) + " entries");
    }
    for (std::size_t m = 0; m < L; ++m) {
      const double c = config.coupling[l][m];
      if (!std::isfinite(c) || c < 0.0) {
        invalid("coupling[" + std::to_string(l) + "][" + std::to_string(m) + "]: must be >= 0");
      }
    }
    if (config.coupling[l][l] != 1.0) {
      invalid("coupling[" + std::to_string(l) + "][" + std::to_string(l) + "]: diagonal must be 1");
    }
  }
  if (config.rates.size() != L) {
    invalid("rates: expected " + std::to_string(L) + " entries");
  }
  std::vector<Count> seeded(L, 0);
  for (std::size_t i = 0; i < config.seed_infections.size(); ++i) {
    const auto& seed = config.seed_infections[i];
    const std::string where = "seed_infections[" + std::to_string(i) + "]";
    if (seed.time >= config.horizon) invalid(where + ".time: must be < horizon");
    if (seed.group >= L) invalid(where + ".group: no such group");
    if (seed.count < 0) invalid(where + ".count: must be >= 0");
    seeded[seed.group] += seed.count;
    if (seeded[seed.group] > config.group_sizes[seed.group]) {
      throw Error(ErrorCode::SeedExceedsPopulation,
                  where + ".count: seeds exceed the size of group " + std::to_string(seed.group));
    }
  }
}

SimulationOutput simulate(const ScenarioConfig& config) {
  validate(config);
  const std::size_t L = config.groups();
  const std::size_t T = config.horizon;

  std::vector<Count> infections(T * L, 0);
  std::vector<Count> susceptibles(T * L, 0);
  std::vector<Count> remaining(config.group_sizes);

  std::vector<std::vector<Count>> seeds_at(T, std::vector<Count>(L, 0));
  for (const auto& seed : config.seed_infections) seeds_at[seed.time][seed.group] += seed.count;

  Rng rng(derive_seed(config.rng_seed, stream::kTransmission));
  std::vector<double> pressure(L);  // sum_tau p(tau) I_{t-tau}(m)

  for (std::size_t t = 0; t < T; ++t) {
    if (t >= 1) {
      std::fill(pressure.begin(), pressure.end(), 0.0);
      const std::size_t max_tau = std::min(config.gi.max_lag(), t);
      for (std::size_t tau = 1; tau <= max_tau; ++tau) {
        const double p = config.gi.at(tau);
        if (p == 0.0) continue;
        for (std::size_t m = 0; m < L; ++m) {
          pressure[m] += p * static_cast<double>(infections[(t - tau) * L + m]);
        }
      }
      for (std::size_t l = 0; l < L; ++l) {
        double contact = 0.0;
        for (std::size_t m = 0; m < L; ++m) contact += config.coupling[l][m] * pressure[m];
        const double force = config.r0 / static_cast<double>(config.group_sizes[l]) * contact;
        const double p_inf = -std::expm1(-force);
        Count drawn = 0;
        if (remaining[l] > 0 && p_inf > 0.0) {
          std::binomial_distribution<Count> draw(remaining[l], std::min(p_inf, 1.0));
          drawn = draw(rng);
        }
        infections[t * L + l] = drawn;
        remaining[l] -= drawn;
      }
    }
    for (std::size_t l = 0; l < L; ++l) {
      const Count s = seeds_at[t][l];
      if (s > remaining[l]) {
        throw Error(ErrorCode::SeedExceedsPopulation,
                    "seed of " + std::to_string(s) + " at time " + std::to_string(t) +
                        " exceeds the " + std::to_string(remaining[l]) +
                        " susceptibles left in group " + std::to_string(l));
      }
      infections[t * L + l] += s;
      remaining[l] -= s;
      susceptibles[t * L + l] = remaining[l];
    }
  }

  const auto labels = config.labels();
  GroupedSeries infection_series(T, labels, std::move(infections));
  GroupedSeries symptomatics =
      thin_symptomatics(infection_series, config.rates, derive_seed(config.rng_seed, stream::kThinning));
  return SimulationOutput{std::move(infection_series), std::move(symptomatics),
                          GroupedSeries(T, labels, std::move(susceptibles))};
}

GroupedSeries thin_symptomatics(const GroupedSeries& infections, const SymptomaticRates& rates,
                                std::uint64_t rng_seed) {
  if (rates.size() != infections.groups()) {
    throw Error(ErrorCode::DimensionMismatch, "got " + std::to_string(rates.size()) +
                                                  " rates for " +
                                                  std::to_string(infections.groups()) + " groups");
  }
  Rng rng(rng_seed);
  std::vector<Count> out(infections.data().size(), 0);
  const std::size_t L = infections.groups();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Count n = infections.data()[i];
    const double pi = rates[i % L];
    if (n == 0) continue;
    if (pi >= 1.0) {
      out[i] = n;
      continue;
    }
    std::binomial_distribution<Count> draw(n, pi);
    out[i] = draw(rng);
  }
  return GroupedSeries::with_counts(infections, std::move(out));
}

std::vector<std::optional<double>> symptomatic_fraction(const GroupedSeries& infections,
                                                        const GroupedSeries& symptomatics) {
  if (infections.times() != symptomatics.times() || infections.groups() != symptomatics.groups()) {
    throw Error(ErrorCode::DimensionMismatch, "infections and symptomatics differ in shape");
  }
  const auto infected = infections.totals();
  const auto detected = symptomatics.totals();
  std::vector<std::optional<double>> out(infected.size());
  for (std::size_t t = 0; t < infected.size(); ++t) {
    if (infected[t] > 0) {
      out[t] = static_cast<double>(detected[t]) / static_cast<double>(infected[t]);
    }
  }
  return out;
}

}  // namespace rtbias
