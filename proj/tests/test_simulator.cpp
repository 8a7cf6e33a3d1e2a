#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "rtbias/error.hpp"
#include "rtbias/estimators.hpp"
#include "rtbias/experiments.hpp"
#include "rtbias/rng.hpp"
#include "rtbias/simulator.hpp"

using namespace rtbias;

namespace {

ScenarioConfig single_group(Count n, double r0, Count seed, std::size_t horizon) {
  ScenarioConfig c;
  c.group_sizes = {n};
  c.r0 = r0;
  c.coupling = {{1.0}};
  c.seed_infections = {{0, 0, seed}};
  c.horizon = horizon;
  c.rates = SymptomaticRates({0.5});
  c.rng_seed = 42;
  return c;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an rtbias::Error");
  return ErrorCode::InvalidArguments;
}

}  // namespace

TEST_CASE("zero reproduction number leaves only the seeds") {
  auto c = single_group(1000, 0.0, 7, 10);
  c.seed_infections.push_back({4, 0, 3});
  const auto out = simulate(c);
  for (std::size_t t = 0; t < c.horizon; ++t) {
    const Count expected = t == 0 ? 7 : (t == 4 ? 3 : 0);
    CHECK(out.infections.at(t, 0) == expected);
  }
}

TEST_CASE("simulation is a pure function of the config") {
  const auto c = experiments::make_scenario({experiments::Scenario::A, {}}, 123);
  const auto a = simulate(c);
  const auto b = simulate(c);
  CHECK(a.infections == b.infections);
  CHECK(a.symptomatics == b.symptomatics);
  CHECK(a.susceptibles == b.susceptibles);
  const auto other = simulate(experiments::make_scenario({experiments::Scenario::A, {}}, 124));
  CHECK_FALSE(other.infections == a.infections);
}

TEST_CASE("population is conserved and symptomatics are bounded") {
  for (auto s : {experiments::Scenario::A, experiments::Scenario::B}) {
    const auto c = experiments::make_scenario({s, {}}, 9);
    const auto out = simulate(c);
    for (std::size_t l = 0; l < c.groups(); ++l) {
      Count cumulative = 0;
      for (std::size_t t = 0; t < c.horizon; ++t) {
        cumulative += out.infections.at(t, l);
        CHECK(out.susceptibles.at(t, l) + cumulative == c.group_sizes[l]);
        CHECK(out.symptomatics.at(t, l) >= 0);
        CHECK(out.symptomatics.at(t, l) <= out.infections.at(t, l));
      }
    }
  }
}

TEST_CASE("uncoupled groups stay isolated") {
  auto c = experiments::make_scenario({experiments::Scenario::A, {"coupling=[[1,0],[0,1]]"}}, 5);
  const auto out = simulate(c);
  for (std::size_t t = 0; t < c.horizon; ++t) CHECK(out.infections.at(t, 1) == 0);
}

TEST_CASE("single-group growth matches r0 early on") {
  const auto c = single_group(1'000'000, 1.2, 100, 21);
  const auto out = simulate(c);
  EstimatorOptions opts;
  opts.window = 20;
  const auto rt = estimate_rt_true(out.infections, c.gi, opts);
  REQUIRE(rt.at(20).has_value());
  CHECK(*rt.at(20) == doctest::Approx(1.2).epsilon(0.05 / 1.2));
}

TEST_CASE("thinning examples") {
  const auto i = GroupedSeries::from_rows({{10000}, {0}, {37}}, default_labels(1));
  const auto all = thin_symptomatics(i, SymptomaticRates({1.0}), 1);
  CHECK(all == i);

  const auto s = thin_symptomatics(i, SymptomaticRates({0.3}), 1);
  CHECK(s.at(1, 0) == 0);
  CHECK(std::abs(s.at(0, 0) - 3000) <= 150);

  CHECK(code_of([&] { thin_symptomatics(i, SymptomaticRates({0.3, 0.5}), 1); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("thinning fraction averages to the rate") {
  const auto i = GroupedSeries::from_rows({{50, 80}}, default_labels(2));
  const SymptomaticRates rates({0.3, 0.8});
  double f0 = 0.0, f1 = 0.0;
  const int repeats = 1000;
  for (int r = 0; r < repeats; ++r) {
    const auto s = thin_symptomatics(i, rates, derive_seed(77, r));
    f0 += static_cast<double>(s.at(0, 0)) / 50.0;
    f1 += static_cast<double>(s.at(0, 1)) / 80.0;
  }
  CHECK(std::abs(f0 / repeats - 0.3) < 0.02);
  CHECK(std::abs(f1 / repeats - 0.8) < 0.02);
}

TEST_CASE("symptomatic fraction") {
  const auto i = GroupedSeries::from_rows({{100, 0}, {0, 0}, {50, 50}}, default_labels(2));
  const auto s = GroupedSeries::from_rows({{30, 0}, {0, 0}, {15, 40}}, default_labels(2));
  const auto f = symptomatic_fraction(i, s);
  CHECK(*f[0] == doctest::Approx(0.3));
  CHECK_FALSE(f[1].has_value());
  CHECK(*f[2] == doctest::Approx(0.55));
}

TEST_CASE("scenario A produces two waves about twenty days apart") {
  std::vector<double> lags;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto out = simulate(experiments::make_scenario({experiments::Scenario::A, {}}, seed));
    const auto peaks = experiments::incidence_peaks(out.infections);
    lags.push_back(static_cast<double>(peaks[1] - peaks[0]));
  }
  std::sort(lags.begin(), lags.end());
  const double median = 0.5 * (lags[49] + lags[50]);
  CHECK(median >= 16.0);
  CHECK(median <= 24.0);
}

TEST_CASE("scenario A symptomatic fraction moves between the two plateaus") {
  const auto c = experiments::make_scenario({experiments::Scenario::A, {}}, 1);
  const auto out = simulate(c);
  const auto f = symptomatic_fraction(out.infections, out.symptomatics);
  const auto window = experiments::detect_transition_window(out.infections, out.symptomatics);
  REQUIRE(window.has_value());
  const auto totals = out.infections.totals();
  for (std::size_t t = 0; t < f.size(); ++t) {
    if (totals[t] < 1000) continue;
    if (static_cast<Count>(t) < window->start) CHECK(*f[t] == doctest::Approx(0.3).epsilon(0.2));
    if (static_cast<Count>(t) > window->end) CHECK(*f[t] == doctest::Approx(0.8).epsilon(0.07));
  }
}

TEST_CASE("config validation") {
  auto base = single_group(100, 1.4, 5, 10);
  base.gi = validate_generation_interval(std::vector<double>{1.0});
  validate(base);

  auto too_many = base;
  too_many.seed_infections = {{0, 0, 101}};
  CHECK(code_of([&] { validate(too_many); }) == ErrorCode::SeedExceedsPopulation);

  auto negative = base;
  negative.r0 = -1.0;
  CHECK(code_of([&] { validate(negative); }) == ErrorCode::InvalidConfig);

  auto bad_coupling = base;
  bad_coupling.coupling = {{0.5}};
  CHECK(code_of([&] { validate(bad_coupling); }) == ErrorCode::InvalidConfig);

  auto late_seed = base;
  late_seed.seed_infections = {{10, 0, 1}};
  CHECK(code_of([&] { validate(late_seed); }) == ErrorCode::InvalidConfig);

  auto wrong_rates = base;
  wrong_rates.rates = SymptomaticRates({0.5, 0.5});
  CHECK(code_of([&] { validate(wrong_rates); }) == ErrorCode::InvalidConfig);
}
