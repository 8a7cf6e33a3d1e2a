#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rtbias/error.hpp"
#include "rtbias/estimators.hpp"

using namespace rtbias;

namespace {

GenerationInterval gi_of(std::vector<double> p) { return validate_generation_interval(p); }

GroupedSeries one_group(std::vector<Count> x) {
  std::vector<std::vector<Count>> rows;
  for (auto v : x) rows.push_back({v});
  return GroupedSeries::from_rows(rows, default_labels(1));
}

GroupedSeries random_series(std::mt19937_64& rng, std::size_t times, std::size_t groups,
                            Count hi) {
  std::uniform_int_distribution<Count> count(0, hi);
  std::vector<Count> cells(times * groups);
  for (auto& c : cells) c = count(rng);
  return GroupedSeries(times, default_labels(groups), std::move(cells));
}

GenerationInterval random_gi(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(1, 5);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> p(len(rng));
  double total = 0.0;
  for (double& v : p) total += (v = u(rng));
  for (double& v : p) v /= total;
  return validate_generation_interval(p);
}

}  // namespace

TEST_CASE("naive estimator examples") {
  const auto gi1 = gi_of({1.0});
  const auto a = estimate_rt_naive(one_group({100, 120}), gi1);
  REQUIRE(a.at(1).has_value());
  CHECK(*a.at(1) == doctest::Approx(1.2).epsilon(1e-12));

  const auto gi34 = gi_of({0.0, 0.0, 0.5, 0.5});
  const std::vector<Count> x{100, 0, 0, 60, 50};
  const auto b = estimate_rt_naive(one_group(x), gi34);
  CHECK_FALSE(b.at(1).has_value());
  CHECK_FALSE(b.at(2).has_value());
  REQUIRE(b.at(3).has_value());
  CHECK(*b.at(3) == doctest::Approx(1.2).epsilon(1e-12));
  // R_4 = 50 / (p(3) X_1 + p(4) X_0) = 50 / 50.
  REQUIRE(b.at(4).has_value());
  const std::vector<double> xd(x.begin(), x.end());
  CHECK(*b.at(4) == doctest::Approx(oracle::renewal_ratio(xd, {0.0, 0.0, 0.5, 0.5}, 4)));
  CHECK(*b.at(4) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.burn_in_end == 4);
  CHECK(b.is_burn_in(3));
  CHECK_FALSE(b.is_burn_in(4));
}

TEST_CASE("naive equals true under a constant rate") {
  const auto i = GroupedSeries::from_rows({{100, 200}, {150, 250}, {300, 100}, {220, 180}},
                                          default_labels(2));
  std::vector<Count> half;
  for (auto v : i.data()) half.push_back(v / 2);
  const auto s = GroupedSeries::with_counts(i, half);
  const auto gi = gi_of({0.6, 0.4});
  const auto naive = estimate_rt_naive(s, gi);
  const auto truth = estimate_rt_true(i, gi);
  for (Count t = naive.t0; t < naive.t_end(); ++t) {
    REQUIRE(naive.at(t).has_value());
    CHECK(*naive.at(t) == doctest::Approx(*truth.at(t)).epsilon(1e-12));
  }
}

TEST_CASE("true estimator examples") {
  const auto gi1 = gi_of({1.0});
  const auto a = estimate_rt_true(one_group({100, 140}), gi1);
  CHECK(*a.at(1) == doctest::Approx(1.4).epsilon(1e-12));

  std::vector<double> geometric;
  for (int t = 0; t < 15; ++t) geometric.push_back(100.0 * std::pow(1.4, t));
  const auto g = estimate_rt_from_totals(geometric, gi1, {});
  for (Count t = 1; t < 15; ++t) CHECK(*g.at(t) == doctest::Approx(1.4).epsilon(1e-12));

  const auto zero = estimate_rt_true(one_group({0, 0, 0}), gi1);
  CHECK_FALSE(zero.at(1).has_value());
  CHECK_FALSE(zero.at(2).has_value());
}

TEST_CASE("corrected estimator examples") {
  const auto gi1 = gi_of({1.0});
  const SymptomaticRates rates({0.3, 0.8});
  const auto s = GroupedSeries::from_rows({{30, 80}, {15, 160}}, default_labels(2));
  const auto corrected = estimate_rt_corrected(s, rates, gi1);
  const auto naive = estimate_rt_naive(s, gi1);
  CHECK(*corrected.at(1) == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(*naive.at(1) == doctest::Approx(175.0 / 110.0).epsilon(1e-12));

  const auto equal = estimate_rt_corrected(s, SymptomaticRates({0.4, 0.4}), gi1);
  CHECK(*equal.at(1) == doctest::Approx(*naive.at(1)).epsilon(1e-12));
}

TEST_CASE("corrected estimate recovers the true one when S is exactly pi * I") {
  const auto d = oracle::constant_r_data(7, 10, 0.3, 0.8);
  const auto i = GroupedSeries::from_rows(d.infections, default_labels(2));
  const auto s = GroupedSeries::from_rows(d.symptomatics, default_labels(2));
  const auto gi = gi_of({1.0});
  const auto corrected = estimate_rt_corrected(s, SymptomaticRates({0.3, 0.8}), gi);
  const auto truth = estimate_rt_true(i, gi);
  const auto naive = estimate_rt_naive(s, gi);
  for (Count t = 1; t < truth.t_end(); ++t) {
    CHECK(std::abs(*corrected.at(t) - 1.4) < 1e-9);
    CHECK(std::abs(*truth.at(t) - 1.4) < 1e-9);
  }
  CHECK(std::abs(*naive.at(5) - 1.4) > 0.01);
}

TEST_CASE("error summary") {
  RtSeries truth{1, {1.0, 1.5, 2.0, std::nullopt}, std::nullopt, 2};
  const auto same = rt_error_summary(truth, truth, 1, 4);
  CHECK(same.mean_difference == 0.0);
  CHECK(same.mean_absolute == 0.0);
  CHECK(same.skipped == 1);
  CHECK(same.differences.size() == 3);

  RtSeries shifted = truth;
  for (auto& e : shifted.estimates)
    if (e) *e += 0.1;
  const auto up = rt_error_summary(shifted, truth, 1, 3);
  CHECK(up.mean_difference == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(up.mean_absolute == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(up.max_absolute == doctest::Approx(0.1).epsilon(1e-12));

  bool threw = false;
  try {
    rt_error_summary(truth, truth, 10, 20);
  } catch (const Error& e) {
    threw = e.code() == ErrorCode::EmptyOverlap;
  }
  CHECK(threw);
}

TEST_CASE("property: estimates are invariant to scaling all counts") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const auto gi = random_gi(rng);
    const auto s = random_series(rng, 15, 2, 500);
    std::vector<Count> scaled;
    for (auto v : s.data()) scaled.push_back(4 * v);
    const auto s4 = GroupedSeries::with_counts(s, scaled);
    EstimatorOptions opts;
    opts.min_denominator = 1e-9;
    const auto a = estimate_rt_naive(s, gi, opts);
    const auto b = estimate_rt_naive(s4, gi, opts);
    for (Count t = a.t0; t < a.t_end(); ++t) {
      REQUIRE(a.at(t).has_value() == b.at(t).has_value());
      if (a.at(t)) CHECK(*a.at(t) == doctest::Approx(*b.at(t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: equal rates make corrected and naive agree") {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto gi = random_gi(rng);
    const auto s = random_series(rng, 15, 3, 300);
    const double pi = u(rng);
    const auto naive = estimate_rt_naive(s, gi);
    const auto corrected = estimate_rt_corrected(s, SymptomaticRates({pi, pi, pi}), gi);
    for (Count t = naive.t0; t < naive.t_end(); ++t) {
      if (naive.at(t) && corrected.at(t)) {
        CHECK(*naive.at(t) == doctest::Approx(*corrected.at(t)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("property: estimates match the direct renewal formula") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 100; ++trial) {
    const auto gi = random_gi(rng);
    const auto s = random_series(rng, 12, 2, 400);
    const std::vector<double> p(gi.probs().begin(), gi.probs().end());
    const auto totals = plain_totals(s);
    EstimatorOptions opts;
    opts.min_denominator = 1e-9;
    const auto est = estimate_rt_naive(s, gi, opts);
    for (Count t = 1; t < est.t_end(); ++t) {
      const double expected = oracle::renewal_ratio(totals, p, static_cast<int>(t));
      if (expected < 0.0) {
        CHECK_FALSE(est.at(t).has_value());
      } else {
        REQUIRE(est.at(t).has_value());
        CHECK(*est.at(t) == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("property: widening the window never shrinks the defined set") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    const auto gi = random_gi(rng);
    const auto s = random_series(rng, 20, 2, 6);
    std::vector<bool> previous;
    for (std::size_t w = 1; w <= 6; ++w) {
      EstimatorOptions opts;
      opts.window = w;
      const auto est = estimate_rt_naive(s, gi, opts);
      std::vector<bool> defined;
      for (const auto& e : est.estimates) defined.push_back(e.has_value());
      if (!previous.empty()) {
        for (std::size_t i = 0; i < defined.size(); ++i) {
          if (previous[i]) CHECK(defined[i]);
        }
      }
      previous = defined;
    }
  }
}

TEST_CASE("windowed estimate pools numerator and denominator") {
  const auto gi1 = gi_of({1.0});
  EstimatorOptions opts;
  opts.window = 2;
  const auto est = estimate_rt_naive(one_group({10, 20, 60}), gi1, opts);
  // (20 + 60) / (10 + 20)
  CHECK(*est.at(2) == doctest::Approx(80.0 / 30.0).epsilon(1e-12));
  CHECK(*est.at(1) == doctest::Approx(2.0).epsilon(1e-12));
}
