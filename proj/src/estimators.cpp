#include "rtbias/estimators.hpp"

#include <cmath>
#include <string>

#include "rtbias/error.hpp"

namespace rtbias {

void validate(const EstimatorOptions& opts) {
  if (opts.window < 1) throw Error(ErrorCode::ValidationError, "window: must be >= 1");
  if (!(opts.min_denominator > 0.0) || !std::isfinite(opts.min_denominator)) {
    throw Error(ErrorCode::ValidationError, "min_denominator: must be finite and > 0");
  }
}

RtSeries estimate_rt_from_totals(std::span<const double> totals, const GenerationInterval& gi,
                                 const EstimatorOptions& opts, Count origin) {
  validate(opts);
  RtSeries out;
  out.t0 = origin + 1;
  out.burn_in_end = origin + static_cast<Count>(gi.max_lag());
  const std::size_t T = totals.size();
  if (T < 2) return out;

  std::vector<double> lambda(T, 0.0);
  for (std::size_t t = 1; t < T; ++t) lambda[t] = renewal_denominator(totals, gi, t);

  out.estimates.resize(T - 1);
  for (std::size_t t = 1; t < T; ++t) {
    const std::size_t first = t >= opts.window ? std::max<std::size_t>(1, t - opts.window + 1) : 1;
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t s = first; s <= t; ++s) {
      numerator += totals[s];
      denominator += lambda[s];
    }
    if (denominator >= opts.min_denominator) out.estimates[t - 1] = numerator / denominator;
  }
  return out;
}

RtSeries estimate_rt_naive(const GroupedSeries& symptomatics, const GenerationInterval& gi,
                           const EstimatorOptions& opts) {
  return estimate_rt_from_totals(plain_totals(symptomatics), gi, opts, symptomatics.origin());
}

RtSeries estimate_rt_true(const GroupedSeries& infections, const GenerationInterval& gi,
                          const EstimatorOptions& opts) {
  return estimate_rt_from_totals(plain_totals(infections), gi, opts, infections.origin());
}

RtSeries estimate_rt_corrected(const GroupedSeries& symptomatics, const SymptomaticRates& rates,
                               const GenerationInterval& gi, const EstimatorOptions& opts) {
  if (rates.size() != symptomatics.groups()) {
    throw Error(ErrorCode::DimensionMismatch, "got " + std::to_string(rates.size()) +
                                                  " rates for " +
                                                  std::to_string(symptomatics.groups()) +
                                                  " groups");
  }
  const auto weights = rates.inverse();
  return estimate_rt_from_totals(weighted_totals(symptomatics, weights), gi, opts,
                                 symptomatics.origin());
}

RtErrorSummary rt_error_summary(const RtSeries& estimate, const RtSeries& truth, Count t_start,
                                Count t_end) {
  RtErrorSummary out;
  out.t_start = t_start;
  out.t_end = t_end;
  double relative_sum = 0.0;
  std::size_t relative_n = 0;
  for (Count t = t_start; t <= t_end; ++t) {
    const auto e = estimate.at(t);
    const auto r = truth.at(t);
    if (!e || !r) {
      ++out.skipped;
      continue;
    }
    const double d = *e - *r;
    out.differences.push_back({t, *e, *r, d});
    out.mean_difference += d;
    out.mean_absolute += std::abs(d);
    out.max_absolute = std::max(out.max_absolute, std::abs(d));
    if (*r > 0.0) {
      relative_sum += *e / *r - 1.0;
      ++relative_n;
    }
  }
  if (out.differences.empty()) {
    throw Error(ErrorCode::EmptyOverlap, "no time in [" + std::to_string(t_start) + ", " +
                                             std::to_string(t_end) +
                                             "] is defined in both series");
  }
  const auto n = static_cast<double>(out.differences.size());
  out.mean_difference /= n;
  out.mean_absolute /= n;
  if (relative_n > 0) out.mean_relative = relative_sum / static_cast<double>(relative_n);
  return out;
}

}  // namespace rtbias
