#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rtbias/core.hpp"

namespace rtbias {

struct EstimatorOptions {
  /// Number of trailing days (including t) pooled into each estimate.
  std::size_t window = 1;
  /// Windowed renewal denominator below which the estimate is reported absent.
  /// Expressed in the units of the series being estimated.
  double min_denominator = 5.0;

  bool operator==(const EstimatorOptions&) const = default;
};

void validate(const EstimatorOptions& opts);

/// Poisson maximum-likelihood Rt over a trailing window for a per-time total
/// series X (row-indexed, origin given separately):
///   R_t = sum_{s in window(t)} X_s / sum_{s in window(t)} Lambda_s.
/// Estimates cover rows 1..T-1.
RtSeries estimate_rt_from_totals(std::span<const double> totals, const GenerationInterval& gi,
                                 const EstimatorOptions& opts, Count origin = 0);

/// Rt from symptomatic cases summed over groups.
RtSeries estimate_rt_naive(const GroupedSeries& symptomatics, const GenerationInterval& gi,
                           const EstimatorOptions& opts = {});

/// Rt from all infections summed over groups; the reference curve.
RtSeries estimate_rt_true(const GroupedSeries& infections, const GenerationInterval& gi,
                          const EstimatorOptions& opts = {});

/// Rt from symptomatic cases reweighted by 1/pi_l, i.e. with each group's
/// counts replaced by their maximum-likelihood infection count S/pi.
RtSeries estimate_rt_corrected(const GroupedSeries& symptomatics, const SymptomaticRates& rates,
                               const GenerationInterval& gi, const EstimatorOptions& opts = {});

struct RtDifference {
  Count t = 0;
  double estimate = 0.0;
  double truth = 0.0;
  double difference = 0.0;  ///< estimate - truth
};

struct RtErrorSummary {
  Count t_start = 0;
  Count t_end = 0;  ///< inclusive
  std::vector<RtDifference> differences;
  double mean_difference = 0.0;
  double mean_absolute = 0.0;
  double max_absolute = 0.0;
  /// Mean of estimate / truth - 1 over times with a positive truth.
  std::optional<double> mean_relative;
  /// Times in [t_start, t_end] where either series had no estimate.
  std::size_t skipped = 0;
};

/// Compares two Rt series over the inclusive range [t_start, t_end]; throws
/// EmptyOverlap when no time in the range is defined in both.
RtErrorSummary rt_error_summary(const RtSeries& estimate, const RtSeries& truth, Count t_start,
                                Count t_end);

}  // namespace rtbias
