#include "rtbias/core.hpp"

#include <cmath>
#include <algorithm>
#include <numeric>
#include <set>

#include "rtbias/error.hpp"

namespace rtbias {

GenerationInterval validate_generation_interval(std::span<const double> probs) {
  if (probs.empty()) {
    throw Error(ErrorCode::EmptySupport, "generation interval has no entries");
  }
  double sum = 0.0;
  bool any_positive = false;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!std::isfinite(p) || p < 0.0) {
      throw Error(ErrorCode::NegativeMass,
                  "generation interval p(" + std::to_string(i + 1) + ") is negative or non-finite");
    }
    any_positive = any_positive || p > 0.0;
    sum += p;
  }
  if (!any_positive) {
    throw Error(ErrorCode::EmptySupport, "generation interval has no positive mass");
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::NotNormalized,
                "generation interval sums to " + std::to_string(sum) + ", expected 1");
  }
  std::vector<double> out(probs.begin(), probs.end());
  // Leave already-normalized input bit-identical so validation is idempotent.
  if (std::abs(sum - 1.0) > 1e-12) {
    for (double& p : out) p /= sum;
  }
  return GenerationInterval(std::move(out));
}

GroupedSeries::GroupedSeries(std::size_t rows, std::vector<std::string> labels,
                             std::vector<Count> counts, Count origin)
    : rows_(rows), labels_(std::move(labels)), counts_(std::move(counts)), origin_(origin) {
  if (labels_.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "grouped series needs at least one group");
  }
  if (counts_.size() != rows_ * labels_.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "grouped series has " + std::to_string(counts_.size()) + " cells, expected " +
                    std::to_string(rows_ * labels_.size()));
  }
  std::set<std::string> seen;
  for (const auto& label : labels_) {
    if (label.empty() || !seen.insert(label).second) {
      throw Error(ErrorCode::ValidationError, "group labels must be unique and non-empty");
    }
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] < 0) {
      throw Error(ErrorCode::NegativeCount, "negative count at time index " +
                                                std::to_string(i / labels_.size()) + ", group " +
                                                labels_[i % labels_.size()]);
    }
  }
}

GroupedSeries GroupedSeries::from_rows(const std::vector<std::vector<Count>>& rows,
                                       std::vector<std::string> labels, Count origin) {
  std::vector<Count> flat;
  flat.reserve(rows.size() * labels.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (rows[t].size() != labels.size()) {
      throw Error(ErrorCode::DimensionMismatch, "row " + std::to_string(t) + " has " +
                                                    std::to_string(rows[t].size()) +
                                                    " entries, expected " +
                                                    std::to_string(labels.size()));
    }
    flat.insert(flat.end(), rows[t].begin(), rows[t].end());
  }
  return GroupedSeries(rows.size(), std::move(labels), std::move(flat), origin);
}

GroupedSeries GroupedSeries::with_counts(const GroupedSeries& like, std::vector<Count> counts) {
  return GroupedSeries(like.rows_, like.labels_, std::move(counts), like.origin_);
}

std::vector<Count> GroupedSeries::totals() const {
  std::vector<Count> out(rows_, 0);
  for (std::size_t t = 0; t < rows_; ++t) {
    const auto r = row(t);
    out[t] = std::accumulate(r.begin(), r.end(), Count{0});
  }
  return out;
}

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back("g" + std::to_string(i));
  return out;
}

SymptomaticRates::SymptomaticRates(std::vector<double> rates) : rates_(std::move(rates)) {
  if (rates_.empty()) {
    throw Error(ErrorCode::InvalidRates, "at least one symptomatic rate is required");
  }
  for (std::size_t l = 0; l < rates_.size(); ++l) {
    const double r = rates_[l];
    if (!(r > 0.0 && r <= 1.0)) {
      throw Error(ErrorCode::InvalidRates, "rates[" + std::to_string(l) +
                                               "] = " + std::to_string(r) +
                                               " must lie in (0, 1]");
    }
  }
}

std::vector<double> SymptomaticRates::inverse() const {
  std::vector<double> out(rates_.size());
  for (std::size_t l = 0; l < rates_.size(); ++l) out[l] = 1.0 / rates_[l];
  return out;
}

std::optional<double> RtSeries::at(Count t) const {
  if (t < t0 || t >= t_end()) return std::nullopt;
  return estimates[static_cast<std::size_t>(t - t0)];
}

double renewal_denominator(std::span<const double> totals, const GenerationInterval& gi,
                           std::size_t t) {
  double sum = 0.0;
  const std::size_t max_tau = std::min(gi.max_lag(), t);
  for (std::size_t tau = 1; tau <= max_tau; ++tau) {
    const std::size_t s = t - tau;
    if (s < totals.size()) sum += gi.at(tau) * totals[s];
  }
  return sum;
}

std::vector<double> weighted_totals(const GroupedSeries& series, std::span<const double> weights) {
  if (weights.size() != series.groups()) {
    throw Error(ErrorCode::DimensionMismatch,
                "got " + std::to_string(weights.size()) + " weights for " +
                    std::to_string(series.groups()) + " groups");
  }
  std::vector<double> out(series.times(), 0.0);
  for (std::size_t t = 0; t < series.times(); ++t) {
    double sum = 0.0;
    for (std::size_t l = 0; l < series.groups(); ++l) {
      sum += weights[l] * static_cast<double>(series.at(t, l));
    }
    out[t] = sum;
  }
  return out;
}

std::vector<double> plain_totals(const GroupedSeries& series) {
  const auto totals = series.totals();
  return {totals.begin(), totals.end()};
}

}  // namespace rtbias
