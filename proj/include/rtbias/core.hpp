#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rtbias {

using Count = std::int64_t;

/// Discrete generation-interval distribution p(tau) over lags tau = 1..max_lag().
///
/// Construct through validate_generation_interval(); a constructed value always
/// has non-negative entries summing to one within 1e-12 and at least one
/// positive entry.
class GenerationInterval {
 public:
  std::size_t max_lag() const noexcept { return probs_.size(); }

  /// p(tau) for tau >= 1; zero outside the support.
  double at(std::size_t tau) const noexcept {
    return (tau >= 1 && tau <= probs_.size()) ? probs_[tau - 1] : 0.0;
  }

  /// Probabilities indexed from lag 1 (element 0 is p(1)).
  std::span<const double> probs() const noexcept { return probs_; }

  bool operator==(const GenerationInterval&) const = default;

 private:
  friend GenerationInterval validate_generation_interval(std::span<const double> probs);
  explicit GenerationInterval(std::vector<double> probs) : probs_(std::move(probs)) {}

  std::vector<double> probs_;
};

/// Validates lag-1-indexed probabilities. Rejects negative entries, an empty or
/// all-zero support, and sums further than 1e-9 from one. Within that tolerance
/// the entries are rescaled so that they sum to one.
GenerationInterval validate_generation_interval(std::span<const double> probs);

/// Time x group matrix of non-negative integer counts. Serves both as the true
/// infections I_t(l) and as the observed symptomatic counts S_t(l).
///
/// `origin` is the absolute time of row 0; all arithmetic uses row indices.
class GroupedSeries {
 public:
  GroupedSeries() = default;

  /// Row-major counts, `rows * labels.size()` entries.
  GroupedSeries(std::size_t rows, std::vector<std::string> labels, std::vector<Count> counts,
                Count origin = 0);

  static GroupedSeries from_rows(const std::vector<std::vector<Count>>& rows,
                                 std::vector<std::string> labels, Count origin = 0);

  /// Same shape and labels as `like`, new counts.
  static GroupedSeries with_counts(const GroupedSeries& like, std::vector<Count> counts);

  std::size_t times() const noexcept { return rows_; }
  std::size_t groups() const noexcept { return labels_.size(); }
  Count origin() const noexcept { return origin_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  Count at(std::size_t t, std::size_t l) const noexcept { return counts_[t * labels_.size() + l]; }
  std::span<const Count> row(std::size_t t) const noexcept {
    return {counts_.data() + t * labels_.size(), labels_.size()};
  }
  std::span<const Count> data() const noexcept { return counts_; }

  /// Per-time sums over groups.
  std::vector<Count> totals() const;

  bool operator==(const GroupedSeries&) const = default;

 private:
  std::size_t rows_ = 0;
  std::vector<std::string> labels_;
  std::vector<Count> counts_;
  Count origin_ = 0;
};

/// Default labels "g0", "g1", ... for `n` groups.
std::vector<std::string> default_labels(std::size_t n);

/// Per-group detection probabilities pi_l in (0, 1].
class SymptomaticRates {
 public:
  explicit SymptomaticRates(std::vector<double> rates);

  std::size_t size() const noexcept { return rates_.size(); }
  double operator[](std::size_t l) const noexcept { return rates_[l]; }
  std::span<const double> values() const noexcept { return rates_; }

  /// 1 / pi_l per group.
  std::vector<double> inverse() const;

  bool operator==(const SymptomaticRates&) const = default;

 private:
  std::vector<double> rates_;
};

struct RtQuantiles {
  double lower = 0.0;
  double median = 0.0;
  double upper = 0.0;

  bool operator==(const RtQuantiles&) const = default;
};

/// Per-time Rt estimates starting at absolute time `t0`. Times where the
/// estimate is undefined hold std::nullopt.
struct RtSeries {
  Count t0 = 0;
  std::vector<std::optional<double>> estimates;
  /// Present only for posterior summaries; aligned with `estimates`.
  std::optional<std::vector<std::optional<RtQuantiles>>> quantiles;
  /// Times t < burn_in_end have a renewal sum that is cut short by the start of
  /// the series.
  Count burn_in_end = 0;

  std::size_t size() const noexcept { return estimates.size(); }
  Count t_end() const noexcept { return t0 + static_cast<Count>(estimates.size()); }
  std::optional<double> at(Count t) const;
  bool is_burn_in(Count t) const noexcept { return t < burn_in_end; }

  bool operator==(const RtSeries&) const = default;
};

/// Lambda_t = sum_tau p(tau) X_{t-tau}. Lags reaching before index 0 contribute
/// nothing. `t` is a row index; only totals[0..t-1] are read.
double renewal_denominator(std::span<const double> totals, const GenerationInterval& gi,
                           std::size_t t);

/// sum_l weights[l] * counts(t, l) for every t.
std::vector<double> weighted_totals(const GroupedSeries& series, std::span<const double> weights);

/// Row sums promoted to double.
std::vector<double> plain_totals(const GroupedSeries& series);

}  // namespace rtbias
