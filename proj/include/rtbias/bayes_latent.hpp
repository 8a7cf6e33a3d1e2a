#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rtbias/core.hpp"
#include "rtbias/estimators.hpp"
#include "rtbias/rng.hpp"

namespace rtbias {

struct McmcConfig {
  std::size_t n_samples = 1000;
  std::size_t burn_in = 500;
  std::size_t thin = 5;
  /// Half-width of the integer random-walk proposal; steps are uniform on
  /// +-[1, width].
  std::size_t proposal_width = 3;
  /// Widen each cell's proposal to about three posterior standard deviations
  /// when that exceeds proposal_width. The kernel stays symmetric and fixed
  /// for a given cell and rate.
  bool scale_proposal = true;
  std::uint64_t rng_seed = 0;

  bool operator==(const McmcConfig&) const = default;
};

void validate(const McmcConfig& config);

struct BetaPrior {
  double alpha = 1.0;
  double beta = 1.0;

  bool operator==(const BetaPrior&) const = default;
};

void validate(const BetaPrior& prior);

/// Retained posterior draws of the latent infections (and of the rates when
/// they were sampled too).
struct LatentPosterior {
  std::vector<GroupedSeries> samples;
  std::optional<std::vector<SymptomaticRates>> rate_samples;
  double acceptance_rate = 0.0;
};

inline constexpr double kDefaultPriorCap = 5.0;

/// Inclusive integer support [S, ceil(prior_cap * S / rate) + 10] of the flat
/// prior on a latent count.
struct LatentSupport {
  Count lower = 0;
  Count upper = 0;
};
LatentSupport latent_support(Count observed, double rate, double prior_cap);

/// log p(I | S, pi) up to a constant under the flat prior: log C(I, S) + (I - S) log(1 - pi).
double latent_log_density(Count latent, Count observed, double rate);

/// Integer random-walk Metropolis-Hastings chain for one cell. Proposals
/// outside [lower, upper] are reflected back once and rejected if still
/// outside.
class LatentCellChain {
 public:
  LatentCellChain(Count observed, LatentSupport support, Count initial);

  /// One M-H transition targeting p(I | S, rate). Returns true on acceptance.
  bool step(Rng& rng, double rate, Count half_width);

  Count value() const noexcept { return current_; }
  Count observed() const noexcept { return observed_; }

 private:
  Count observed_;
  LatentSupport support_;
  Count current_;
  double current_log_density_ = 0.0;
  double cached_rate_ = -1.0;
};

/// Proposal half-width used for a cell with the given observation and rate.
Count proposal_half_width(const McmcConfig& config, Count observed, double rate);

/// Independent per-cell samplers for p(I_t(l) | S_t(l), pi_l) with known rates.
LatentPosterior sample_latent_known_rates(const GroupedSeries& symptomatics,
                                          const SymptomaticRates& rates, double prior_cap,
                                          const McmcConfig& mcmc);

/// Exact conditional pi ~ Beta(alpha + observed, beta + missed) via two gamma
/// draws.
double conjugate_rate_draw(Count observed_total, Count missed_total, const BetaPrior& prior,
                           Rng& rng);

/// Metropolis-within-Gibbs over (I, pi): an M-H sweep over all cells given pi,
/// then conjugate Beta draws of each pi_l given I. The flat prior on each cell
/// uses a rate-independent cap (the prior's 0.1% quantile stands in for pi) so
/// the Beta conditional is exact.
LatentPosterior sample_joint_unknown_rates(const GroupedSeries& symptomatics,
                                           const std::vector<BetaPrior>& priors, double prior_cap,
                                           const McmcConfig& mcmc);

/// Plug-in Rt = sum_l I_t(l) / sum_tau p(tau) sum_l I_{t-tau}(l) for every
/// draw, summarized as the median with a central 95% interval. A time is
/// defined only when it is defined in every draw.
RtSeries rt_posterior(const LatentPosterior& latents, const GenerationInterval& gi,
                      const EstimatorOptions& opts = {});

/// Median (midpoint for even counts) and inverse-empirical-CDF tails at
/// 2.5% and 97.5%. `values` is reordered.
RtQuantiles summarize_draws(std::vector<double>& values);

}  // namespace rtbias
