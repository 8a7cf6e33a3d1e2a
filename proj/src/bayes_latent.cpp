#include "rtbias/bayes_latent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "rtbias/error.hpp"
#include "rtbias/parallel.hpp"

namespace rtbias {

namespace {

constexpr Count kSupportSlack = 10;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Threads only pay off for the Gibbs sweep once there are many cells.
constexpr std::size_t kParallelCellThreshold = 4096;

Count initial_latent(Count observed, double rate, LatentSupport support) {
  const auto guess = static_cast<Count>(std::llround(static_cast<double>(observed) / rate));
  return std::clamp(guess, support.lower, support.upper);
}

}  // namespace

void validate(const McmcConfig& config) {
  if (config.n_samples < 1) throw Error(ErrorCode::ValidationError, "n_samples: must be >= 1");
  if (config.burn_in < 1) throw Error(ErrorCode::ValidationError, "burn_in: must be >= 1");
  if (config.thin < 1) throw Error(ErrorCode::ValidationError, "thin: must be >= 1");
  if (config.proposal_width < 1) {
    throw Error(ErrorCode::ValidationError, "proposal_width: must be >= 1");
  }
}

void validate(const BetaPrior& prior) {
  if (!(prior.alpha > 0.0) || !(prior.beta > 0.0) || !std::isfinite(prior.alpha) ||
      !std::isfinite(prior.beta)) {
    throw Error(ErrorCode::InvalidPrior, "Beta prior shapes must be finite and > 0");
  }
}

LatentSupport latent_support(Count observed, double rate, double prior_cap) {
  const double cap = std::ceil(prior_cap * static_cast<double>(observed) / rate);
  return {observed, std::max(observed, static_cast<Count>(cap) + kSupportSlack)};
}

double latent_log_density(Count latent, Count observed, double rate) {
  if (latent < observed) return kNegInf;
  const Count missed = latent - observed;
  if (rate >= 1.0) return missed == 0 ? 0.0 : kNegInf;
  return std::lgamma(static_cast<double>(latent) + 1.0) -
         std::lgamma(static_cast<double>(missed) + 1.0) +
         static_cast<double>(missed) * std::log1p(-rate);
}

LatentCellChain::LatentCellChain(Count observed, LatentSupport support, Count initial)
    : observed_(observed), support_(support), current_(std::clamp(initial, support.lower, support.upper)) {}

bool LatentCellChain::step(Rng& rng, double rate, Count half_width) {
  if (rate != cached_rate_) {
    current_log_density_ = latent_log_density(current_, observed_, rate);
    cached_rate_ = rate;
  }
  if (support_.lower == support_.upper || rate >= 1.0) return false;

  std::uniform_int_distribution<Count> magnitude(1, half_width);
  const Count k = magnitude(rng);
  const bool up = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  Count proposed = up ? current_ + k : current_ - k;
  // Mirror about lower - 1/2 and upper + 1/2; this keeps the integer proposal
  // symmetric next to the boundary.
  if (proposed < support_.lower) proposed = 2 * support_.lower - 1 - proposed;
  else if (proposed > support_.upper) proposed = 2 * support_.upper + 1 - proposed;
  if (proposed < support_.lower || proposed > support_.upper) return false;

  const double proposed_log_density = latent_log_density(proposed, observed_, rate);
  const double log_ratio = proposed_log_density - current_log_density_;
  if (log_ratio >= 0.0 ||
      std::log(std::uniform_real_distribution<double>(0.0, 1.0)(rng)) < log_ratio) {
    current_ = proposed;
    current_log_density_ = proposed_log_density;
    return true;
  }
  return false;
}

Count proposal_half_width(const McmcConfig& config, Count observed, double rate) {
  const auto base = static_cast<Count>(config.proposal_width);
  if (!config.scale_proposal || rate >= 1.0) return base;
  const double sd = std::sqrt((static_cast<double>(observed) + 1.0) * (1.0 - rate)) / rate;
  return std::max(base, static_cast<Count>(std::ceil(3.0 * sd)));
}

LatentPosterior sample_latent_known_rates(const GroupedSeries& symptomatics,
                                          const SymptomaticRates& rates, double prior_cap,
                                          const McmcConfig& mcmc) {
  validate(mcmc);
  if (rates.size() != symptomatics.groups()) {
    throw Error(ErrorCode::DimensionMismatch, "got " + std::to_string(rates.size()) +
                                                  " rates for " +
                                                  std::to_string(symptomatics.groups()) +
                                                  " groups");
  }
  if (!(prior_cap >= 1.0)) throw Error(ErrorCode::ValidationError, "prior_cap: must be >= 1");

  const std::size_t L = symptomatics.groups();
  const std::size_t cells = symptomatics.data().size();
  std::vector<std::vector<Count>> draws(mcmc.n_samples, std::vector<Count>(cells, 0));
  std::vector<std::size_t> accepted(cells, 0);

  parallel_for(cells, [&](std::size_t cell) {
    const Count observed = symptomatics.data()[cell];
    const double rate = rates[cell % L];
    const auto support = latent_support(observed, rate, prior_cap);
    const Count width = proposal_half_width(mcmc, observed, rate);
    LatentCellChain chain(observed, support, initial_latent(observed, rate, support));
    Rng rng(derive_seed(derive_seed(mcmc.rng_seed, stream::kLatentCells), cell));

    std::size_t hits = 0;
    for (std::size_t i = 0; i < mcmc.burn_in; ++i) hits += chain.step(rng, rate, width);
    for (std::size_t k = 0; k < mcmc.n_samples; ++k) {
      for (std::size_t i = 0; i < mcmc.thin; ++i) hits += chain.step(rng, rate, width);
      draws[k][cell] = chain.value();
    }
    accepted[cell] = hits;
  });

  LatentPosterior out;
  out.samples.reserve(mcmc.n_samples);
  for (auto& d : draws) out.samples.push_back(GroupedSeries::with_counts(symptomatics, std::move(d)));
  std::size_t total_hits = 0;
  for (auto h : accepted) total_hits += h;
  const double steps = static_cast<double>(cells) *
                       static_cast<double>(mcmc.burn_in + mcmc.n_samples * mcmc.thin);
  out.acceptance_rate = steps > 0 ? static_cast<double>(total_hits) / steps : 0.0;
  return out;
}

double conjugate_rate_draw(Count observed_total, Count missed_total, const BetaPrior& prior,
                           Rng& rng) {
  std::gamma_distribution<double> hit(prior.alpha + static_cast<double>(observed_total), 1.0);
  std::gamma_distribution<double> miss(prior.beta + static_cast<double>(missed_total), 1.0);
  const double x = hit(rng);
  const double y = miss(rng);
  const double pi = x / (x + y);
  return std::clamp(pi, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

LatentPosterior sample_joint_unknown_rates(const GroupedSeries& symptomatics,
                                           const std::vector<BetaPrior>& priors, double prior_cap,
                                           const McmcConfig& mcmc) {
  validate(mcmc);
  const std::size_t L = symptomatics.groups();
  if (priors.size() != L) {
    throw Error(ErrorCode::InvalidPrior, "got " + std::to_string(priors.size()) +
                                             " priors for " + std::to_string(L) + " groups");
  }
  for (const auto& prior : priors) validate(prior);
  if (!(prior_cap >= 1.0)) throw Error(ErrorCode::ValidationError, "prior_cap: must be >= 1");

  std::vector<double> rate(L);
  std::vector<double> cap_rate(L);
  for (std::size_t l = 0; l < L; ++l) {
    rate[l] = priors[l].alpha / (priors[l].alpha + priors[l].beta);
    cap_rate[l] = boost::math::ibeta_inv(priors[l].alpha, priors[l].beta, 0.001);
    cap_rate[l] = std::max(cap_rate[l], 1e-6);
  }

  const std::size_t cells = symptomatics.data().size();
  std::vector<LatentCellChain> chains;
  std::vector<Rng> cell_rngs;
  chains.reserve(cells);
  cell_rngs.reserve(cells);
  const auto cell_base = derive_seed(mcmc.rng_seed, stream::kLatentCells);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const Count observed = symptomatics.data()[cell];
    const auto support = latent_support(observed, cap_rate[cell % L], prior_cap);
    chains.emplace_back(observed, support, initial_latent(observed, rate[cell % L], support));
    cell_rngs.emplace_back(derive_seed(cell_base, cell));
  }
  Rng rate_rng(derive_seed(mcmc.rng_seed, stream::kRates));

  std::vector<std::size_t> accepted(cells, 0);
  const unsigned threads = cells >= kParallelCellThreshold ? 0u : 1u;
  auto sweep = [&] {
    parallel_for(
        cells,
        [&](std::size_t cell) {
          const double r = rate[cell % L];
          const Count width = proposal_half_width(mcmc, chains[cell].observed(), r);
          accepted[cell] += chains[cell].step(cell_rngs[cell], r, width);
        },
        threads);
    // Sequential barrier: rates are drawn from the completed sweep.
    for (std::size_t l = 0; l < L; ++l) {
      Count observed = 0;
      Count missed = 0;
      for (std::size_t cell = l; cell < cells; cell += L) {
        observed += chains[cell].observed();
        missed += chains[cell].value() - chains[cell].observed();
      }
      rate[l] = conjugate_rate_draw(observed, missed, priors[l], rate_rng);
    }
  };

  LatentPosterior out;
  out.samples.reserve(mcmc.n_samples);
  out.rate_samples.emplace();
  out.rate_samples->reserve(mcmc.n_samples);
  for (std::size_t i = 0; i < mcmc.burn_in; ++i) sweep();
  std::vector<Count> current(cells);
  for (std::size_t k = 0; k < mcmc.n_samples; ++k) {
    for (std::size_t i = 0; i < mcmc.thin; ++i) sweep();
    for (std::size_t cell = 0; cell < cells; ++cell) current[cell] = chains[cell].value();
    out.samples.push_back(GroupedSeries::with_counts(symptomatics, current));
    out.rate_samples->emplace_back(rate);
  }
  std::size_t total_hits = 0;
  for (auto h : accepted) total_hits += h;
  const double steps = static_cast<double>(cells) *
                       static_cast<double>(mcmc.burn_in + mcmc.n_samples * mcmc.thin);
  out.acceptance_rate = steps > 0 ? static_cast<double>(total_hits) / steps : 0.0;
  return out;
}

RtQuantiles summarize_draws(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  auto order_stat = [&](double p) {
    auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n);
    return values[k - 1];
  };
  const double median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return {order_stat(0.025), median, order_stat(0.975)};
}

RtSeries rt_posterior(const LatentPosterior& latents, const GenerationInterval& gi,
                      const EstimatorOptions& opts) {
  if (latents.samples.empty()) {
    throw Error(ErrorCode::EmptySamples, "posterior has no draws");
  }
  const auto& first = latents.samples.front();
  std::vector<RtSeries> per_draw;
  per_draw.reserve(latents.samples.size());
  for (const auto& draw : latents.samples) {
    per_draw.push_back(estimate_rt_from_totals(plain_totals(draw), gi, opts, first.origin()));
  }

  RtSeries out;
  out.t0 = per_draw.front().t0;
  out.burn_in_end = per_draw.front().burn_in_end;
  const std::size_t n = per_draw.front().size();
  out.estimates.resize(n);
  out.quantiles.emplace(n);
  std::vector<double> values;
  values.reserve(per_draw.size());
  for (std::size_t i = 0; i < n; ++i) {
    values.clear();
    bool defined = true;
    for (const auto& series : per_draw) {
      if (!series.estimates[i]) {
        defined = false;
        break;
      }
      values.push_back(*series.estimates[i]);
    }
    if (!defined) continue;
    const auto q = summarize_draws(values);
    out.estimates[i] = q.median;
    (*out.quantiles)[i] = q;
  }
  return out;
}

}  // namespace rtbias
