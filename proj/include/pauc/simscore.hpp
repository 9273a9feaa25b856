#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "pauc/dataset.hpp"
#include "pauc/rng.hpp"

// Simulated scorers. A score model assigns each example a score drawn
// from one of four distributions, picked by (label, in-subgroup?), which
// reproduces the biased-model geometry: a model with unintended bias
// scores subgroup examples systematically higher than background ones.
//
// Two families: gaussian-on-latent (a normal on an unbounded latent
// scale, squashed into [0,1] by a logistic map) and beta. Rank metrics
// are invariant under the strictly increasing squash, so the latent
// normal closed form Phi((mu_pos - mu_neg) / sqrt(s_neg^2 + s_pos^2))
// stays valid for squashed scores; that gives every Monte Carlo result
// here an exact analytic counterpart to converge to.

namespace pauc {

enum class DistFamily : std::uint8_t { gaussian_latent, beta };

struct ScoreDistribution {
  DistFamily family = DistFamily::gaussian_latent;
  // gaussian_latent: (mean, stddev) of the latent normal
  // beta: (alpha, beta) shape parameters
  double a = 0.0;
  double b = 1.0;

  static ScoreDistribution gaussian(double mean, double stddev) {
    if (!(stddev > 0.0)) throw std::invalid_argument("stddev must be > 0");
    return {DistFamily::gaussian_latent, mean, stddev};
  }
  static ScoreDistribution beta(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) {
      throw std::invalid_argument("beta shape parameters must be > 0");
    }
    return {DistFamily::beta, alpha, beta};
  }
};

// The four cells of Table-1-style score geometry.
struct ScoreModelSpec {
  ScoreDistribution background_neg;
  ScoreDistribution background_pos;
  ScoreDistribution subgroup_neg;
  ScoreDistribution subgroup_pos;
  std::string subgroup;
  std::uint64_t seed = 0;
  bool clamp = true;  // squash latent gaussians into [0,1]
};

inline double squash(double latent) {
  return 1.0 / (1.0 + std::exp(-latent));
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace detail {

inline double draw_score(const ScoreDistribution& dist, SplitMix64& rng,
                         bool clamp) {
  switch (dist.family) {
    case DistFamily::gaussian_latent: {
      const double latent = dist.a + dist.b * rng.next_normal();
      return clamp ? squash(latent) : latent;
    }
    case DistFamily::beta:
      // inverse-CDF draw: one uniform per score
      return boost::math::ibeta_inv(dist.a, dist.b, rng.next_unit());
  }
  throw std::logic_error("unreachable");
}

// density and CDF on the observed [0,1] score scale
inline double unit_pdf(const ScoreDistribution& dist, double x) {
  if (dist.family == DistFamily::beta) {
    return boost::math::pdf(boost::math::beta_distribution<>(dist.a, dist.b),
                            x);
  }
  const double z = (logit(x) - dist.a) / dist.b;
  const double normal_pdf =
      std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return normal_pdf / (dist.b * x * (1.0 - x));
}

inline double unit_cdf(const ScoreDistribution& dist, double x) {
  if (dist.family == DistFamily::beta) {
    return boost::math::cdf(boost::math::beta_distribution<>(dist.a, dist.b),
                            x);
  }
  return normal_cdf((logit(x) - dist.a) / dist.b);
}

}  // namespace detail

// n independent scores; each draw is a pure function of (seed, index),
// so the sample is identical however the loop is scheduled.
inline std::vector<double> sample_scores(const ScoreDistribution& dist,
                                         std::size_t n, std::uint64_t seed,
                                         bool clamp = true) {
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    SplitMix64 rng(derive_seed(seed, i));
    scores[i] = detail::draw_score(dist, rng, clamp);
  }
  return scores;
}

// Re-score every example from the cell matching (label, subgroup tag).
// Ids, labels, tags and text are preserved; scores are deterministic
// given the model seed and the example's position.
inline Dataset score_dataset(const Dataset& dataset,
                             const ScoreModelSpec& model) {
  std::vector<LabeledExample> scored = dataset.examples();
  for (std::size_t i = 0; i < scored.size(); ++i) {
    auto& ex = scored[i];
    const bool in_subgroup = ex.has_subgroup(model.subgroup);
    const ScoreDistribution& cell =
        is_positive(ex.label)
            ? (in_subgroup ? model.subgroup_pos : model.background_pos)
            : (in_subgroup ? model.subgroup_neg : model.background_neg);
    SplitMix64 rng(derive_seed(model.seed, i));
    ex.score = detail::draw_score(cell, rng, model.clamp);
  }
  return Dataset(std::move(scored));
}

// P(pos sample > neg sample). Gaussian pairs use the closed form; any
// pair involving a beta falls back to tanh-sinh quadrature of
// integral f_pos(y) F_neg(y) dy over (0,1), well under 1e-6 absolute
// error (quadrature target 1e-9).
inline double analytic_pairwise_auc(const ScoreDistribution& neg,
                                    const ScoreDistribution& pos,
                                    bool allow_numeric = true) {
  if (neg.family == DistFamily::gaussian_latent &&
      pos.family == DistFamily::gaussian_latent) {
    return normal_cdf((pos.a - neg.a) / std::hypot(neg.b, pos.b));
  }
  if (!allow_numeric) {
    throw std::invalid_argument(
        "analytic_pairwise_auc: no closed form for this family pair and "
        "numeric fallback is disabled");
  }
  boost::math::quadrature::tanh_sinh<double> integrator;
  const auto integrand = [&](double y) {
    return detail::unit_pdf(pos, y) * detail::unit_cdf(neg, y);
  };
  return integrator.integrate(integrand, 0.0, 1.0, 1e-9);
}

struct CellCounts {
  std::int64_t background_neg = 0;
  std::int64_t background_pos = 0;
  std::int64_t subgroup_neg = 0;
  std::int64_t subgroup_pos = 0;
};

// The population value Monte Carlo pinned AUC converges to: the
// pair-share weighted average of the four pairwise AUCs.
inline double analytic_pinned_auc(const ScoreModelSpec& model,
                                  const CellCounts& counts) {
  if (counts.background_neg < 0 || counts.background_pos < 0 ||
      counts.subgroup_neg < 0 || counts.subgroup_pos < 0) {
    throw std::invalid_argument("cell counts must be nonnegative");
  }
  const std::int64_t negatives = counts.background_neg + counts.subgroup_neg;
  const std::int64_t positives = counts.background_pos + counts.subgroup_pos;
  const std::int64_t total_pairs = negatives * positives;
  if (total_pairs == 0) {
    throw EmptySideError("analytic pinned AUC undefined: zero pairs");
  }
  const double n = static_cast<double>(total_pairs);
  double value = 0.0;
  const auto add_term = [&](std::int64_t neg_count, std::int64_t pos_count,
                            const ScoreDistribution& neg_dist,
                            const ScoreDistribution& pos_dist) {
    const std::int64_t pairs = neg_count * pos_count;
    if (pairs == 0) return;
    value += (static_cast<double>(pairs) / n) *
             analytic_pairwise_auc(neg_dist, pos_dist);
  };
  add_term(counts.background_neg, counts.background_pos, model.background_neg,
           model.background_pos);
  add_term(counts.subgroup_neg, counts.subgroup_pos, model.subgroup_neg,
           model.subgroup_pos);
  add_term(counts.background_neg, counts.subgroup_pos, model.background_neg,
           model.subgroup_pos);
  add_term(counts.subgroup_neg, counts.background_pos, model.subgroup_neg,
           model.background_pos);
  return value;
}

// Default biased model: subgroup scores shifted up by four latent
// standard deviations, so subgroup negatives land exactly on background
// positives and no single threshold can separate the subgroup.
inline ScoreModelSpec biased_model_spec(std::string subgroup,
                                        std::uint64_t seed = 0) {
  ScoreModelSpec spec;
  spec.background_neg = ScoreDistribution::gaussian(-2.0, 1.0);
  spec.background_pos = ScoreDistribution::gaussian(2.0, 1.0);
  spec.subgroup_neg = ScoreDistribution::gaussian(2.0, 1.0);
  spec.subgroup_pos = ScoreDistribution::gaussian(6.0, 1.0);
  spec.subgroup = std::move(subgroup);
  spec.seed = seed;
  return spec;
}

// Mitigated model: subgroup cells identical to background cells, i.e.
// no unintended bias.
inline ScoreModelSpec mitigated_model_spec(std::string subgroup,
                                           std::uint64_t seed = 0) {
  ScoreModelSpec spec;
  spec.background_neg = ScoreDistribution::gaussian(-2.0, 1.0);
  spec.background_pos = ScoreDistribution::gaussian(2.0, 1.0);
  spec.subgroup_neg = ScoreDistribution::gaussian(-2.0, 1.0);
  spec.subgroup_pos = ScoreDistribution::gaussian(2.0, 1.0);
  spec.subgroup = std::move(subgroup);
  spec.seed = seed;
  return spec;
}

}  // namespace pauc
