#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rsgarch/types.hpp"

namespace rsgarch::regime {

/// Floor applied to the mixture density inside the log of each likelihood increment.
inline constexpr double kDensityFloor = 1e-300;

/// P(s_t | Omega_{t-1}) from P(s_{t-1} | Omega_{t-1}) through the transition matrix.
[[nodiscard]] Prob2 ex_ante_step(const Prob2& filtered_prev, double p, double q) noexcept;

/// Bayes update of the ex-ante probabilities with the per-state densities.
/// Throws NumericalError when both weighted densities are zero.
[[nodiscard]] Prob2 filter_step(const Prob2& ex_ante, double density1, double density2);

/// Log-density form of filter_step; never underflows for finite log densities.
[[nodiscard]] Prob2 filter_step_log(const Prob2& ex_ante, double log_density1, double log_density2);

struct Recombined {
    Vec2 innov;
    Cov2 cov;
};

/// Collapses the two state-conditional moments into one pair using weights `w`.
/// The covariance is the mixture covariance (law of total variance), so it stays PSD.
[[nodiscard]] Recombined recombine(const Prob2& w, const Vec2& mean1, const Vec2& mean2, const Cov2& h1,
                                   const Cov2& h2, const Vec2& obs);

/// Ergodic distribution of the chain. Throws InputError when p = q = 1.
[[nodiscard]] Prob2 stationary_dist(double p, double q);

enum class RecombineWeights { ex_ante, filtered };

struct RsOptions {
    /// Pre-sample recombined innovation.
    Vec2 eps0{0.0, 0.0};
    /// Probabilities for s_0; the stationary distribution when empty.
    std::optional<Prob2> initial;
    RecombineWeights weights = RecombineWeights::ex_ante;
};

struct RsLikelihood {
    double loglik = 0.0;
    FilterOutput filter;
};

/// Forward filter with moment-matching recombination plus the backward smoother.
/// `h0` is the pre-sample recombined covariance.
[[nodiscard]] RsLikelihood rs_log_likelihood(std::span<const Vec2> obs, const RsModelParams& params, const Cov2& h0,
                                             const RsOptions& opts = {});

[[nodiscard]] RsLikelihood rs_log_likelihood(const ExcessReturnSeries& series, const RsModelParams& params,
                                             const std::optional<Cov2>& h0 = std::nullopt,
                                             const RsOptions& opts = {});

/// Likelihood value only (no stored paths, no smoothing).
[[nodiscard]] double rs_log_likelihood_value(std::span<const Vec2> obs, const RsModelParams& params, const Cov2& h0,
                                             const RsOptions& opts = {});

/// Per-period likelihood increments only.
[[nodiscard]] std::vector<double> rs_contributions(std::span<const Vec2> obs, const RsModelParams& params,
                                                   const Cov2& h0, const RsOptions& opts = {});

/// Backward smoother for P(s_t | Omega_T), seeded with the last filtered vector.
[[nodiscard]] std::vector<Prob2> smooth(std::span<const Prob2> filtered, std::span<const Prob2> ex_ante, double p,
                                        double q);

}  // namespace rsgarch::regime
