#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <fmt/format.h>

#include "rsgarch/types.hpp"

namespace rsgarch::bekk {

/// Determinants below this are treated as singular by the Gaussian density.
inline constexpr double kMinDeterminant = 1e-18;

/// One step of the diagonal BEKK recursion: H_t = CC' + A'e e'A + B'H_{t-1}B.
[[nodiscard]] Cov2 cov_step(const Cov2& h_prev, const Vec2& eps_prev, const BekkParams& params);

/// In-mean conditional expectation of (r_m, r_b) given H_t.
[[nodiscard]] inline Vec2 conditional_mean(const Cov2& h, const MeanParams& m) noexcept {
    return {m.l10 + m.l11 * h.smm() + m.l12 * h.smb(), m.l20 + m.l21 * h.smb() + m.l22 * h.sbb()};
}

/// Bivariate normal log density of `innov` under covariance `h`, including -ln(2*pi).
/// Returns nullopt when |h| < kMinDeterminant.
[[nodiscard]] inline std::optional<double> log_density(const Vec2& innov, const Cov2& h) noexcept {
    const double det = h.det();
    if (!(det >= kMinDeterminant)) return std::nullopt;
    const double quad =
        (h.sbb() * innov[0] * innov[0] - 2.0 * h.smb() * innov[0] * innov[1] + h.smm() * innov[1] * innov[1]) / det;
    return -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det) - 0.5 * quad;
}

struct LikelihoodOptions {
    /// Pre-sample innovation feeding the first recursion step.
    Vec2 eps0{0.0, 0.0};
};

struct LikelihoodPath {
    double loglik = 0.0;
    std::vector<Cov2> cov;
    std::vector<Vec2> innov;
    std::vector<double> contributions;
};

/// Full forward pass with H and innovation paths. `h0` is the pre-sample covariance H_0.
/// Throws NumericalError("near-singular covariance at t=...") when |H_t| < kMinDeterminant.
[[nodiscard]] LikelihoodPath log_likelihood(std::span<const Vec2> obs, const BekkParams& params, const Cov2& h0,
                                            const LikelihoodOptions& opts = {});

/// Same as above; h0 defaults to the sample covariance of the series.
[[nodiscard]] LikelihoodPath log_likelihood(const ExcessReturnSeries& series, const BekkParams& params,
                                            const std::optional<Cov2>& h0 = std::nullopt,
                                            const LikelihoodOptions& opts = {});

/// Log-likelihood value only, without storing paths.
[[nodiscard]] double log_likelihood_value(std::span<const Vec2> obs, const BekkParams& params, const Cov2& h0,
                                          const LikelihoodOptions& opts = {});

namespace detail {

/// Shared forward recursion. `mean_fn(t, H_t)` gives the conditional mean and
/// `sink(t, H_t, innov_t, contribution_t)` observes each period.
template <class MeanFn, class Sink>
double run_recursion(std::span<const Vec2> obs, const BekkParams& params, const Cov2& h0, const Vec2& eps0,
                     MeanFn&& mean_fn, Sink&& sink) {
    Cov2 h = h0;
    Vec2 eps = eps0;
    double total = 0.0;
    for (std::size_t t = 0; t < obs.size(); ++t) {
        h = cov_step(h, eps, params);
        const Vec2 mu = mean_fn(t, h);
        eps = {obs[t][0] - mu[0], obs[t][1] - mu[1]};
        const auto ld = log_density(eps, h);
        if (!ld) throw NumericalError(fmt::format("near-singular covariance at t={} (det={:.3e})", t, h.det()));
        total += *ld;
        sink(t, h, eps, *ld);
    }
    return total;
}

}  // namespace detail

}  // namespace rsgarch::bekk
