#include "rsgarch/bekk.hpp"

namespace rsgarch::bekk {

Cov2 cov_step(const Cov2& h_prev, const Vec2& eps_prev, const BekkParams& p) {
    const double ae_m = p.a11 * eps_prev[0];
    const double ae_b = p.a22 * eps_prev[1];
    const double smm = p.c11 * p.c11 + ae_m * ae_m + p.b11 * p.b11 * h_prev.smm();
    const double sbb = p.c12 * p.c12 + p.c22 * p.c22 + ae_b * ae_b + p.b22 * p.b22 * h_prev.sbb();
    const double smb = p.c11 * p.c12 + ae_m * ae_b + p.b11 * p.b22 * h_prev.smb();
    return {smm, sbb, smb};
}

LikelihoodPath log_likelihood(std::span<const Vec2> obs, const BekkParams& params, const Cov2& h0,
                              const LikelihoodOptions& opts) {
    LikelihoodPath path;
    path.cov.reserve(obs.size());
    path.innov.reserve(obs.size());
    path.contributions.reserve(obs.size());
    path.loglik = detail::run_recursion(
        obs, params, h0, opts.eps0, [&](std::size_t, const Cov2& h) { return conditional_mean(h, params.mean); },
        [&](std::size_t, const Cov2& h, const Vec2& e, double ld) {
            path.cov.push_back(h);
            path.innov.push_back(e);
            path.contributions.push_back(ld);
        });
    return path;
}

LikelihoodPath log_likelihood(const ExcessReturnSeries& series, const BekkParams& params,
                              const std::optional<Cov2>& h0, const LikelihoodOptions& opts) {
    const auto obs = series.observations();
    return log_likelihood(obs, params, h0 ? *h0 : sample_covariance(obs), opts);
}

double log_likelihood_value(std::span<const Vec2> obs, const BekkParams& params, const Cov2& h0,
                            const LikelihoodOptions& opts) {
    return detail::run_recursion(
        obs, params, h0, opts.eps0, [&](std::size_t, const Cov2& h) { return conditional_mean(h, params.mean); },
        [](std::size_t, const Cov2&, const Vec2&, double) {});
}

}  // namespace rsgarch::bekk
