#include "rsgarch/regime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "rsgarch/bekk.hpp"

namespace rsgarch::regime {

namespace {

const double kLogDensityFloor = std::log(kDensityFloor);

void check_transition(double p, double q) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError(fmt::format("transition probability p={} outside [0, 1]", p));
    if (!(q >= 0.0 && q <= 1.0)) throw InputError(fmt::format("transition probability q={} outside [0, 1]", q));
}

struct Step {
    std::size_t t;
    const Prob2& ex_ante;
    const Prob2& filtered;
    const std::array<Cov2, 2>& state_cov;
    const std::array<Vec2, 2>& state_mean;
    const Recombined& agg;
    double contribution;
    bool floored;
};

template <class Sink>
double run_filter(std::span<const Vec2> obs, const RsModelParams& params, const Cov2& h0, const RsOptions& opts,
                  Sink&& sink) {
    check_transition(params.p, params.q);
    Prob2 filtered = opts.initial ? *opts.initial : stationary_dist(params.p, params.q);
    Cov2 h_agg = h0;
    Vec2 e_agg = opts.eps0;
    double total = 0.0;
    for (std::size_t t = 0; t < obs.size(); ++t) {
        const Prob2 ex_ante = ex_ante_step(filtered, params.p, params.q);
        const std::array<Cov2, 2> h{bekk::cov_step(h_agg, e_agg, params.regime1),
                                    bekk::cov_step(h_agg, e_agg, params.regime2)};
        const std::array<Vec2, 2> mu{bekk::conditional_mean(h[0], params.regime1.mean),
                                     bekk::conditional_mean(h[1], params.regime2.mean)};
        std::array<double, 2> ld{};
        for (int k = 0; k < 2; ++k) {
            const Vec2 e{obs[t][0] - mu[k][0], obs[t][1] - mu[k][1]};
            const auto v = bekk::log_density(e, h[k]);
            if (!v) {
                throw NumericalError(
                    fmt::format("near-singular covariance at t={}, state {} (det={:.3e})", t, k + 1, h[k].det()));
            }
            ld[k] = *v;
        }
        if (!(std::max(ld[0], ld[1]) > -std::numeric_limits<double>::infinity())) {
            throw NumericalError(fmt::format("degenerate likelihood at t={}: both state densities vanish", t));
        }
        // log sum_k ex_ante_k f_k, computed without underflow
        const double w0 = ex_ante[0] > 0.0 ? std::log(ex_ante[0]) + ld[0] : -std::numeric_limits<double>::infinity();
        const double w1 = ex_ante[1] > 0.0 ? std::log(ex_ante[1]) + ld[1] : -std::numeric_limits<double>::infinity();
        const double wmax = std::max(w0, w1);
        double increment = wmax + std::log(std::exp(w0 - wmax) + std::exp(w1 - wmax));
        const bool floored = !(increment >= kLogDensityFloor);
        if (floored) increment = kLogDensityFloor;
        total += increment;

        filtered = filter_step_log(ex_ante, ld[0], ld[1]);
        const Prob2& w = opts.weights == RecombineWeights::ex_ante ? ex_ante : filtered;
        const Recombined agg = recombine(w, mu[0], mu[1], h[0], h[1], obs[t]);
        sink(Step{t, ex_ante, filtered, h, mu, agg, increment, floored});
        h_agg = agg.cov;
        e_agg = agg.innov;
    }
    return total;
}

}  // namespace

Prob2 ex_ante_step(const Prob2& f, double p, double q) noexcept {
    const double s1 = p * f[0] + (1.0 - q) * f[1];
    const double s2 = (1.0 - p) * f[0] + q * f[1];
    // both components computed directly, then renormalized so the simplex holds to rounding
    const double sum = s1 + s2;
    return {s1 / sum, s2 / sum};
}

Prob2 filter_step(const Prob2& ex_ante, double density1, double density2) {
    const double w1 = ex_ante[0] * density1;
    const double w2 = ex_ante[1] * density2;
    const double sum = w1 + w2;
    if (!(sum > 0.0)) throw NumericalError("degenerate likelihood: both weighted state densities are zero");
    return {w1 / sum, w2 / sum};
}

Prob2 filter_step_log(const Prob2& ex_ante, double log_density1, double log_density2) {
    if (ex_ante[0] <= 0.0) return {0.0, 1.0};
    if (ex_ante[1] <= 0.0) return {1.0, 0.0};
    // P(s=1 | data) = 1 / (1 + exp(log odds against state 1))
    const double log_odds = (std::log(ex_ante[1]) + log_density2) - (std::log(ex_ante[0]) + log_density1);
    if (std::isnan(log_odds)) throw NumericalError("degenerate likelihood: undefined state log-odds");
    if (log_odds > 0.0) {
        const double e = std::exp(-log_odds);
        return {e / (1.0 + e), 1.0 / (1.0 + e)};
    }
    const double e = std::exp(log_odds);
    return {1.0 / (1.0 + e), e / (1.0 + e)};
}

Recombined recombine(const Prob2& w, const Vec2& mean1, const Vec2& mean2, const Cov2& h1, const Cov2& h2,
                     const Vec2& obs) {
    const Vec2 mbar{w[0] * mean1[0] + w[1] * mean2[0], w[0] * mean1[1] + w[1] * mean2[1]};
    // sum_k w_k (m_k - mbar)(m_k - mbar)' collapses to w1 w2 d d' with d = m1 - m2
    const double d0 = mean1[0] - mean2[0];
    const double d1 = mean1[1] - mean2[1];
    const double ww = w[0] * w[1];
    Cov2 cov{w[0] * h1.smm() + w[1] * h2.smm() + ww * d0 * d0, w[0] * h1.sbb() + w[1] * h2.sbb() + ww * d1 * d1,
             w[0] * h1.smb() + w[1] * h2.smb() + ww * d0 * d1};
    return {{obs[0] - mbar[0], obs[1] - mbar[1]}, cov};
}

Prob2 stationary_dist(double p, double q) {
    check_transition(p, q);
    const double denom = (1.0 - p) + (1.0 - q);
    if (!(denom > 0.0)) throw InputError("no unique stationary distribution: p = q = 1");
    return {(1.0 - q) / denom, (1.0 - p) / denom};
}

RsLikelihood rs_log_likelihood(std::span<const Vec2> obs, const RsModelParams& params, const Cov2& h0,
                               const RsOptions& opts) {
    RsLikelihood out;
    auto& f = out.filter;
    const std::size_t n = obs.size();
    f.ex_ante.reserve(n);
    f.filtered.reserve(n);
    f.state_cov.reserve(n);
    f.state_mean.reserve(n);
    f.agg_cov.reserve(n);
    f.agg_innov.reserve(n);
    f.contributions.reserve(n);
    out.loglik = run_filter(obs, params, h0, opts, [&](const Step& s) {
        f.ex_ante.push_back(s.ex_ante);
        f.filtered.push_back(s.filtered);
        f.state_cov.push_back(s.state_cov);
        f.state_mean.push_back(s.state_mean);
        f.agg_cov.push_back(s.agg.cov);
        f.agg_innov.push_back(s.agg.innov);
        f.contributions.push_back(s.contribution);
        if (s.floored) f.floored_steps.push_back(s.t);
    });
    if (n > 0) f.smoothed = smooth(f.filtered, f.ex_ante, params.p, params.q);
    return out;
}

RsLikelihood rs_log_likelihood(const ExcessReturnSeries& series, const RsModelParams& params,
                               const std::optional<Cov2>& h0, const RsOptions& opts) {
    const auto obs = series.observations();
    return rs_log_likelihood(obs, params, h0 ? *h0 : sample_covariance(obs), opts);
}

double rs_log_likelihood_value(std::span<const Vec2> obs, const RsModelParams& params, const Cov2& h0,
                               const RsOptions& opts) {
    return run_filter(obs, params, h0, opts, [](const Step&) {});
}

std::vector<double> rs_contributions(std::span<const Vec2> obs, const RsModelParams& params, const Cov2& h0,
                                     const RsOptions& opts) {
    std::vector<double> out;
    out.reserve(obs.size());
    run_filter(obs, params, h0, opts, [&](const Step& s) { out.push_back(s.contribution); });
    return out;
}

std::vector<Prob2> smooth(std::span<const Prob2> filtered, std::span<const Prob2> ex_ante, double p, double q) {
    check_transition(p, q);
    if (filtered.size() != ex_ante.size()) {
        throw InputError(fmt::format("smoother paths misaligned: {} filtered vs {} ex-ante", filtered.size(),
                                     ex_ante.size()));
    }
    const std::size_t n = filtered.size();
    std::vector<Prob2> out(n);
    if (n == 0) return out;
    out[n - 1] = filtered[n - 1];
    // ratio_j = P(s_{t+1}=j | Omega_T) / P(s_{t+1}=j | Omega_t); a zero smoothed numerator contributes nothing
    for (std::size_t t = n - 1; t-- > 0;) {
        std::array<double, 2> ratio{};
        for (int j = 0; j < 2; ++j) {
            if (out[t + 1][j] == 0.0) continue;
            if (ex_ante[t + 1][j] == 0.0) throw NumericalError(fmt::format("degenerate smoother at t={}", t));
            ratio[j] = out[t + 1][j] / ex_ante[t + 1][j];
        }
        const double s1 = filtered[t][0] * (p * ratio[0] + (1.0 - p) * ratio[1]);
        const double s2 = filtered[t][1] * ((1.0 - q) * ratio[0] + q * ratio[1]);
        const double sum = s1 + s2;
        if (!(sum > 0.0)) throw NumericalError(fmt::format("degenerate smoother at t={}", t));
        out[t] = {s1 / sum, s2 / sum};
    }
    return out;
}

}  // namespace rsgarch::regime
