#include "rsgarch/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "rsgarch/bekk.hpp"
#include "rsgarch/regime.hpp"

namespace rsgarch::simulate {

namespace {

constexpr double kDiagFloor = 1e-12;

Vec2 draw(const Cov2& h, const MeanParams& mean, std::mt19937_64& rng, std::normal_distribution<double>& z) {
    const Chol2 l = cholesky(h);
    const double z1 = z(rng);
    const double z2 = z(rng);
    const Vec2 mu = bekk::conditional_mean(h, mean);
    return {mu[0] + l.l11 * z1, mu[1] + l.l21 * z1 + l.l22 * z2};
}

void check_length(std::size_t n) {
    if (n < ExcessReturnSeries::kMinLength) {
        throw InputError(fmt::format("simulation length must be >= {}, got {}", ExcessReturnSeries::kMinLength, n));
    }
}

}  // namespace

Cov2 default_h0(const BekkParams& b) {
    const double mm = 1.0 - b.a11 * b.a11 - b.b11 * b.b11;
    const double bb = 1.0 - b.a22 * b.a22 - b.b22 * b.b22;
    const double mb = 1.0 - b.a11 * b.a22 - b.b11 * b.b22;
    const double cmm = b.c11 * b.c11;
    const double cbb = b.c12 * b.c12 + b.c22 * b.c22;
    const double cmb = b.c11 * b.c12;
    if (mm > 0.0 && bb > 0.0 && mb > 0.0) {
        const Cov2 h{cmm / mm, cbb / bb, cmb / mb};
        if (h.det() > 0.0) return h;
    }
    return {cmm, cbb, cmb};
}

Chol2 cholesky(const Cov2& h) noexcept {
    const double l11 = std::max(std::sqrt(h.smm()), kDiagFloor);
    const double l21 = h.smb() / l11;
    const double l22 = std::max(std::sqrt(std::max(h.sbb() - l21 * l21, 0.0)), kDiagFloor);
    return {l11, l21, l22};
}

ExcessReturnSeries simulate_single(const BekkParams& params, std::size_t n, const Cov2& h0, std::uint64_t seed) {
    check_length(n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> rm(n), rb(n);
    Cov2 h = h0;
    Vec2 eps{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
        h = bekk::cov_step(h, eps, params);
        const Vec2 r = draw(h, params.mean, rng, z);
        const Vec2 mu = bekk::conditional_mean(h, params.mean);
        eps = {r[0] - mu[0], r[1] - mu[1]};
        rm[t] = r[0];
        rb[t] = r[1];
    }
    return {ExcessReturnSeries::monthly_dates(kSimulationStart, n), std::move(rm), std::move(rb)};
}

RsSimulation simulate_rs(const RsModelParams& params, std::size_t n, const Cov2& h0, std::uint64_t seed,
                         std::optional<int> initial_state) {
    check_length(n);
    if (initial_state && *initial_state != 1 && *initial_state != 2) {
        throw InputError(fmt::format("initial state must be 1 or 2, got {}", *initial_state));
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    int state = 0;
    if (initial_state) {
        state = *initial_state;
    } else {
        const Prob2 pi = regime::stationary_dist(params.p, params.q);
        state = u(rng) < pi[0] ? 1 : 2;
    }
    std::vector<double> rm(n), rb(n);
    std::vector<int> states(n);
    Cov2 h = h0;
    Vec2 eps{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) {
            const double stay = state == 1 ? params.p : params.q;
            if (!(u(rng) < stay)) state = 3 - state;
        }
        const BekkParams& b = state == 1 ? params.regime1 : params.regime2;
        h = bekk::cov_step(h, eps, b);
        const Vec2 r = draw(h, b.mean, rng, z);
        const Vec2 mu = bekk::conditional_mean(h, b.mean);
        eps = {r[0] - mu[0], r[1] - mu[1]};
        rm[t] = r[0];
        rb[t] = r[1];
        states[t] = state;
    }
    return {{ExcessReturnSeries::monthly_dates(kSimulationStart, n), std::move(rm), std::move(rb)}, std::move(states)};
}

}  // namespace rsgarch::simulate
