#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rsgarch/types.hpp"

namespace rsgarch::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    std::mt19937_64& engine() { return rng_; }

    Prob2 simplex() {
        const double a = uniform(0.0, 1.0);
        return {a, 1.0 - a};
    }

    /// Positive definite covariance on a return scale of roughly `scale`.
    Cov2 cov(double scale = 0.05) {
        const double sm = scale * uniform(0.2, 2.0);
        const double sb = scale * uniform(0.2, 2.0);
        const double rho = uniform(-0.9, 0.9);
        return {sm * sm, sb * sb, rho * sm * sb};
    }

    MeanParams mean(bool restricted = false) {
        MeanParams m{normal(0.0, 0.01), normal(0.0, 3.0), normal(0.0, 3.0), normal(0.0, 0.01), 0.0, 0.0};
        if (!restricted) {
            m.l21 = normal(0.0, 3.0);
            m.l22 = normal(0.0, 3.0);
        }
        return m;
    }

    /// Covariance-stationary diagonal BEKK on a monthly-return scale.
    BekkParams bekk(bool restricted = false) {
        BekkParams b;
        b.mean = mean(restricted);
        b.c11 = uniform(0.005, 0.03) * sign();
        b.c12 = normal(0.0, 0.005);
        b.c22 = uniform(0.002, 0.02) * sign();
        b.a11 = uniform(0.05, 0.45) * sign();
        b.a22 = uniform(0.05, 0.45) * sign();
        b.b11 = std::sqrt(uniform(0.0, 0.95 - b.a11 * b.a11)) * sign();
        b.b22 = std::sqrt(uniform(0.0, 0.95 - b.a22 * b.a22)) * sign();
        return b;
    }

    /// Constant-covariance state (A = B = 0).
    BekkParams static_bekk(bool restricted = false) {
        BekkParams b = bekk(restricted);
        b.a11 = b.a22 = b.b11 = b.b22 = 0.0;
        return b;
    }

    RsModelParams rs(bool restricted = false) {
        return {bekk(restricted), bekk(restricted), uniform(0.02, 0.98), uniform(0.02, 0.98)};
    }

    std::vector<Vec2> returns(std::size_t n, double scale = 0.04) {
        std::vector<Vec2> out(n);
        for (auto& r : out) r = {normal(0.0, scale), normal(0.0, scale / 2.0)};
        return out;
    }

    std::vector<double> column(std::size_t n) {
        std::vector<double> out(n);
        for (auto& x : out) x = normal();
        return out;
    }

private:
    double sign() { return uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0; }
    std::mt19937_64 rng_;
};

/// Runs `body(gen, trial)` for `trials` independent draws.
template <class Body>
void for_all(int trials, std::uint64_t seed, Body&& body) {
    for (int i = 0; i < trials; ++i) {
        Gen gen(seed * 1000003ULL + static_cast<std::uint64_t>(i));
        body(gen, i);
    }
}

inline ExcessReturnSeries make_series(const std::vector<Vec2>& obs) {
    std::vector<double> rm, rb;
    for (const auto& o : obs) {
        rm.push_back(o[0]);
        rb.push_back(o[1]);
    }
    return {ExcessReturnSeries::monthly_dates({2000, 1}, obs.size()), rm, rb};
}

}  // namespace rsgarch::testing
