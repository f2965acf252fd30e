#include "rsgarch/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

#include "rsgarch/errors.hpp"

namespace rsgarch::diagnostics {

namespace {

struct Moments {
    double mean, m2, m3, m4;
};

Moments central_moments(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    return {mean, m2 / n, m3 / n, m4 / n};
}

// A constant series can leave a rounding-level m2 > 0, so constancy is checked on the values.
void require_nondegenerate(std::span<const double> x, const Moments& m) {
    const bool constant = std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
    if (constant || !(m.m2 > 0.0)) throw InputError("degenerate series: zero variance");
}

}  // namespace

double chi2_sf(double x, double dof) {
    if (!(x > 0.0)) return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

TestResult jarque_bera(std::span<const double> x) {
    if (x.size() < 2) throw InputError("Jarque-Bera needs at least two observations");
    const Moments m = central_moments(x);
    require_nondegenerate(x, m);
    const double skew = m.m3 / std::pow(m.m2, 1.5);
    const double kurt = m.m4 / (m.m2 * m.m2);
    const double n = static_cast<double>(x.size());
    const double jb = n / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) * (kurt - 3.0));
    return {jb, chi2_sf(jb, 2.0), 2};
}

TestResult ljung_box(std::span<const double> x, std::size_t lags) {
    const std::size_t n = x.size();
    if (lags == 0 || lags >= n) {
        throw InputError(fmt::format("Ljung-Box needs 0 < lags < n (lags={}, n={})", lags, n));
    }
    const Moments m = central_moments(x);
    require_nondegenerate(x, m);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - m.mean;
    const double denom = m.m2 * static_cast<double>(n);
    const double dn = static_cast<double>(n);
    double q = 0.0;
    for (std::size_t k = 1; k <= lags; ++k) {
        double num = 0.0;
        for (std::size_t t = k; t < n; ++t) num += d[t] * d[t - k];
        const double rho = num / denom;
        q += rho * rho / (dn - static_cast<double>(k));
    }
    q *= dn * (dn + 2.0);
    return {q, chi2_sf(q, static_cast<double>(lags)), lags};
}

SummaryStats summary_stats(std::span<const double> x, std::size_t lags) {
    if (x.size() < kMinStatsLength) {
        throw InputError(fmt::format("summary statistics need at least {} observations, got {}", kMinStatsLength,
                                     x.size()));
    }
    const Moments m = central_moments(x);
    require_nondegenerate(x, m);
    SummaryStats s;
    s.n = x.size();
    s.mean = m.mean;
    s.std_dev = std::sqrt(m.m2 * static_cast<double>(s.n) / static_cast<double>(s.n - 1));
    s.skewness = m.m3 / std::pow(m.m2, 1.5);
    s.kurtosis = m.m4 / (m.m2 * m.m2);
    s.jarque_bera = jarque_bera(x);
    s.ljung_box = ljung_box(x, lags);
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - m.mean) * (x[i] - m.mean);
    s.ljung_box_squares = ljung_box(sq, lags);
    return s;
}

}  // namespace rsgarch::diagnostics
