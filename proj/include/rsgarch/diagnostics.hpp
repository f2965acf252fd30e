#pragma once

#include <cstddef>
#include <span>

namespace rsgarch::diagnostics {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t dof = 0;
};

/// Per-column summary statistics. Kurtosis is non-excess (3 for a normal).
struct SummaryStats {
    std::size_t n = 0;
    double mean = 0.0;
    double std_dev = 0.0;  ///< sample standard deviation (divisor n - 1)
    double skewness = 0.0;
    double kurtosis = 0.0;
    TestResult jarque_bera;
    TestResult ljung_box;          ///< levels
    TestResult ljung_box_squares;  ///< squared deviations from the mean
};

inline constexpr std::size_t kMinStatsLength = 8;
inline constexpr std::size_t kDefaultLags = 6;

/// Upper tail of the chi-square distribution.
[[nodiscard]] double chi2_sf(double x, double dof);

/// JB = n/6 * (S^2 + (K - 3)^2 / 4), chi-square(2) p-value.
[[nodiscard]] TestResult jarque_bera(std::span<const double> x);

/// Q = n(n+2) * sum_{k<=lags} rho_k^2 / (n-k), chi-square(lags) p-value.
[[nodiscard]] TestResult ljung_box(std::span<const double> x, std::size_t lags);

/// Throws InputError for fewer than kMinStatsLength values or zero variance ("degenerate series").
[[nodiscard]] SummaryStats summary_stats(std::span<const double> x, std::size_t lags = kDefaultLags);

}  // namespace rsgarch::diagnostics
