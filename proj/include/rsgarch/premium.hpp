#pragma once

#include <span>
#include <vector>

#include "rsgarch/data_io.hpp"
#include "rsgarch/estimation.hpp"
#include "rsgarch/types.hpp"

namespace rsgarch::premium {

/// Monthly risk-premium decomposition (decimal units). total = market + hedge elementwise.
struct PremiumPaths {
    std::vector<double> market;
    std::vector<double> hedge;
    std::vector<double> total;
};

/// market_t = l11 * var_m,t, hedge_t = l12 * cov_mb,t.
[[nodiscard]] PremiumPaths linear_premium(const MeanParams& mean, std::span<const Cov2> h_path);

/// State premia weighted by the smoothed state probabilities.
[[nodiscard]] PremiumPaths rs_premium(const RsModelParams& params, const FilterOutput& filter);

/// median(total) * 12. Throws InputError on an empty path.
[[nodiscard]] double annualized_median_premium(std::span<const double> total);

/// Median of a nonempty path (mean of the two middle values for even lengths).
[[nodiscard]] double median(std::span<const double> values);

/// CSV-ready table with market, hedge and total columns.
[[nodiscard]] data::MonthlyTable premium_table(const std::vector<YearMonth>& dates, const PremiumPaths& paths);

/// D_t = 1 when prob_t > threshold.
[[nodiscard]] std::vector<int> high_volatility_dummy(std::span<const double> high_prob, double threshold);

struct DummyOptions {
    double threshold = 0.75;
    DummyVariant variant = DummyVariant::interaction;
    bool restricted = false;
};

/// Single-regime model with high-volatility dummy terms, fitted by QML.
/// `high_prob` is the per-month probability of the high-volatility state.
/// Throws InputError("degenerate dummy ...") when the dummy is all zeros or all ones.
[[nodiscard]] EstimationResult fit_dummy_model(const ExcessReturnSeries& series, std::span<const double> high_prob,
                                               const DummyOptions& opts = {}, const OptimizerConfig& cfg = {});

}  // namespace rsgarch::premium
