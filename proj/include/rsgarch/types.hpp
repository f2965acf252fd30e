#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsgarch/errors.hpp"

namespace rsgarch {

/// (market, hedge) pair: returns, innovations or conditional means.
using Vec2 = std::array<double, 2>;

/// Probabilities of (state 1, state 2).
using Prob2 = std::array<double, 2>;

/// Calendar month, ordered and convertible to a dense month index.
struct YearMonth {
    int year = 1970;
    int month = 1;  // 1..12

    [[nodiscard]] constexpr int index() const noexcept { return year * 12 + (month - 1); }
    [[nodiscard]] static constexpr YearMonth from_index(int idx) noexcept {
        const int y = idx >= 0 ? idx / 12 : (idx - 11) / 12;
        return {y, idx - y * 12 + 1};
    }
    [[nodiscard]] constexpr YearMonth next() const noexcept { return from_index(index() + 1); }

    /// Parses "YYYY-MM"; throws InputError otherwise.
    static YearMonth parse(std::string_view text);
    [[nodiscard]] std::string str() const;

    friend constexpr auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

/// Symmetric 2x2 conditional covariance [[smm, smb], [smb, sbb]].
///
/// Every instance is finite with positive variances and a nonnegative determinant
/// (up to a relative rounding allowance of 1e-12). The constructor reports which
/// condition failed.
class Cov2 {
public:
    Cov2(double smm, double sbb, double smb);

    static Cov2 identity() { return {1.0, 1.0, 0.0}; }

    [[nodiscard]] double smm() const noexcept { return smm_; }
    [[nodiscard]] double sbb() const noexcept { return sbb_; }
    [[nodiscard]] double smb() const noexcept { return smb_; }
    [[nodiscard]] double det() const noexcept { return smm_ * sbb_ - smb_ * smb_; }

    friend bool operator==(const Cov2&, const Cov2&) = default;

private:
    double smm_;
    double sbb_;
    double smb_;
};

/// Mean-equation coefficients: intercepts and prices of risk.
struct MeanParams {
    double l10 = 0.0;
    double l11 = 0.0;
    double l12 = 0.0;
    double l20 = 0.0;
    double l21 = 0.0;
    double l22 = 0.0;

    [[nodiscard]] bool is_restricted() const noexcept { return l21 == 0.0 && l22 == 0.0; }
    friend bool operator==(const MeanParams&, const MeanParams&) = default;
};

/// One regime of the diagonal BEKK-in-mean model.
/// C = [[c11, 0], [c12, c22]], A = diag(a11, a22), B = diag(b11, b22).
struct BekkParams {
    MeanParams mean;
    double c11 = 0.0;
    double c12 = 0.0;
    double c22 = 0.0;
    double a11 = 0.0;
    double a22 = 0.0;
    double b11 = 0.0;
    double b22 = 0.0;

    friend bool operator==(const BekkParams&, const BekkParams&) = default;
};

/// Two-state Markov-switching BEKK. p = P(stay in 1), q = P(stay in 2).
struct RsModelParams {
    BekkParams regime1;
    BekkParams regime2;
    double p = 0.5;
    double q = 0.5;

    /// Throws InputError unless 0 < p < 1 and 0 < q < 1.
    void validate() const;
    friend bool operator==(const RsModelParams&, const RsModelParams&) = default;
};

/// Aligned bivariate monthly excess returns (decimal units).
class ExcessReturnSeries {
public:
    static constexpr std::size_t kMinLength = 10;

    /// Validates and builds the series; throws InputError naming the offending row.
    ExcessReturnSeries(std::vector<YearMonth> dates, std::vector<double> rm, std::vector<double> rb);

    [[nodiscard]] std::size_t size() const noexcept { return obs_.size(); }
    [[nodiscard]] const std::vector<YearMonth>& dates() const noexcept { return dates_; }
    [[nodiscard]] std::span<const Vec2> observations() const noexcept { return obs_; }
    [[nodiscard]] std::vector<double> rm() const;
    [[nodiscard]] std::vector<double> rb() const;

    /// Consecutive months starting at `start`.
    static std::vector<YearMonth> monthly_dates(YearMonth start, std::size_t n);

    friend bool operator==(const ExcessReturnSeries&, const ExcessReturnSeries&) = default;

private:
    std::vector<YearMonth> dates_;
    std::vector<Vec2> obs_;
};

/// Unvalidated input to validate_series.
struct RawSeries {
    std::vector<YearMonth> dates;
    std::vector<double> rm;
    std::vector<double> rb;
};

ExcessReturnSeries validate_series(RawSeries raw);

/// Regime probabilities and conditional moments from one filter pass.
struct FilterOutput {
    std::vector<Prob2> ex_ante;
    std::vector<Prob2> filtered;
    std::vector<Prob2> smoothed;
    std::vector<std::array<Cov2, 2>> state_cov;
    std::vector<std::array<Vec2, 2>> state_mean;
    std::vector<Cov2> agg_cov;
    std::vector<Vec2> agg_innov;
    /// Per-period log-likelihood increments.
    std::vector<double> contributions;
    /// Periods whose mixture density fell below the probability floor.
    std::vector<std::size_t> floored_steps;

    [[nodiscard]] std::size_t size() const noexcept { return ex_ante.size(); }
};

/// Sample covariance of the observations (divisor n). Requires n >= 2.
Cov2 sample_covariance(std::span<const Vec2> obs);

}  // namespace rsgarch
