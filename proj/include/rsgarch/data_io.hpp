#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsgarch/types.hpp"

namespace rsgarch::data {

/// One monthly column with its own dates.
struct MonthlyColumn {
    std::vector<YearMonth> dates;
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    /// Rows with date >= first (and <= last when given).
    [[nodiscard]] MonthlyColumn slice(YearMonth first, std::optional<YearMonth> last = std::nullopt) const;
};

/// Consecutive monthly rows with named value columns.
struct MonthlyTable {
    std::vector<YearMonth> dates;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    [[nodiscard]] std::size_t rows() const noexcept { return dates.size(); }
    /// Throws InputError when the column does not exist.
    [[nodiscard]] MonthlyColumn column(std::string_view name) const;
    void add_column(std::string name, const MonthlyColumn& col);
};

enum class Units {
    /// Percent when line 1 carries the `# units=percent` pragma, decimal otherwise.
    from_pragma,
    decimal,
    percent,
};

struct CsvSchema {
    std::string date_column = "date";
    /// Columns to keep; all non-date columns when empty.
    std::vector<std::string> value_columns;
    Units units = Units::from_pragma;
};

/// Parses a monthly CSV. Percent-unit columns are divided by 100.
/// Errors (InputError) name the row and column; duplicate and missing months are rejected.
[[nodiscard]] MonthlyTable load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
[[nodiscard]] MonthlyTable parse_csv(std::istream& in, const CsvSchema& schema = {},
                                     std::string_view source = "<stream>");

/// Writes decimal-unit CSV with a `date` column first; values use shortest round-trip formatting.
void write_csv(std::ostream& out, const MonthlyTable& table);
void write_csv(const std::filesystem::path& path, const MonthlyTable& table);

/// Builds the bivariate excess-return series from two table columns.
[[nodiscard]] ExcessReturnSeries to_series(const MonthlyTable& table, std::string_view market,
                                           std::string_view hedge);

/// Price per unit face of an annual-coupon bond with `maturity_years` remaining coupons,
/// discounted at annual yield `yield`.
[[nodiscard]] double bond_price(double yield, double coupon_rate, int maturity_years);

/// Monthly total returns of a constant-maturity par bond: the coupon accrual y_{t-1}/12 plus the
/// repricing of a bond issued at y_{t-1} when the yield moves to y_t. Output has one fewer row.
[[nodiscard]] std::vector<double> bond_total_returns(std::span<const double> yields, int maturity_years);
[[nodiscard]] MonthlyColumn bond_total_return(const MonthlyColumn& yields, int maturity_years);

/// Total return minus the monthly risk-free rate (annualized yield / 12). Dates must match exactly.
[[nodiscard]] MonthlyColumn excess_returns(const MonthlyColumn& total, const MonthlyColumn& rf_yields);

/// Arithmetic mean of aligned columns (equally weighted portfolio).
[[nodiscard]] MonthlyColumn equal_weight(std::span<const MonthlyColumn> columns);

}  // namespace rsgarch::data
