#include "rsgarch/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

namespace rsgarch::data {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool is_percent_pragma(std::string_view line) {
    std::string compact;
    for (char c : line) {
        if (c != ' ' && c != '\t' && c != '\r') compact.push_back(c);
    }
    return compact == "#units=percent";
}

void require_same_dates(const std::vector<YearMonth>& a, const std::vector<YearMonth>& b, std::string_view what) {
    if (a == b) return;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a[i] != b[i]) {
            throw InputError(fmt::format("{}: misaligned dates at row {} ({} vs {})", what, i, a[i].str(), b[i].str()));
        }
    }
    throw InputError(fmt::format("{}: misaligned lengths ({} vs {})", what, a.size(), b.size()));
}

}  // namespace

MonthlyColumn MonthlyColumn::slice(YearMonth first, std::optional<YearMonth> last) const {
    MonthlyColumn out;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        if (dates[i] < first || (last && *last < dates[i])) continue;
        out.dates.push_back(dates[i]);
        out.values.push_back(values[i]);
    }
    return out;
}

MonthlyColumn MonthlyTable::column(std::string_view name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InputError(fmt::format("no column named '{}'", name));
    return {dates, columns[static_cast<std::size_t>(it - names.begin())]};
}

void MonthlyTable::add_column(std::string name, const MonthlyColumn& col) {
    if (names.empty() && dates.empty()) {
        dates = col.dates;
    } else {
        require_same_dates(dates, col.dates, fmt::format("column '{}'", name));
    }
    names.push_back(std::move(name));
    columns.push_back(col.values);
}

MonthlyTable parse_csv(std::istream& in, const CsvSchema& schema, std::string_view source) {
    std::string line;
    std::size_t line_no = 0;
    bool percent = schema.units == Units::percent;
    std::vector<std::string> header;
    std::size_t date_idx = 0;
    std::vector<std::size_t> keep;

    MonthlyTable table;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) continue;
        if (text.front() == '#') {
            if (line_no == 1 && schema.units == Units::from_pragma && is_percent_pragma(text)) percent = true;
            continue;
        }
        const auto cells = split(text);
        if (header.empty()) {
            for (const auto c : cells) header.emplace_back(c);
            const auto d = std::find(header.begin(), header.end(), schema.date_column);
            if (d == header.end()) {
                throw InputError(fmt::format("{}: header has no '{}' column", source, schema.date_column));
            }
            date_idx = static_cast<std::size_t>(d - header.begin());
            if (schema.value_columns.empty()) {
                for (std::size_t i = 0; i < header.size(); ++i) {
                    if (i != date_idx) keep.push_back(i);
                }
            } else {
                for (const auto& name : schema.value_columns) {
                    const auto it = std::find(header.begin(), header.end(), name);
                    if (it == header.end()) throw InputError(fmt::format("{}: no column named '{}'", source, name));
                    keep.push_back(static_cast<std::size_t>(it - header.begin()));
                }
            }
            for (const auto i : keep) table.names.push_back(header[i]);
            table.columns.resize(keep.size());
            continue;
        }
        if (cells.size() != header.size()) {
            throw InputError(fmt::format("{}: line {} has {} fields, header has {}", source, line_no, cells.size(),
                                         header.size()));
        }
        YearMonth date;
        try {
            date = YearMonth::parse(cells[date_idx]);
        } catch (const InputError& e) {
            throw InputError(fmt::format("{}: line {} column '{}': {}", source, line_no, schema.date_column, e.what()));
        }
        if (!table.dates.empty()) {
            const YearMonth prev = table.dates.back();
            if (date == prev) throw InputError(fmt::format("{}: duplicate month {} at line {}", source, date.str(), line_no));
            if (date < prev) {
                throw InputError(fmt::format("{}: month {} at line {} is out of order", source, date.str(), line_no));
            }
            if (date.index() != prev.index() + 1) {
                throw InputError(fmt::format("{}: missing month {} before line {}", source, prev.next().str(), line_no));
            }
        }
        table.dates.push_back(date);
        for (std::size_t k = 0; k < keep.size(); ++k) {
            const auto cell = cells[keep[k]];
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
                throw InputError(fmt::format("{}: line {} column '{}': cannot parse '{}' as a finite number", source,
                                             line_no, header[keep[k]], cell));
            }
            table.columns[k].push_back(percent ? v / 100.0 : v);
        }
    }
    if (header.empty() || table.dates.empty()) throw InputError(fmt::format("{}: empty table", source));
    return table;
}

MonthlyTable load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
    return parse_csv(in, schema, path.string());
}

void write_csv(std::ostream& out, const MonthlyTable& table) {
    out << "date";
    for (const auto& n : table.names) out << ',' << n;
    out << '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        out << table.dates[r].str();
        for (const auto& col : table.columns) out << ',' << fmt::format("{}", col[r]);
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const MonthlyTable& table) {
    std::ofstream out(path);
    if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
    write_csv(out, table);
}

ExcessReturnSeries to_series(const MonthlyTable& table, std::string_view market, std::string_view hedge) {
    return {table.dates, table.column(market).values, table.column(hedge).values};
}

double bond_price(double yield, double coupon_rate, int maturity_years) {
    if (!(yield > 0.0) || !std::isfinite(yield)) throw InputError(fmt::format("yield must be positive, got {}", yield));
    if (maturity_years < 1) throw InputError(fmt::format("maturity must be >= 1 year, got {}", maturity_years));
    // annuity of coupons plus discounted principal
    const double v_n = std::pow(1.0 + yield, -maturity_years);
    return coupon_rate * (1.0 - v_n) / yield + v_n;
}

std::vector<double> bond_total_returns(std::span<const double> yields, int maturity_years) {
    for (std::size_t i = 0; i < yields.size(); ++i) {
        if (!(yields[i] > 0.0) || !std::isfinite(yields[i])) {
            throw InputError(fmt::format("yield at row {} must be positive and finite, got {}", i, yields[i]));
        }
    }
    std::vector<double> out;
    if (yields.size() < 2) return out;
    out.reserve(yields.size() - 1);
    for (std::size_t t = 1; t < yields.size(); ++t) {
        const double coupon = yields[t - 1];
        out.push_back(coupon / 12.0 + (bond_price(yields[t], coupon, maturity_years) - 1.0));
    }
    return out;
}

MonthlyColumn bond_total_return(const MonthlyColumn& yields, int maturity_years) {
    MonthlyColumn out;
    out.values = bond_total_returns(yields.values, maturity_years);
    if (!out.values.empty()) out.dates.assign(yields.dates.begin() + 1, yields.dates.end());
    return out;
}

MonthlyColumn excess_returns(const MonthlyColumn& total, const MonthlyColumn& rf_yields) {
    require_same_dates(total.dates, rf_yields.dates, "excess returns");
    MonthlyColumn out{total.dates, std::vector<double>(total.size())};
    for (std::size_t i = 0; i < total.size(); ++i) out.values[i] = total.values[i] - rf_yields.values[i] / 12.0;
    return out;
}

MonthlyColumn equal_weight(std::span<const MonthlyColumn> columns) {
    if (columns.empty()) throw InputError("equal weighting needs at least one column");
    MonthlyColumn out{columns.front().dates, std::vector<double>(columns.front().size(), 0.0)};
    for (const auto& c : columns) {
        require_same_dates(out.dates, c.dates, "equal weighting");
        for (std::size_t i = 0; i < c.size(); ++i) out.values[i] += c.values[i];
    }
    for (auto& v : out.values) v /= static_cast<double>(columns.size());
    return out;
}

}  // namespace rsgarch::data
