#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "rsgarch/data_io.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace rsgarch;
using namespace rsgarch::data;
using rsgarch::testing::for_all;
using rsgarch::testing::Gen;
namespace oracle = rsgarch::testing::oracle;

namespace {

MonthlyTable parse(const std::string& text, const CsvSchema& schema = {}) {
    std::istringstream in(text);
    return parse_csv(in, schema, "test.csv");
}

std::string error_of(const std::string& text) {
    try {
        (void)parse(text);
    } catch (const InputError& e) {
        return e.what();
    }
    return {};
}

std::string long_csv(std::size_t rows, bool percent) {
    std::ostringstream out;
    if (percent) out << "# units=percent\n";
    out << "date,market,bond\n";
    YearMonth ym{1953, 3};
    for (std::size_t i = 0; i < rows; ++i, ym = ym.next()) {
        out << ym.str() << ',' << (percent ? 0.42 : 0.0042) * static_cast<double>(i % 5) << ','
            << (percent ? 0.1 : 0.001) << '\n';
    }
    return out.str();
}

}  // namespace

TEST(Csv, FullSampleRows) {
    const auto t = parse(long_csv(724, false));
    EXPECT_EQ(t.rows(), 724U);
    EXPECT_EQ(t.names, (std::vector<std::string>{"market", "bond"}));
    EXPECT_EQ(t.dates.back().str(), "2013-06");
    const auto s = to_series(t, "market", "bond");
    EXPECT_EQ(s.size(), 724U);
}

TEST(Csv, PercentPragmaDividesBy100) {
    const auto pct = parse(long_csv(30, true));
    const auto dec = parse(long_csv(30, false));
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t r = 0; r < 30; ++r) EXPECT_NEAR(pct.columns[c][r], dec.columns[c][r], 1e-17);
    CsvSchema forced;
    forced.units = Units::decimal;
    EXPECT_NEAR(parse(long_csv(30, true), forced).columns[0][1], 0.42, 1e-15);
}

TEST(Csv, PragmaOnlyOnFirstLine) {
    const auto t = parse("date,x\n# units=percent\n2000-01,5\n");
    EXPECT_EQ(t.columns[0][0], 5.0);
}

TEST(Csv, ColumnSelection) {
    CsvSchema schema;
    schema.value_columns = {"bond"};
    const auto t = parse(long_csv(12, false), schema);
    EXPECT_EQ(t.names, std::vector<std::string>{"bond"});
    schema.value_columns = {"nope"};
    EXPECT_THROW((void)parse(long_csv(12, false), schema), InputError);
}

TEST(Csv, DuplicateMonthNamed) {
    const auto msg = error_of("date,x\n2000-01,1\n2000-02,2\n2000-02,3\n");
    EXPECT_NE(msg.find("duplicate month 2000-02"), std::string::npos) << msg;
}

TEST(Csv, MissingAndOutOfOrderMonths) {
    EXPECT_NE(error_of("date,x\n2000-01,1\n2000-03,2\n").find("missing month 2000-02"), std::string::npos);
    EXPECT_NE(error_of("date,x\n2000-05,1\n2000-03,2\n").find("out of order"), std::string::npos);
}

TEST(Csv, HeaderOnlyIsEmptyTable) {
    EXPECT_NE(error_of("date,x,y\n").find("empty table"), std::string::npos);
    EXPECT_NE(error_of("").find("empty table"), std::string::npos);
}

TEST(Csv, ParseErrorsNameLineAndColumn) {
    const auto msg = error_of("date,x,y\n2000-01,1,2\n2000-02,abc,3\n");
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'x'"), std::string::npos) << msg;
    EXPECT_NE(error_of("date,x\n2000-01,nan\n").find("finite"), std::string::npos);
    EXPECT_NE(error_of("date,x\n2000-01,1,2\n").find("fields"), std::string::npos);
    EXPECT_NE(error_of("when,x\n2000-01,1\n").find("no 'date' column"), std::string::npos);
    EXPECT_NE(error_of("date,x\n2000-1,1\n").find("line 2"), std::string::npos);
}

TEST(Csv, WriteReadRoundTrip) {
    for_all(20, 1, [](Gen& g, int) {
        MonthlyTable t;
        const auto dates = ExcessReturnSeries::monthly_dates({1990, 7}, 25);
        t.add_column("a", {dates, g.column(25)});
        t.add_column("b", {dates, g.column(25)});
        std::ostringstream out;
        write_csv(out, t);
        const auto back = parse(out.str());
        EXPECT_EQ(back.dates, t.dates);
        EXPECT_EQ(back.names, t.names);
        EXPECT_EQ(back.columns, t.columns);
    });
}

TEST(Table, MisalignedColumnRejected) {
    MonthlyTable t;
    t.add_column("a", {ExcessReturnSeries::monthly_dates({1990, 1}, 5), std::vector<double>(5, 1.0)});
    EXPECT_THROW(t.add_column("b", {ExcessReturnSeries::monthly_dates({1990, 2}, 5), std::vector<double>(5, 1.0)}),
                 InputError);
    EXPECT_THROW((void)t.column("zzz"), InputError);
}

TEST(Bond, FlatYieldsEarnCoupon) {
    for_all(100, 2, [](Gen& g, int) {
        const double y = g.uniform(0.001, 0.15);
        const int years = g.integer(1, 30);
        const std::vector<double> yields(13, y);
        const auto r = bond_total_returns(yields, years);
        ASSERT_EQ(r.size(), 12U);
        double growth = 1.0;
        for (double v : r) {
            EXPECT_NEAR(v, y / 12.0, 1e-14);
            growth *= 1.0 + v;
        }
        EXPECT_NEAR(growth - 1.0, std::pow(1.0 + y / 12.0, 12) - 1.0, 1e-12);
    });
}

TEST(Bond, RisingYieldLosesPrice) {
    for_all(100, 3, [](Gen& g, int) {
        const double y0 = g.uniform(0.005, 0.12);
        const double y1 = y0 + g.uniform(1e-4, 0.03);
        const auto r = bond_total_returns(std::vector<double>{y0, y1}, g.integer(1, 30));
        EXPECT_LT(r[0] - y0 / 12.0, 0.0);
    });
}

TEST(Bond, MatchesDiscountedCashFlows) {
    const auto r = bond_total_returns(std::vector<double>{0.04, 0.03}, 5);
    const double ref = 0.04 / 12.0 + oracle::dcf_price(0.03, 0.04, 5) - 1.0;
    EXPECT_NEAR(r[0], ref, 1e-12);
    EXPECT_NEAR(r[0], 0.04913040520527856, 1e-12);
    for_all(200, 4, [](Gen& g, int) {
        const double y = g.uniform(0.001, 0.2);
        const double c = g.uniform(0.0, 0.2);
        const int n = g.integer(1, 40);
        EXPECT_NEAR(bond_price(y, c, n), oracle::dcf_price(y, c, n), 1e-12);
    });
}

TEST(Bond, RejectsNonPositiveYield) {
    EXPECT_THROW((void)bond_total_returns(std::vector<double>{0.03, 0.0}, 5), InputError);
    EXPECT_THROW((void)bond_total_returns(std::vector<double>{-0.01, 0.03}, 5), InputError);
    EXPECT_THROW((void)bond_price(0.03, 0.03, 0), InputError);
}

TEST(Bond, ColumnDatesDropFirstMonth) {
    const MonthlyColumn y{ExcessReturnSeries::monthly_dates({2000, 1}, 4), {0.05, 0.05, 0.051, 0.049}};
    const auto r = bond_total_return(y, 10);
    ASSERT_EQ(r.size(), 3U);
    EXPECT_EQ(r.dates.front().str(), "2000-02");
}

TEST(ExcessReturns, Examples) {
    const auto dates = ExcessReturnSeries::monthly_dates({2000, 1}, 3);
    const MonthlyColumn total{dates, {0.01, 0.02, -0.01}};
    const auto zero = excess_returns(total, {dates, {0.0, 0.0, 0.0}});
    EXPECT_EQ(zero.values, total.values);
    const auto ex = excess_returns(total, {dates, {0.012, 0.012, 0.012}});
    EXPECT_NEAR(ex.values[0], 0.009, 1e-16);
    EXPECT_THROW((void)excess_returns(total, {ExcessReturnSeries::monthly_dates({2000, 2}, 3), {0.0, 0.0, 0.0}}),
                 InputError);
}

TEST(ExcessReturns, ElementwiseOracle) {
    for_all(50, 5, [](Gen& g, int) {
        const auto dates = ExcessReturnSeries::monthly_dates({1970, 1}, 40);
        const auto total = g.column(40);
        std::vector<double> rf(40);
        for (auto& v : rf) v = g.uniform(0.0, 0.15);
        const auto ex = excess_returns({dates, total}, {dates, rf});
        for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(ex.values[i], total[i] - rf[i] / 12.0);
    });
}

TEST(EqualWeight, ArithmeticMean) {
    const auto dates = ExcessReturnSeries::monthly_dates({2000, 1}, 2);
    const std::vector<MonthlyColumn> cols{{dates, {0.01, 0.02}}, {dates, {0.03, 0.0}}, {dates, {0.02, 0.01}}};
    const auto avg = equal_weight(cols);
    EXPECT_NEAR(avg.values[0], 0.02, 1e-16);
    EXPECT_NEAR(avg.values[1], 0.01, 1e-16);
    EXPECT_THROW((void)equal_weight(std::span<const MonthlyColumn>{}), InputError);
}

TEST(Slice, InclusiveRange) {
    const MonthlyColumn c{ExcessReturnSeries::monthly_dates({2000, 1}, 12), std::vector<double>(12, 1.0)};
    const auto s = c.slice({2000, 3}, YearMonth{2000, 5});
    EXPECT_EQ(s.size(), 3U);
    EXPECT_EQ(c.slice({2000, 11}).size(), 2U);
}
