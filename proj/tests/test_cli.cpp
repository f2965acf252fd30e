#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "rsgarch/data_io.hpp"
#include "rsgarch/regime.hpp"
#include "rsgarch/serialize.hpp"
#include "rsgarch/simulate.hpp"

#ifndef RSGARCH_CLI_PATH
#error "RSGARCH_CLI_PATH must point at the command-line binary"
#endif

using namespace rsgarch;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               fmt::format("rsgarch_cli_{}_{}", ::getpid(), ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path path(const std::string& name) const { return dir_ / name; }

    Invocation run(const std::string& args) const {
        const auto out = path("stdout.txt");
        const auto err = path("stderr.txt");
        const std::string cmd = fmt::format("\"{}\" {} > \"{}\" 2> \"{}\"", RSGARCH_CLI_PATH, args, out.string(), err.string());
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
    }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
    }

    /// Writes a simulated single-regime series as CSV.
    std::string simulated_csv(const std::string& name, std::size_t n, std::uint64_t seed) const {
        BekkParams b;
        b.mean = {0.003, 2.5, 0.0, 0.0005, 0.0, 0.0};
        b.c11 = 0.012;
        b.c12 = 0.0005;
        b.c22 = 0.004;
        b.a11 = 0.3;
        b.a22 = 0.35;
        b.b11 = 0.9;
        b.b22 = 0.88;
        const auto s = simulate::simulate_single(b, n, Cov2{0.001, 0.0001, 0.0}, seed);
        data::MonthlyTable t;
        t.add_column("market", {s.dates(), s.rm()});
        t.add_column("bond", {s.dates(), s.rb()});
        data::write_csv(path(name), t);
        return path(name).string();
    }

    fs::path dir_;
};

std::vector<std::vector<std::string>> read_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_F(Cli, StatsTextAndJsonAgree) {
    const auto csv = simulated_csv("in.csv", 300, 1);
    const auto text = run("stats " + csv);
    ASSERT_EQ(text.code, 0) << text.err;
    EXPECT_NE(text.out.find("market"), std::string::npos);
    EXPECT_NE(text.out.find("bond"), std::string::npos);
    const auto js = run("stats --json " + csv);
    ASSERT_EQ(js.code, 0);
    const auto doc = json::parse(js.out);
    ASSERT_EQ(doc.size(), 2U);
    EXPECT_EQ(doc[0]["column"], "market");
    const auto table = data::load_csv(csv);
    const auto direct = diagnostics::summary_stats(table.columns[1]);
    EXPECT_EQ(doc[1]["mean"].get<double>(), direct.mean);
    EXPECT_EQ(doc[1]["ljung_box"]["statistic"].get<double>(), direct.ljung_box.statistic);
    EXPECT_EQ(run(fmt::format("stats {} --out {}", csv, path("s.csv").string())).code, 0);
    EXPECT_EQ(read_rows(slurp(path("s.csv"))).size(), 3U);
}

TEST_F(Cli, StatsPercentUnits) {
    std::string dec = "date,x,y\n", pct = "# units=percent\ndate,x,y\n";
    YearMonth ym{1990, 1};
    for (int i = 0; i < 40; ++i, ym = ym.next()) {
        const double x = 0.01 * std::sin(i), y = 0.002 * std::cos(3 * i);
        dec += fmt::format("{},{},{}\n", ym.str(), x, y);
        pct += fmt::format("{},{},{}\n", ym.str(), x * 100.0, y * 100.0);
    }
    write("dec.csv", dec);
    write("pct.csv", pct);
    const auto a = json::parse(run("stats --json " + path("dec.csv").string()).out);
    const auto b = json::parse(run("stats --json " + path("pct.csv").string()).out);
    for (int c = 0; c < 2; ++c) {
        EXPECT_NEAR(a[c]["mean"].get<double>(), b[c]["mean"].get<double>(), 1e-15);
        EXPECT_NEAR(a[c]["std"].get<double>(), b[c]["std"].get<double>(), 1e-15);
    }
}

TEST_F(Cli, FitSchemaAndDeterminism) {
    const auto csv = simulated_csv("in.csv", 600, 2);
    const auto general = run(fmt::format("fit {} --seed 5 --restarts 2 --out {}", csv, path("g.json").string()));
    ASSERT_EQ(general.code, 0) << general.err;
    const auto g = json::parse(slurp(path("g.json")));
    EXPECT_TRUE(g.contains("loglik"));
    EXPECT_EQ(g["parameters"].size(), 13U);
    EXPECT_EQ(g["std_errors"].size(), 13U);

    ASSERT_EQ(run(fmt::format("fit {} --restricted --seed 5 --restarts 2 --out {}", csv, path("r.json").string())).code, 0);
    const auto r = json::parse(slurp(path("r.json")));
    EXPECT_EQ(r["parameters"].size(), 11U);
    EXPECT_FALSE(r["parameters"].contains("lambda22"));

    ASSERT_EQ(run(fmt::format("fit {} --seed 5 --restarts 2 --out {}", csv, path("g2.json").string())).code, 0);
    EXPECT_EQ(slurp(path("g.json")), slurp(path("g2.json")));
}

TEST_F(Cli, FitTwoRegimesThenFilterAndPremium) {
    const auto csv = simulated_csv("in.csv", 300, 3);
    const auto fit = run(fmt::format("fit {} --regimes 2 --restricted --restarts 1 --no-std-errors --out {}", csv,
                                     path("rs.json").string()));
    ASSERT_TRUE(fit.code == 0 || fit.code == 2) << fit.err;
    const auto doc = json::parse(slurp(path("rs.json")));
    EXPECT_EQ(doc["model"], "regime_switching");
    EXPECT_TRUE(doc["parameters"].contains("p"));
    EXPECT_TRUE(doc["parameters"].contains("q"));
    EXPECT_EQ(doc["parameters"]["state1"].size(), 11U);
    EXPECT_EQ(doc["parameters"]["state2"].size(), 11U);

    const auto filt = run(fmt::format("filter {} {}", csv, path("rs.json").string()));
    ASSERT_EQ(filt.code, 0) << filt.err;
    const auto rows = read_rows(filt.out);
    ASSERT_EQ(rows.size(), 301U);
    EXPECT_EQ(rows[0][13], "var_m_1_x1e4");
    std::vector<double> v1, v2;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        for (int k : {1, 3, 5}) EXPECT_NEAR(std::stod(rows[i][k]) + std::stod(rows[i][k + 1]), 1.0, 1e-12);
        EXPECT_NEAR(std::stod(rows[i][13]), 1e4 * std::stod(rows[i][7]), 1e-9);
        v1.push_back(std::stod(rows[i][7]));
        v2.push_back(std::stod(rows[i][8]));
    }
    // medians from the CSV reproduce the direct computation
    const auto result = load_result(path("rs.json"));
    const auto series = data::to_series(data::load_csv(csv), "market", "bond");
    const auto f = filter_result(result, series);
    std::vector<double> d1;
    for (const auto& h : f.state_cov) d1.push_back(h[0].smm());
    std::sort(v1.begin(), v1.end());
    std::sort(v2.begin(), v2.end());
    std::sort(d1.begin(), d1.end());
    EXPECT_DOUBLE_EQ(v1[150], d1[150]);
    EXPECT_LE(v1[150], v2[150]);

    const auto prem = run(fmt::format("premium {} {} --json", csv, path("rs.json").string()));
    ASSERT_EQ(prem.code, 0) << prem.err;
    EXPECT_EQ(json::parse(prem.out)["model"], "regime_switching");
}

TEST_F(Cli, FilterIdenticalRegimesStayStationary) {
    BekkParams b;
    b.c11 = 0.01;
    b.c12 = 0.001;
    b.c22 = 0.004;
    b.a11 = b.a22 = 0.2;
    b.b11 = b.b22 = 0.8;
    EstimationResult r;
    r.spec = {2, true};
    r.params = RsModelParams{b, b, 0.9, 0.6};
    r.h0 = Cov2{0.0002, 0.00003, 0.0};
    r.n_obs = 120;
    save_result(path("same.json"), r);
    const auto csv = simulated_csv("in.csv", 120, 4);
    const auto out = run(fmt::format("filter {} {}", csv, path("same.json").string()));
    ASSERT_EQ(out.code, 0) << out.err;
    const auto rows = read_rows(out.out);
    const Prob2 pi = regime::stationary_dist(0.9, 0.6);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(std::stod(rows[i][3]), pi[0], 1e-12);
}

TEST_F(Cli, FilterRejectsMismatchedInputs) {
    const auto csv = simulated_csv("in.csv", 100, 5);
    EstimationResult r;
    r.spec = {2, false};
    BekkParams b;
    b.c11 = b.c22 = 0.01;
    r.params = RsModelParams{b, b, 0.9, 0.6};
    r.n_obs = 99;
    save_result(path("rs.json"), r);
    const auto bad_len = run(fmt::format("filter {} {}", csv, path("rs.json").string()));
    EXPECT_EQ(bad_len.code, 1);
    EXPECT_NE(bad_len.err.find("99"), std::string::npos);
    r.params = b;
    r.spec = {1, false};
    r.n_obs = 100;
    save_result(path("single.json"), r);
    EXPECT_EQ(run(fmt::format("filter {} {}", csv, path("single.json").string())).code, 1);
}

TEST_F(Cli, SimulateThenFitRecovers) {
    write("params.json", R"({"lambda10": 0.003, "lambda11": 2.5, "lambda12": 0.0, "lambda20": 0.0005,
        "c11": 0.012, "c12": 0.0005, "c22": 0.004, "a11": 0.25, "a22": 0.46, "b11": 0.92, "b22": 0.90})");
    const auto sim = run(fmt::format("simulate --params {} --T 3000 --seed 9 --out {}", path("params.json").string(),
                                     path("sim.csv").string()));
    ASSERT_EQ(sim.code, 0) << sim.err;
    const auto again = run(fmt::format("simulate --params {} --T 3000 --seed 9", path("params.json").string()));
    EXPECT_EQ(again.out, slurp(path("sim.csv")));
    const auto fit = run(fmt::format("fit {} --restricted --restarts 1 --out {}", path("sim.csv").string(),
                                     path("fit.json").string()));
    ASSERT_EQ(fit.code, 0) << fit.err;
    const auto p = json::parse(slurp(path("fit.json")))["parameters"];
    EXPECT_NEAR(p["a11"].get<double>(), 0.25, 0.1);
    EXPECT_NEAR(p["a22"].get<double>(), 0.46, 0.1);
    EXPECT_NEAR(p["b11"].get<double>(), 0.92, 0.1);
    EXPECT_NEAR(p["b22"].get<double>(), 0.90, 0.1);
}

TEST_F(Cli, SimulateTwoRegimesEmitsStates) {
    write("rs.json", R"({"state1": {"lambda10": 0, "lambda11": 1, "lambda12": 0, "lambda20": 0,
        "c11": 0.02, "c12": 0.0, "c22": 0.01, "a11": 0.1, "a22": 0.1, "b11": 0.5, "b22": 0.5},
        "state2": {"lambda10": 0, "lambda11": 1, "lambda12": 0, "lambda20": 0,
        "c11": 0.05, "c12": 0.0, "c22": 0.02, "a11": 0.1, "a22": 0.1, "b11": 0.5, "b22": 0.5},
        "p": 0.9, "q": 0.8})");
    const auto out = run(fmt::format("simulate --regimes 2 --params {} --T 50 --seed 1", path("rs.json").string()));
    ASSERT_EQ(out.code, 0) << out.err;
    const auto rows = read_rows(out.out);
    ASSERT_EQ(rows.size(), 51U);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"date", "rm", "rb", "state"}));
    EXPECT_EQ(run(fmt::format("simulate --params {} --T 50", path("rs.json").string())).code, 1);
}

TEST_F(Cli, PremiumLinearColumnsAndAnnualization) {
    const auto csv = simulated_csv("in.csv", 400, 6);
    ASSERT_EQ(run(fmt::format("fit {} --restricted --restarts 1 --out {}", csv, path("fit.json").string())).code, 0);
    const auto monthly = run(fmt::format("premium {} {} --json --out {}", csv, path("fit.json").string(),
                                         path("prem.csv").string()));
    ASSERT_EQ(monthly.code, 0) << monthly.err;
    const auto rows = read_rows(slurp(path("prem.csv")));
    ASSERT_EQ(rows.size(), 401U);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"date", "market", "hedge", "total"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_NEAR(std::stod(rows[i][1]) + std::stod(rows[i][2]), std::stod(rows[i][3]), 1e-15);
    }
    const auto annual = run(fmt::format("premium {} {} --json --annualize", csv, path("fit.json").string()));
    const auto m = json::parse(monthly.out)["median"];
    const auto a = json::parse(annual.out)["median"];
    for (const char* k : {"market", "hedge", "total"}) EXPECT_NEAR(a[k].get<double>(), 12.0 * m[k].get<double>(), 1e-15);
}

TEST_F(Cli, ExitCodesOnBadInput) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("stats " + path("missing.csv").string()).code, 1);
    write("garbage.csv", "date,x,y\n2000-01,1,oops\n");
    const auto garbage = run("stats " + path("garbage.csv").string());
    EXPECT_EQ(garbage.code, 1);
    EXPECT_NE(garbage.err.find("line 2"), std::string::npos);
    write("short.csv", "date,x,y\n2000-01,1,2\n2000-02,2,1\n");
    EXPECT_EQ(run("fit " + path("short.csv").string()).code, 1);
    EXPECT_EQ(run("fit --regimes 3 " + path("short.csv").string()).code, 1);
    write("bad.json", "{not json");
    const auto csv = simulated_csv("in.csv", 50, 7);
    EXPECT_EQ(run(fmt::format("filter {} {}", csv, path("bad.json").string())).code, 1);
    EXPECT_EQ(run(fmt::format("premium {} {}", csv, path("nothing.json").string())).code, 1);
    EXPECT_EQ(run("simulate --params " + path("bad.json").string() + " --T 20").code, 1);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, NonConvergenceExitsTwoAndStillWrites) {
    const auto csv = simulated_csv("in.csv", 300, 8);
    const auto out = run(fmt::format("fit {} --restarts 1 --max-iterations 2 --out {}", csv, path("nc.json").string()));
    EXPECT_EQ(out.code, 2) << out.err;
    const auto doc = json::parse(slurp(path("nc.json")));
    EXPECT_FALSE(doc["converged"].get<bool>());
}

TEST_F(Cli, PrepareBuildsExcessReturns) {
    std::string raw = "date,mkt,tbill,y5,y10,y20\n";
    YearMonth ym{1960, 1};
    for (int i = 0; i < 30; ++i, ym = ym.next()) {
        raw += fmt::format("{},{},{},{},{},{}\n", ym.str(), 0.01 * std::sin(i), 0.03, 0.04 + 0.001 * std::sin(i),
                           0.045, 0.05 + 0.001 * std::cos(i));
    }
    write("raw.csv", raw);
    const auto out = run(fmt::format("prepare {} --market-total mkt --rf tbill --bond-yields y5,y10,y20 "
                                     "--maturities 5,10,20 --out {}",
                                     path("raw.csv").string(), path("prep.csv").string()));
    ASSERT_EQ(out.code, 0) << out.err;
    const auto t = data::load_csv(path("prep.csv"));
    EXPECT_EQ(t.rows(), 29U);
    EXPECT_EQ(t.dates.front().str(), "1960-02");
    EXPECT_NEAR(t.columns[0][0], 0.01 * std::sin(1) - 0.03 / 12.0, 1e-15);
    // the 10-year leg sits at a flat yield, so it earns exactly its coupon
    const double y5 = 0.04 / 12.0 + data::bond_price(0.04 + 0.001 * std::sin(1), 0.04, 5) - 1.0;
    const double y20 = 0.05 + 0.001 * std::cos(0);
    const double r20 = y20 / 12.0 + data::bond_price(0.05 + 0.001 * std::cos(1), y20, 20) - 1.0;
    EXPECT_NEAR(t.columns[1][0], (y5 + 0.045 / 12.0 + r20) / 3.0 - 0.03 / 12.0, 1e-15);
}

TEST_F(Cli, ExportParameterTable) {
    const auto csv = simulated_csv("in.csv", 500, 9);
    ASSERT_EQ(run(fmt::format("fit {} --restricted --restarts 1 --out {}", csv, path("fit.json").string())).code, 0);
    const auto out = run("export " + path("fit.json").string());
    ASSERT_EQ(out.code, 0) << out.err;
    const auto rows = read_rows(out.out);
    ASSERT_EQ(rows.size(), 12U);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"name", "estimate", "std_error", "t_stat"}));
    const auto doc = json::parse(slurp(path("fit.json")));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double est = std::stod(rows[i][1]);
        EXPECT_EQ(est, doc["parameters"][rows[i][0]].get<double>());
        EXPECT_EQ(std::stod(rows[i][2]), doc["std_errors"][rows[i][0]].get<double>());
        EXPECT_NEAR(std::stod(rows[i][3]), est / std::stod(rows[i][2]), 1e-12 * std::abs(est / std::stod(rows[i][2])));
    }
    write("bad.json", "[]");
    EXPECT_EQ(run("export " + path("bad.json").string()).code, 1);
}
