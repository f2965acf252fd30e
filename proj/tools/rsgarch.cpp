#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "rsgarch/bekk.hpp"
#include "rsgarch/data_io.hpp"
#include "rsgarch/diagnostics.hpp"
#include "rsgarch/estimation.hpp"
#include "rsgarch/premium.hpp"
#include "rsgarch/regime.hpp"
#include "rsgarch/serialize.hpp"
#include "rsgarch/simulate.hpp"

namespace {

using namespace rsgarch;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;

/// Writes to the file when a path is given, to stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw InputError(fmt::format("cannot write '{}'", path));
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

struct InputOptions {
    std::string path;
    std::string market;
    std::string hedge;
    std::string units = "auto";
};

data::CsvSchema schema_for(const InputOptions& in) {
    data::CsvSchema schema;
    if (in.units == "percent") schema.units = data::Units::percent;
    if (in.units == "decimal") schema.units = data::Units::decimal;
    return schema;
}

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("input", in.path, "Monthly CSV with a date column")->required();
    cmd->add_option("--market", in.market, "Market excess-return column (default: first value column)");
    cmd->add_option("--hedge", in.hedge, "Hedge excess-return column (default: second value column)");
    cmd->add_option("--units", in.units, "Value units")->check(CLI::IsMember({"auto", "decimal", "percent"}));
}

ExcessReturnSeries load_series(const InputOptions& in) {
    const auto table = data::load_csv(in.path, schema_for(in));
    if (table.names.size() < 2 && (in.market.empty() || in.hedge.empty())) {
        throw InputError(fmt::format("{}: need two value columns, found {}", in.path, table.names.size()));
    }
    const std::string market = in.market.empty() ? table.names[0] : in.market;
    const std::string hedge = in.hedge.empty() ? table.names[1] : in.hedge;
    return data::to_series(table, market, hedge);
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
    InputOptions in;
    std::vector<std::string> columns;
    bool json = false;
    std::string out;
    std::size_t lags = diagnostics::kDefaultLags;
};

int run_stats(const StatsArgs& a) {
    auto schema = schema_for(a.in);
    schema.value_columns = a.columns;
    const auto table = data::load_csv(a.in.path, schema);
    std::vector<diagnostics::SummaryStats> stats;
    for (const auto& col : table.columns) stats.push_back(diagnostics::summary_stats(col, a.lags));

    if (a.json) {
        json doc = json::array();
        for (std::size_t i = 0; i < stats.size(); ++i) {
            json row = stats[i];
            row["column"] = table.names[i];
            doc.push_back(row);
        }
        std::cout << doc.dump(2) << '\n';
    } else {
        fmt::print("{:<12} {:>6} {:>12} {:>12} {:>9} {:>9} {:>12} {:>9} {:>12} {:>9} {:>12} {:>9}\n", "column", "n",
                   "mean", "std", "skew", "kurt", "JB", "p(JB)", "LB", "p(LB)", "LB2", "p(LB2)");
        for (std::size_t i = 0; i < stats.size(); ++i) {
            const auto& s = stats[i];
            fmt::print("{:<12} {:>6} {:>12.6g} {:>12.6g} {:>9.4f} {:>9.4f} {:>12.4f} {:>9.4f} {:>12.4f} {:>9.4f} "
                       "{:>12.4f} {:>9.4f}\n",
                       table.names[i], s.n, s.mean, s.std_dev, s.skewness, s.kurtosis, s.jarque_bera.statistic,
                       s.jarque_bera.p_value, s.ljung_box.statistic, s.ljung_box.p_value,
                       s.ljung_box_squares.statistic, s.ljung_box_squares.p_value);
        }
    }
    if (!a.out.empty()) {
        Output out(a.out);
        auto& os = out.stream();
        os << "column,n,mean,std,skewness,kurtosis,jb,jb_p,lb,lb_p,lb_sq,lb_sq_p\n";
        for (std::size_t i = 0; i < stats.size(); ++i) {
            const auto& s = stats[i];
            os << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", table.names[i], s.n, s.mean, s.std_dev,
                              s.skewness, s.kurtosis, s.jarque_bera.statistic, s.jarque_bera.p_value,
                              s.ljung_box.statistic, s.ljung_box.p_value, s.ljung_box_squares.statistic,
                              s.ljung_box_squares.p_value);
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
    InputOptions in;
    int regimes = 1;
    bool restricted = false;
    int restarts = 3;
    std::uint64_t seed = 0;
    int max_iterations = 2000;
    bool no_std_errors = false;
    std::string out;
    std::string dummy_from;
    double threshold = 0.75;
    bool dummy_smoothed = false;
    std::string dummy_variant = "interaction";
};

int run_fit(const FitArgs& a) {
    const auto series = load_series(a.in);
    OptimizerConfig cfg;
    cfg.n_restarts = a.restarts;
    cfg.seed = a.seed;
    cfg.max_iterations = a.max_iterations;
    cfg.compute_std_errors = !a.no_std_errors;
    cfg.validate();

    EstimationResult result;
    if (!a.dummy_from.empty()) {
        const auto source = load_result(a.dummy_from);
        if (source.n_obs != 0 && source.n_obs != series.size()) {
            throw InputError(fmt::format("{} was fitted on {} observations but {} has {}", a.dummy_from,
                                         source.n_obs, a.in.path, series.size()));
        }
        const auto filter = filter_result(source, series);
        const auto& path = a.dummy_smoothed ? filter.smoothed : filter.filtered;
        std::vector<double> high(path.size());
        for (std::size_t t = 0; t < path.size(); ++t) high[t] = path[t][1];
        premium::DummyOptions opts;
        opts.threshold = a.threshold;
        opts.restricted = a.restricted;
        opts.variant = a.dummy_variant == "level" ? DummyVariant::level : DummyVariant::interaction;
        result = premium::fit_dummy_model(series, high, opts, cfg);
    } else {
        result = fit(series, {a.regimes, a.restricted}, cfg);
    }

    Output out(a.out);
    out.stream() << result_to_json(result).dump(2) << '\n';
    if (!a.out.empty()) {
        fmt::print(stderr, "loglik {:.6f}, converged {}, {} iterations; wrote {}\n", result.loglik, result.converged,
                   result.n_iterations, a.out);
    }
    return result.converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------- filter

struct FilterArgs {
    InputOptions in;
    std::string result;
    std::string out;
};

EstimationResult load_matching_result(const std::string& path, const ExcessReturnSeries& series) {
    auto result = load_result(path);
    if (result.n_obs != 0 && result.n_obs != series.size()) {
        throw InputError(fmt::format("{} was fitted on {} observations but the input has {}", path, result.n_obs,
                                     series.size()));
    }
    return result;
}

int run_filter(const FilterArgs& a) {
    const auto series = load_series(a.in);
    const auto result = load_matching_result(a.result, series);
    if (!std::holds_alternative<RsModelParams>(result.params)) {
        throw InputError(fmt::format("{} holds a single-regime result; filter needs two regimes", a.result));
    }
    const auto f = filter_result(result, series);
    Output out(a.out);
    auto& os = out.stream();
    os << "date,ex_ante_1,ex_ante_2,filtered_1,filtered_2,smoothed_1,smoothed_2,"
          "var_m_1,var_m_2,var_b_1,var_b_2,cov_mb_1,cov_mb_2,var_m_1_x1e4,var_m_2_x1e4\n";
    for (std::size_t t = 0; t < f.size(); ++t) {
        const auto& h = f.state_cov[t];
        os << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", series.dates()[t].str(), f.ex_ante[t][0],
                          f.ex_ante[t][1], f.filtered[t][0], f.filtered[t][1], f.smoothed[t][0], f.smoothed[t][1],
                          h[0].smm(), h[1].smm(), h[0].sbb(), h[1].sbb(), h[0].smb(), h[1].smb(), 1e4 * h[0].smm(),
                          1e4 * h[1].smm());
    }
    return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    int regimes = 1;
    std::string params;
    std::size_t length = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string start = "1900-01";
};

int run_simulate(const SimulateArgs& a) {
    std::ifstream in(a.params);
    if (!in) throw InputError(fmt::format("cannot open '{}'", a.params));
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InputError(fmt::format("{}: invalid JSON: {}", a.params, e.what()));
    }
    ModelParams params;
    try {
        params = params_from_json(doc);
    } catch (const json::exception& e) {
        throw InputError(fmt::format("{}: malformed parameters: {}", a.params, e.what()));
    }
    const bool two = std::holds_alternative<RsModelParams>(params);
    if (two != (a.regimes == 2) || std::holds_alternative<DummyModelParams>(params)) {
        throw InputError(fmt::format("{} does not hold {}-regime parameters", a.params, a.regimes));
    }
    const YearMonth start = YearMonth::parse(a.start);

    data::MonthlyTable table;
    std::optional<ExcessReturnSeries> series;
    std::vector<int> states;
    if (two) {
        const auto& rs = std::get<RsModelParams>(params);
        rs.validate();
        const Cov2 h0 = doc.contains("h0") ? cov2_from_json(doc.at("h0")) : simulate::default_h0(rs.regime1);
        auto sim = simulate::simulate_rs(rs, a.length, h0, a.seed);
        series.emplace(std::move(sim.series));
        states = std::move(sim.states);
    } else {
        const auto& b = std::get<BekkParams>(params);
        const Cov2 h0 = doc.contains("h0") ? cov2_from_json(doc.at("h0")) : simulate::default_h0(b);
        series.emplace(simulate::simulate_single(b, a.length, h0, a.seed));
    }
    const auto dates = ExcessReturnSeries::monthly_dates(start, series->size());
    table.add_column("rm", {dates, series->rm()});
    table.add_column("rb", {dates, series->rb()});
    if (two) {
        std::vector<double> s(states.begin(), states.end());
        table.add_column("state", {dates, s});
    }
    Output out(a.out);
    data::write_csv(out.stream(), table);
    return kExitOk;
}

// ---------------------------------------------------------------- premium

struct PremiumArgs {
    InputOptions in;
    std::string result;
    bool annualize = false;
    bool json = false;
    std::string out;
};

int run_premium(const PremiumArgs& a) {
    const auto series = load_series(a.in);
    const auto result = load_matching_result(a.result, series);
    premium::PremiumPaths paths;
    std::string model;
    if (const auto* b = std::get_if<BekkParams>(&result.params)) {
        model = "single";
        const auto path = bekk::log_likelihood(series.observations(), *b, result.h0, {result.eps0});
        paths = premium::linear_premium(b->mean, path.cov);
    } else if (const auto* rs = std::get_if<RsModelParams>(&result.params)) {
        model = "regime_switching";
        paths = premium::rs_premium(*rs, filter_result(result, series));
    } else {
        throw InputError("premium decomposition is defined for single-regime and regime-switching results");
    }
    if (!a.out.empty()) data::write_csv(a.out, premium::premium_table(series.dates(), paths));

    const double scale = a.annualize ? 12.0 : 1.0;
    const double med_market = scale * premium::median(paths.market);
    const double med_hedge = scale * premium::median(paths.hedge);
    const double med_total = scale * premium::median(paths.total);
    if (a.json) {
        const json doc{{"model", model},
                       {"annualized", a.annualize},
                       {"n", series.size()},
                       {"median", {{"market", med_market}, {"hedge", med_hedge}, {"total", med_total}}}};
        std::cout << doc.dump(2) << '\n';
    } else {
        fmt::print("model {}, {} months, {} medians\n", model, series.size(), a.annualize ? "annualized" : "monthly");
        fmt::print("{:<8} {:>12.6f}\n{:<8} {:>12.6f}\n{:<8} {:>12.6f}\n", "market", med_market, "hedge", med_hedge,
                   "total", med_total);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- prepare

struct PrepareArgs {
    std::string path;
    std::string market_total;
    std::string rf;
    std::vector<std::string> bond_yields;
    std::vector<int> maturities;
    std::string units = "auto";
    std::string out;
};

int run_prepare(const PrepareArgs& a) {
    if (a.bond_yields.size() != a.maturities.size()) {
        throw InputError(fmt::format("{} bond yield columns but {} maturities", a.bond_yields.size(),
                                     a.maturities.size()));
    }
    InputOptions io;
    io.units = a.units;
    const auto table = data::load_csv(a.path, schema_for(io));
    const auto rf = table.column(a.rf);
    std::vector<data::MonthlyColumn> bonds;
    for (std::size_t i = 0; i < a.bond_yields.size(); ++i) {
        bonds.push_back(data::bond_total_return(table.column(a.bond_yields[i]), a.maturities[i]));
    }
    const auto bond = data::equal_weight(bonds);
    const YearMonth first = bond.dates.front();
    const auto rf_aligned = rf.slice(first);
    const auto rm = data::excess_returns(table.column(a.market_total).slice(first), rf_aligned);
    const auto rb = data::excess_returns(bond, rf_aligned);
    data::MonthlyTable out;
    out.add_column("rm", rm);
    out.add_column("rb", rb);
    (void)data::to_series(out, "rm", "rb");
    Output o(a.out);
    data::write_csv(o.stream(), out);
    return kExitOk;
}

// ---------------------------------------------------------------- export

struct ExportArgs {
    std::string result;
    std::string out;
};

/// Free parameters of a result as name, estimate, std_error, t_stat rows; missing errors stay blank.
int run_export(const ExportArgs& a) {
    const auto result = load_result(a.result);
    const auto values = parameter_values(result.params);
    Output out(a.out);
    auto& os = out.stream();
    os << "name,estimate,std_error,t_stat\n";
    for (const auto& name : free_parameter_names(result.params, result.spec.restricted)) {
        const auto v = std::find_if(values.begin(), values.end(), [&](const NamedValue& x) { return x.name == name; });
        const auto se = std::find_if(result.std_errors.begin(), result.std_errors.end(),
                                     [&](const NamedValue& x) { return x.name == name; });
        os << name << ',' << fmt::format("{}", v->value);
        if (se != result.std_errors.end() && std::isfinite(se->value) && se->value > 0.0) {
            os << ',' << fmt::format("{}", se->value) << ',' << fmt::format("{}", v->value / se->value);
        } else {
            os << ",,";
        }
        os << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bivariate GARCH-in-mean with Markov regime switching: estimation and diagnostics"};
    app.require_subcommand(1);

    StatsArgs stats;
    auto* c_stats = app.add_subcommand("stats", "Summary statistics per column");
    c_stats->add_option("input", stats.in.path, "Monthly CSV")->required();
    c_stats->add_option("--columns", stats.columns, "Columns to summarize (default: all)")->delimiter(',');
    c_stats->add_option("--units", stats.in.units, "Value units")->check(CLI::IsMember({"auto", "decimal", "percent"}));
    c_stats->add_option("--lags", stats.lags, "Ljung-Box lags")->check(CLI::PositiveNumber);
    c_stats->add_flag("--json", stats.json, "Machine-readable output");
    c_stats->add_option("--out", stats.out, "Also write the statistics as CSV");

    FitArgs fit_args;
    auto* c_fit = app.add_subcommand("fit", "Quasi-maximum-likelihood estimation");
    add_input_options(c_fit, fit_args.in);
    c_fit->add_option("--regimes", fit_args.regimes, "Number of regimes")->check(CLI::IsMember({1, 2}));
    c_fit->add_flag("--restricted", fit_args.restricted, "Pin lambda21 = lambda22 = 0");
    c_fit->add_option("--restarts", fit_args.restarts, "Optimizer restarts")->check(CLI::PositiveNumber);
    c_fit->add_option("--seed", fit_args.seed, "Seed for restart jitter");
    c_fit->add_option("--max-iterations", fit_args.max_iterations, "Iteration cap per optimizer stage")
        ->check(CLI::PositiveNumber);
    c_fit->add_flag("--no-std-errors", fit_args.no_std_errors, "Skip robust standard errors");
    c_fit->add_option("--out", fit_args.out, "Result JSON (default: stdout)");
    auto* dummy_opt = c_fit->add_option("--dummy-from", fit_args.dummy_from,
                                        "Two-regime result whose high-volatility probabilities define the dummy");
    c_fit->add_option("--threshold", fit_args.threshold, "Dummy probability threshold")->needs(dummy_opt);
    c_fit->add_flag("--smoothed", fit_args.dummy_smoothed, "Use smoothed instead of filtered probabilities")
        ->needs(dummy_opt);
    c_fit->add_option("--dummy-variant", fit_args.dummy_variant, "Dummy terms")
        ->check(CLI::IsMember({"interaction", "level"}))
        ->needs(dummy_opt);

    FilterArgs filter_args;
    auto* c_filter = app.add_subcommand("filter", "State probabilities and per-state variances of a two-regime fit");
    add_input_options(c_filter, filter_args.in);
    c_filter->add_option("result", filter_args.result, "Result JSON from fit --regimes 2")->required();
    c_filter->add_option("--out", filter_args.out, "Output CSV (default: stdout)");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Draw a synthetic series");
    c_sim->add_option("--regimes", sim.regimes, "Number of regimes")->check(CLI::IsMember({1, 2}));
    c_sim->add_option("--params", sim.params, "Parameter JSON (result document or bare block)")->required();
    c_sim->add_option("--T", sim.length, "Number of months")->required()->check(CLI::PositiveNumber);
    c_sim->add_option("--seed", sim.seed, "Random seed");
    c_sim->add_option("--start", sim.start, "First month (YYYY-MM)");
    c_sim->add_option("--out", sim.out, "Output CSV (default: stdout)");

    PremiumArgs prem;
    auto* c_prem = app.add_subcommand("premium", "Risk-premium decomposition of a fitted model");
    add_input_options(c_prem, prem.in);
    c_prem->add_option("result", prem.result, "Result JSON")->required();
    c_prem->add_flag("--annualize", prem.annualize, "Report medians times 12");
    c_prem->add_flag("--json", prem.json, "Machine-readable medians");
    c_prem->add_option("--out", prem.out, "Monthly premium CSV (date, market, hedge, total)");

    PrepareArgs prep;
    auto* c_prep = app.add_subcommand("prepare", "Build excess returns from total returns and yields");
    c_prep->add_option("input", prep.path, "Monthly CSV of raw series")->required();
    c_prep->add_option("--market-total", prep.market_total, "Market total-return column")->required();
    c_prep->add_option("--rf", prep.rf, "Annualized T-bill yield column")->required();
    c_prep->add_option("--bond-yields", prep.bond_yields, "Constant-maturity yield columns")
        ->required()
        ->delimiter(',');
    c_prep->add_option("--maturities", prep.maturities, "Maturity in years per yield column")
        ->required()
        ->delimiter(',');
    c_prep->add_option("--units", prep.units, "Value units")->check(CLI::IsMember({"auto", "decimal", "percent"}));
    c_prep->add_option("--out", prep.out, "Output CSV (default: stdout)");

    ExportArgs exp;
    auto* c_export = app.add_subcommand("export", "Parameter table of a fitted result as CSV");
    c_export->add_option("result", exp.result, "Result JSON")->required();
    c_export->add_option("--out", exp.out, "Output CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*c_stats) return run_stats(stats);
        if (*c_fit) return run_fit(fit_args);
        if (*c_filter) return run_filter(filter_args);
        if (*c_sim) return run_simulate(sim);
        if (*c_prem) return run_premium(prem);
        if (*c_prep) return run_prepare(prep);
        if (*c_export) return run_export(exp);
    } catch (const EstimationError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitNotConverged;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitInput;
    }
    return kExitInput;
}
