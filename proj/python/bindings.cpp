#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "rsgarch/bekk.hpp"
#include "rsgarch/diagnostics.hpp"
#include "rsgarch/estimation.hpp"
#include "rsgarch/regime.hpp"
#include "rsgarch/serialize.hpp"
#include "rsgarch/simulate.hpp"

namespace py = pybind11;
using namespace rsgarch;
using nlohmann::json;

namespace {

// Parameters cross the boundary as JSON text in the result-file layout.
ModelParams parse_params(const std::string& text) { return params_from_json(json::parse(text)); }

ExcessReturnSeries to_series(const std::vector<double>& rm, const std::vector<double>& rb) {
    return validate_series({ExcessReturnSeries::monthly_dates(simulate::kSimulationStart, rm.size()), rm, rb});
}

py::dict stats_dict(const diagnostics::SummaryStats& s) {
    json j = s;
    return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Regime-switching BEKK-in-mean estimation";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<EstimationError>(m, "EstimationError", PyExc_RuntimeError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def(
        "simulate",
        [](const std::string& params, std::size_t n, std::uint64_t seed) -> py::tuple {
            const auto p = parse_params(params);
                        if (const auto* rs = std::get_if<RsModelParams>(&p)) {
                auto sim = simulate::simulate_rs(*rs, n, simulate::default_h0(rs->regime1), seed);
                return py::make_tuple(sim.series.rm(), sim.series.rb(), sim.states);
            }
            const auto s = simulate::simulate_single(std::get<BekkParams>(p), n, simulate::default_h0(std::get<BekkParams>(p)), seed);
            return py::make_tuple(s.rm(), s.rb(), py::none());
        },
        py::arg("params"), py::arg("n"), py::arg("seed") = 0,
        "Simulates (rm, rb, states) from a JSON parameter document; states is None for one regime.");

    m.def(
        "fit",
        [](const std::vector<double>& rm, const std::vector<double>& rb, int regimes, bool restricted, int restarts,
           std::uint64_t seed, bool std_errors) {
            OptimizerConfig cfg;
            cfg.n_restarts = restarts;
            cfg.seed = seed;
            cfg.compute_std_errors = std_errors;
            const auto series = to_series(rm, rb);
            EstimationResult r;
            {
                py::gil_scoped_release release;
                r = fit(series, {regimes, restricted}, cfg);
            }
            return result_to_json(r).dump();
        },
        py::arg("rm"), py::arg("rb"), py::arg("regimes") = 1, py::arg("restricted") = false, py::arg("restarts") = 3,
        py::arg("seed") = 0, py::arg("std_errors") = true, "Fits the model and returns the result as JSON text.");

    m.def(
        "log_likelihood",
        [](const std::vector<double>& rm, const std::vector<double>& rb, const std::string& params) {
            const auto series = to_series(rm, rb);
            const auto p = parse_params(params);
            if (const auto* rs = std::get_if<RsModelParams>(&p)) return regime::rs_log_likelihood(series, *rs).loglik;
            return bekk::log_likelihood(series, std::get<BekkParams>(p)).loglik;
        },
        py::arg("rm"), py::arg("rb"), py::arg("params"),
        "Log-likelihood with the sample covariance as the pre-sample covariance.");

    m.def(
        "summary_stats", [](const std::vector<double>& x, std::size_t lags) { return stats_dict(diagnostics::summary_stats(x, lags)); },
        py::arg("x"), py::arg("lags") = diagnostics::kDefaultLags);
}
