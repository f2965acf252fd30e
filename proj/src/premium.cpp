#include "rsgarch/premium.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace rsgarch::premium {

PremiumPaths linear_premium(const MeanParams& mean, std::span<const Cov2> h_path) {
    PremiumPaths out;
    out.market.reserve(h_path.size());
    out.hedge.reserve(h_path.size());
    out.total.reserve(h_path.size());
    for (const auto& h : h_path) {
        const double m = mean.l11 * h.smm();
        const double b = mean.l12 * h.smb();
        out.market.push_back(m);
        out.hedge.push_back(b);
        out.total.push_back(m + b);
    }
    return out;
}

PremiumPaths rs_premium(const RsModelParams& params, const FilterOutput& filter) {
    if (filter.smoothed.size() != filter.state_cov.size()) {
        throw InputError("filter output has no smoothed probabilities aligned with the state covariances");
    }
    const MeanParams& m1 = params.regime1.mean;
    const MeanParams& m2 = params.regime2.mean;
    PremiumPaths out;
    const std::size_t n = filter.state_cov.size();
    out.market.reserve(n);
    out.hedge.reserve(n);
    out.total.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        const auto& pr = filter.smoothed[t];
        const auto& h = filter.state_cov[t];
        const double m = pr[0] * m1.l11 * h[0].smm() + pr[1] * m2.l11 * h[1].smm();
        const double b = pr[0] * m1.l12 * h[0].smb() + pr[1] * m2.l12 * h[1].smb();
        out.market.push_back(m);
        out.hedge.push_back(b);
        out.total.push_back(m + b);
    }
    return out;
}

double median(std::span<const double> values) {
    if (values.empty()) throw InputError("median of an empty path");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

double annualized_median_premium(std::span<const double> total) { return 12.0 * median(total); }

data::MonthlyTable premium_table(const std::vector<YearMonth>& dates, const PremiumPaths& paths) {
    data::MonthlyTable t;
    t.add_column("market", {dates, paths.market});
    t.add_column("hedge", {dates, paths.hedge});
    t.add_column("total", {dates, paths.total});
    return t;
}

std::vector<int> high_volatility_dummy(std::span<const double> high_prob, double threshold) {
    std::vector<int> d(high_prob.size());
    for (std::size_t i = 0; i < high_prob.size(); ++i) d[i] = high_prob[i] > threshold ? 1 : 0;
    return d;
}

EstimationResult fit_dummy_model(const ExcessReturnSeries& series, std::span<const double> high_prob,
                                 const DummyOptions& opts, const OptimizerConfig& cfg) {
    cfg.validate();
    if (high_prob.size() != series.size()) {
        throw InputError(fmt::format("probability path length {} does not match series length {}", high_prob.size(),
                                     series.size()));
    }
    const auto dummy = high_volatility_dummy(high_prob, opts.threshold);
    const auto ones = std::count(dummy.begin(), dummy.end(), 1);
    if (ones == 0 || ones == static_cast<std::ptrdiff_t>(dummy.size())) {
        throw InputError(fmt::format("degenerate dummy: {} of {} months above threshold {}", ones, dummy.size(),
                                     opts.threshold));
    }
    const auto obs = series.observations();
    EstimationResult result;
    result.spec = {1, opts.restricted};
    result.n_obs = obs.size();
    result.h0 = sample_covariance(obs);
    result.dummy = dummy;

    DummyModelParams start;
    start.base = std::get<BekkParams>(estimation::starting_values(obs, result.spec));
    start.variant = opts.variant;
    const auto problem = estimation::make_dummy_problem(obs, start, opts.restricted, dummy, result.h0, result.eps0);
    const auto best = estimation::maximize(problem, cfg);

    auto params = std::get<DummyModelParams>(from_unconstrained(best.u, start, opts.restricted));
    params.base = canonical_signs(params.base);
    result.params = params;
    result.loglik = best.loglik;
    result.n_iterations = best.iterations;
    result.n_restarts = best.restarts;
    result.converged = best.converged;
    if (cfg.compute_std_errors) {
        if (!result.converged) {
            result.std_error_note = "not computed: optimizer did not converge";
        } else {
            try {
                result.std_errors = robust_std_errors(result, series);
            } catch (const EstimationError& e) {
                result.std_error_note = e.what();
            }
        }
    }
    return result;
}

}  // namespace rsgarch::premium
