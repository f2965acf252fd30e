#include "rsgarch/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "rsgarch/optimize.hpp"

namespace rsgarch {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Starting-value magnitudes for the shock and persistence diagonals.
constexpr double kStartA = 0.2;
constexpr double kStartB = 0.9;
constexpr double kStartP = 0.85;
constexpr double kStartQ = 0.75;
// C multipliers that separate the two regimes at the start.
constexpr double kCalmScale = 0.6;
constexpr double kTurbulentScale = 1.6;
constexpr double kJitterSd = 0.5;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double logit(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InputError(fmt::format("logit undefined for probability {}", p));
    return std::log(p / (1.0 - p));
}

double logistic(double u) { return u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u)); }

void append_bekk(std::vector<double>& v, const BekkParams& b, bool restricted) {
    v.insert(v.end(), {b.mean.l10, b.mean.l11, b.mean.l12, b.mean.l20});
    if (!restricted) v.insert(v.end(), {b.mean.l21, b.mean.l22});
    v.insert(v.end(), {b.c11, b.c12, b.c22, b.a11, b.a22, b.b11, b.b22});
}

BekkParams read_bekk(std::span<const double> u, std::size_t& i, bool restricted) {
    BekkParams b;
    b.mean.l10 = u[i++];
    b.mean.l11 = u[i++];
    b.mean.l12 = u[i++];
    b.mean.l20 = u[i++];
    if (!restricted) {
        b.mean.l21 = u[i++];
        b.mean.l22 = u[i++];
    }
    b.c11 = u[i++];
    b.c12 = u[i++];
    b.c22 = u[i++];
    b.a11 = u[i++];
    b.a22 = u[i++];
    b.b11 = u[i++];
    b.b22 = u[i++];
    return b;
}

std::size_t bekk_size(bool restricted) { return restricted ? 11 : 13; }

const std::vector<std::string>& bekk_names() {
    static const std::vector<std::string> names{"lambda10", "lambda11", "lambda12", "lambda20", "lambda21",
                                                "lambda22", "c11",      "c12",      "c22",      "a11",
                                                "a22",      "b11",      "b22"};
    return names;
}

void append_bekk_values(std::vector<NamedValue>& out, const BekkParams& b, const std::string& suffix) {
    const std::array<double, 13> v{b.mean.l10, b.mean.l11, b.mean.l12, b.mean.l20, b.mean.l21, b.mean.l22, b.c11,
                                   b.c12,      b.c22,      b.a11,      b.a22,      b.b11,      b.b22};
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back({bekk_names()[i] + suffix, v[i]});
}

void append_bekk_names(std::vector<std::string>& out, bool restricted, const std::string& suffix) {
    for (const auto& n : bekk_names()) {
        if (restricted && (n == "lambda21" || n == "lambda22")) continue;
        out.push_back(n + suffix);
    }
}

std::array<std::string, 2> dummy_names(DummyVariant v) {
    return v == DummyVariant::interaction ? std::array<std::string, 2>{"lambda11d", "lambda12d"}
                                          : std::array<std::string, 2>{"lambda10d", "lambda11d"};
}

std::array<double, 2> dummy_coefs(const DummyModelParams& d) {
    return d.variant == DummyVariant::interaction ? std::array<double, 2>{d.l11d, d.l12d}
                                                  : std::array<double, 2>{d.l10d, d.l11d};
}

void set_dummy_coefs(DummyModelParams& d, double x0, double x1) {
    if (d.variant == DummyVariant::interaction) {
        d.l11d = x0;
        d.l12d = x1;
    } else {
        d.l10d = x0;
        d.l11d = x1;
    }
}

struct MomentScales {
    double sd_m, sd_b, var_m, var_b, cov_typ;
};

MomentScales moment_scales(std::span<const Vec2> obs) {
    const Cov2 s = sample_covariance(obs);
    return {std::sqrt(s.smm()), std::sqrt(s.sbb()), s.smm(), s.sbb(), std::sqrt(s.smm() * s.sbb())};
}

void append_bekk_scales(std::vector<double>& v, const MomentScales& m, bool restricted) {
    v.insert(v.end(), {0.5 * m.sd_m, 0.5 * m.sd_m / m.var_m, 0.5 * m.sd_m / m.cov_typ, 0.5 * m.sd_b});
    if (!restricted) v.insert(v.end(), {0.5 * m.sd_b / m.cov_typ, 0.5 * m.sd_b / m.var_b});
    v.insert(v.end(), {0.2 * m.sd_m, 0.2 * m.sd_b, 0.2 * m.sd_b, 0.1, 0.1, 0.05, 0.05});
}

BekkParams pin_restricted(BekkParams b, bool restricted) {
    if (restricted) {
        b.mean.l21 = 0.0;
        b.mean.l22 = 0.0;
    }
    return b;
}

template <class F>
auto guarded(F&& f) {
    return [f = std::forward<F>(f)](std::span<const double> u) -> double {
        try {
            const double v = f(u);
            return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
        } catch (const Error&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
}

}  // namespace

void OptimizerConfig::validate() const {
    if (n_restarts < 1) throw InputError("n_restarts must be >= 1");
    if (max_iterations < 1) throw InputError("max_iterations must be >= 1");
    if (!(loglik_tol > 0.0)) throw InputError("loglik_tol must be > 0");
    if (!(param_tol > 0.0)) throw InputError("param_tol must be > 0");
}

std::vector<NamedValue> parameter_values(const ModelParams& params) {
    std::vector<NamedValue> out;
    std::visit(Overloaded{
                   [&](const BekkParams& b) { append_bekk_values(out, b, ""); },
                   [&](const RsModelParams& rs) {
                       append_bekk_values(out, rs.regime1, "_s1");
                       append_bekk_values(out, rs.regime2, "_s2");
                       out.push_back({"p", rs.p});
                       out.push_back({"q", rs.q});
                   },
                   [&](const DummyModelParams& d) {
                       append_bekk_values(out, d.base, "");
                       const auto names = dummy_names(d.variant);
                       const auto coefs = dummy_coefs(d);
                       out.push_back({names[0], coefs[0]});
                       out.push_back({names[1], coefs[1]});
                   },
               },
               params);
    return out;
}

std::vector<std::string> free_parameter_names(const ModelParams& params, bool restricted) {
    std::vector<std::string> out;
    std::visit(Overloaded{
                   [&](const BekkParams&) { append_bekk_names(out, restricted, ""); },
                   [&](const RsModelParams&) {
                       append_bekk_names(out, restricted, "_s1");
                       append_bekk_names(out, restricted, "_s2");
                       out.emplace_back("p");
                       out.emplace_back("q");
                   },
                   [&](const DummyModelParams& d) {
                       append_bekk_names(out, restricted, "");
                       const auto names = dummy_names(d.variant);
                       out.insert(out.end(), names.begin(), names.end());
                   },
               },
               params);
    return out;
}

std::vector<double> to_unconstrained(const ModelParams& params, bool restricted) {
    std::vector<double> u;
    std::visit(Overloaded{
                   [&](const BekkParams& b) { append_bekk(u, b, restricted); },
                   [&](const RsModelParams& rs) {
                       append_bekk(u, rs.regime1, restricted);
                       append_bekk(u, rs.regime2, restricted);
                       u.push_back(logit(rs.p));
                       u.push_back(logit(rs.q));
                   },
                   [&](const DummyModelParams& d) {
                       append_bekk(u, d.base, restricted);
                       const auto c = dummy_coefs(d);
                       u.insert(u.end(), c.begin(), c.end());
                   },
               },
               params);
    return u;
}

ModelParams from_unconstrained(std::span<const double> u, const ModelParams& like, bool restricted) {
    const std::size_t nb = bekk_size(restricted);
    return std::visit(
        Overloaded{
            [&](const BekkParams&) -> ModelParams {
                if (u.size() != nb) throw InputError(fmt::format("expected {} coordinates, got {}", nb, u.size()));
                std::size_t i = 0;
                return read_bekk(u, i, restricted);
            },
            [&](const RsModelParams&) -> ModelParams {
                if (u.size() != 2 * nb + 2) {
                    throw InputError(fmt::format("expected {} coordinates, got {}", 2 * nb + 2, u.size()));
                }
                std::size_t i = 0;
                RsModelParams rs;
                rs.regime1 = read_bekk(u, i, restricted);
                rs.regime2 = read_bekk(u, i, restricted);
                rs.p = logistic(u[i++]);
                rs.q = logistic(u[i++]);
                return rs;
            },
            [&](const DummyModelParams& d) -> ModelParams {
                if (u.size() != nb + 2) throw InputError(fmt::format("expected {} coordinates, got {}", nb + 2, u.size()));
                std::size_t i = 0;
                DummyModelParams out;
                out.variant = d.variant;
                out.base = read_bekk(u, i, restricted);
                set_dummy_coefs(out, u[i], u[i + 1]);
                return out;
            },
        },
        like);
}

std::vector<double> unconstrained_jacobian(const ModelParams& params, bool restricted) {
    const auto u = to_unconstrained(params, restricted);
    std::vector<double> jac(u.size(), 1.0);
    if (const auto* rs = std::get_if<RsModelParams>(&params)) {
        jac[u.size() - 2] = rs->p * (1.0 - rs->p);
        jac[u.size() - 1] = rs->q * (1.0 - rs->q);
    }
    return jac;
}

namespace estimation {

ProblemFit maximize(const LikelihoodProblem& problem, const OptimizerConfig& cfg) {
    cfg.validate();
    const std::size_t n = problem.start.size();
    if (problem.scale.size() != n) throw InputError("scale vector does not match start vector");

    auto scaled = [&](std::span<const double> z) {
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = z[i] * problem.scale[i];
        return problem.loglik(u);
    };
    const optim::Objective objective = guarded(scaled);

    std::vector<double> z0(n);
    for (std::size_t i = 0; i < n; ++i) z0[i] = problem.start[i] / problem.scale[i];

    auto run = [&](int restart) {
        std::vector<double> z = z0;
        if (restart > 0) {
            std::mt19937_64 rng(cfg.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(restart));
            std::normal_distribution<double> jitter(0.0, kJitterSd);
            for (auto& zi : z) zi += jitter(rng);
        }
        ProblemFit out;
        out.start_loglik = objective(z);
        optim::NelderMeadOptions nm_opts;
        nm_opts.max_iterations = cfg.max_iterations;
        nm_opts.value_tol = 1e-4;
        nm_opts.x_tol = 1e-3;
        const auto nm = optim::nelder_mead(objective, z, nm_opts);
        optim::BfgsOptions bf_opts;
        bf_opts.max_iterations = cfg.max_iterations;
        bf_opts.value_tol = cfg.loglik_tol;
        bf_opts.x_tol = cfg.param_tol;
        const auto bf = optim::bfgs(objective, nm.x, bf_opts);
        const auto& best = bf.value >= nm.value ? bf : nm;
        out.u.resize(n);
        for (std::size_t i = 0; i < n; ++i) out.u[i] = best.x[i] * problem.scale[i];
        out.loglik = best.value;
        out.iterations = nm.iterations + bf.iterations;
        out.converged = bf.converged && bf.value >= nm.value;
        return out;
    };

    std::vector<std::future<ProblemFit>> jobs;
    jobs.reserve(static_cast<std::size_t>(cfg.n_restarts));
    for (int r = 0; r < cfg.n_restarts; ++r) jobs.push_back(std::async(std::launch::async, run, r));

    std::optional<ProblemFit> best;
    for (auto& job : jobs) {
        ProblemFit fit = job.get();
        if (!std::isfinite(fit.loglik)) continue;
        if (!best || fit.loglik > best->loglik) best = std::move(fit);
    }
    if (!best) throw EstimationError("estimation failed: no restart reached a finite likelihood");
    best->restarts = cfg.n_restarts;
    return *best;
}

Sandwich sandwich_covariance(const LikelihoodProblem& problem, std::span<const double> u) {
    const std::size_t n = u.size();
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = u[i] / problem.scale[i];
    auto to_u = [&](std::span<const double> zz) {
        std::vector<double> uu(n);
        for (std::size_t i = 0; i < n; ++i) uu[i] = zz[i] * problem.scale[i];
        return uu;
    };
    const optim::Objective total = [&](std::span<const double> zz) {
        try {
            return problem.loglik(to_u(zz));
        } catch (const Error&) {
            return kNaN;
        }
    };
    const optim::VectorObjective per_obs = [&](std::span<const double> zz) {
        try {
            return problem.contributions(to_u(zz));
        } catch (const Error&) {
            return std::vector<double>{kNaN};
        }
    };

    const Eigen::MatrixXd hess = optim::numerical_hessian(total, z);
    const Eigen::MatrixXd scores = optim::numerical_jacobian(per_obs, z);
    if (!hess.allFinite() || !scores.allFinite()) {
        throw EstimationError("singular information matrix: non-finite derivatives at the estimate");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
    const Eigen::VectorXd& ev = eig.eigenvalues();
    const double max_abs = ev.cwiseAbs().maxCoeff();
    std::vector<std::string> tiny;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (!(std::abs(ev[i]) > 1e-10 * max_abs)) tiny.push_back(fmt::format("{:.3e}", ev[i]));
    }
    if (!tiny.empty()) {
        throw EstimationError(fmt::format("singular information matrix; near-zero eigenvalues: {}", fmt::join(tiny, ", ")));
    }
    const Eigen::MatrixXd hinv = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    const Eigen::MatrixXd opg = scores.transpose() * scores;

    const Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(problem.scale.data(), static_cast<Eigen::Index>(n));
    Sandwich out;
    out.robust = s.asDiagonal() * (hinv * opg * hinv) * s.asDiagonal();
    out.hessian_only = s.asDiagonal() * (-hinv) * s.asDiagonal();
    return out;
}

LikelihoodProblem make_problem(std::span<const Vec2> obs, const ModelParams& start, const ModelSpec& spec,
                               const Cov2& h0, const Vec2& eps0) {
    const bool restricted = spec.restricted;
    LikelihoodProblem problem;
    problem.start = to_unconstrained(start, restricted);
    problem.scale = coordinate_scales(obs, start, restricted);
    if (std::holds_alternative<BekkParams>(start)) {
        const bekk::LikelihoodOptions opts{eps0};
        problem.loglik = [=](std::span<const double> u) {
            const auto p = std::get<BekkParams>(from_unconstrained(u, BekkParams{}, restricted));
            return bekk::log_likelihood_value(obs, p, h0, opts);
        };
        problem.contributions = [=](std::span<const double> u) {
            const auto p = std::get<BekkParams>(from_unconstrained(u, BekkParams{}, restricted));
            return bekk::log_likelihood(obs, p, h0, opts).contributions;
        };
    } else if (std::holds_alternative<RsModelParams>(start)) {
        regime::RsOptions opts;
        opts.eps0 = eps0;
        problem.loglik = [=](std::span<const double> u) {
            const auto p = std::get<RsModelParams>(from_unconstrained(u, RsModelParams{}, restricted));
            return regime::rs_log_likelihood_value(obs, p, h0, opts);
        };
        problem.contributions = [=](std::span<const double> u) {
            const auto p = std::get<RsModelParams>(from_unconstrained(u, RsModelParams{}, restricted));
            return regime::rs_contributions(obs, p, h0, opts);
        };
    } else {
        throw InputError("make_problem: use make_dummy_problem for dummy-augmented models");
    }
    return problem;
}

LikelihoodProblem make_dummy_problem(std::span<const Vec2> obs, const DummyModelParams& start, bool restricted,
                                     std::span<const int> dummy, const Cov2& h0, const Vec2& eps0) {
    if (dummy.size() != obs.size()) {
        throw InputError(fmt::format("dummy path length {} does not match {} observations", dummy.size(), obs.size()));
    }
    LikelihoodProblem problem;
    problem.start = to_unconstrained(start, restricted);
    problem.scale = coordinate_scales(obs, start, restricted);
    const std::vector<int> d(dummy.begin(), dummy.end());
    problem.loglik = [=](std::span<const double> u) {
        const auto p = std::get<DummyModelParams>(from_unconstrained(u, start, restricted));
        return dummy_log_likelihood(obs, p, d, h0, eps0).loglik;
    };
    problem.contributions = [=](std::span<const double> u) {
        const auto p = std::get<DummyModelParams>(from_unconstrained(u, start, restricted));
        return dummy_log_likelihood(obs, p, d, h0, eps0).contributions;
    };
    return problem;
}

ModelParams starting_values(std::span<const Vec2> obs, const ModelSpec& spec) {
    const Cov2 s = sample_covariance(obs);
    const double k = std::sqrt(1.0 - kStartA * kStartA - kStartB * kStartB);
    const double l11 = std::sqrt(s.smm());
    const double l21 = s.smb() / l11;
    const double l22 = std::sqrt(std::max(s.sbb() - l21 * l21, 1e-12 * s.sbb()));
    auto block = [&](double mult) {
        BekkParams b;
        b.c11 = mult * k * l11;
        b.c12 = mult * k * l21;
        b.c22 = mult * k * l22;
        b.a11 = b.a22 = kStartA;
        b.b11 = b.b22 = kStartB;
        return b;
    };
    if (spec.n_regimes == 1) return block(1.0);
    if (spec.n_regimes != 2) throw InputError(fmt::format("n_regimes must be 1 or 2, got {}", spec.n_regimes));
    return RsModelParams{block(kCalmScale), block(kTurbulentScale), kStartP, kStartQ};
}

std::vector<double> coordinate_scales(std::span<const Vec2> obs, const ModelParams& params, bool restricted) {
    const MomentScales m = moment_scales(obs);
    std::vector<double> v;
    std::visit(Overloaded{
                   [&](const BekkParams&) { append_bekk_scales(v, m, restricted); },
                   [&](const RsModelParams&) {
                       append_bekk_scales(v, m, restricted);
                       append_bekk_scales(v, m, restricted);
                       v.insert(v.end(), {1.0, 1.0});
                   },
                   [&](const DummyModelParams& d) {
                       append_bekk_scales(v, m, restricted);
                       if (d.variant == DummyVariant::interaction) {
                           v.insert(v.end(), {0.5 * m.sd_m / m.var_m, 0.5 * m.sd_m / m.cov_typ});
                       } else {
                           v.insert(v.end(), {0.5 * m.sd_m, 0.5 * m.sd_m / m.var_m});
                       }
                   },
               },
               params);
    return v;
}

}  // namespace estimation

bekk::LikelihoodPath dummy_log_likelihood(std::span<const Vec2> obs, const DummyModelParams& params,
                                          std::span<const int> dummy, const Cov2& h0, const Vec2& eps0) {
    if (dummy.size() != obs.size()) {
        throw InputError(fmt::format("dummy path length {} does not match {} observations", dummy.size(), obs.size()));
    }
    const bool interaction = params.variant == DummyVariant::interaction;
    bekk::LikelihoodPath path;
    path.cov.reserve(obs.size());
    path.innov.reserve(obs.size());
    path.contributions.reserve(obs.size());
    path.loglik = bekk::detail::run_recursion(
        obs, params.base, h0, eps0,
        [&](std::size_t t, const Cov2& h) {
            Vec2 mu = bekk::conditional_mean(h, params.base.mean);
            if (dummy[t] != 0) {
                mu[0] += interaction ? params.l11d * h.smm() + params.l12d * h.smb()
                                     : params.l10d + params.l11d * h.smm();
            }
            return mu;
        },
        [&](std::size_t, const Cov2& h, const Vec2& e, double ld) {
            path.cov.push_back(h);
            path.innov.push_back(e);
            path.contributions.push_back(ld);
        });
    return path;
}

BekkParams canonical_signs(BekkParams b) {
    if (b.c11 < 0.0) {
        b.c11 = -b.c11;
        b.c12 = -b.c12;
    }
    if (b.c22 < 0.0) b.c22 = -b.c22;
    if (b.a11 < 0.0 || (b.a11 == 0.0 && b.a22 < 0.0)) {
        b.a11 = -b.a11;
        b.a22 = -b.a22;
    }
    if (b.b11 < 0.0 || (b.b11 == 0.0 && b.b22 < 0.0)) {
        b.b11 = -b.b11;
        b.b22 = -b.b22;
    }
    return b;
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return kNaN;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

std::string swap_suffix(const std::string& name) {
    if (name == "p") return "q";
    if (name == "q") return "p";
    if (name.ends_with("_s1")) return name.substr(0, name.size() - 3) + "_s2";
    if (name.ends_with("_s2")) return name.substr(0, name.size() - 3) + "_s1";
    return name;
}

}  // namespace

bool normalize_labels(RsModelParams& params, FilterOutput& filter) {
    std::vector<double> v1, v2;
    v1.reserve(filter.state_cov.size());
    v2.reserve(filter.state_cov.size());
    for (const auto& h : filter.state_cov) {
        v1.push_back(h[0].smm());
        v2.push_back(h[1].smm());
    }
    if (!(median(v1) > median(v2))) return false;
    std::swap(params.regime1, params.regime2);
    std::swap(params.p, params.q);
    auto flip = [](std::vector<Prob2>& path) {
        for (auto& x : path) std::swap(x[0], x[1]);
    };
    flip(filter.ex_ante);
    flip(filter.filtered);
    flip(filter.smoothed);
    for (auto& h : filter.state_cov) std::swap(h[0], h[1]);
    for (auto& m : filter.state_mean) std::swap(m[0], m[1]);
    return true;
}

EstimationResult normalize_labels(EstimationResult result, FilterOutput& filter) {
    auto* rs = std::get_if<RsModelParams>(&result.params);
    if (rs == nullptr) throw InputError("label normalization requires a two-regime result");
    if (normalize_labels(*rs, filter)) {
        for (auto& se : result.std_errors) se.name = swap_suffix(se.name);
        std::sort(result.std_errors.begin(), result.std_errors.end(), [&](const NamedValue& a, const NamedValue& b) {
            const auto names = parameter_values(result.params);
            auto pos = [&](const std::string& n) {
                return std::find_if(names.begin(), names.end(), [&](const NamedValue& x) { return x.name == n; }) -
                       names.begin();
            };
            return pos(a.name) < pos(b.name);
        });
    }
    return result;
}

FilterOutput filter_result(const EstimationResult& result, const ExcessReturnSeries& series) {
    const auto* rs = std::get_if<RsModelParams>(&result.params);
    if (rs == nullptr) throw InputError("filtering requires a two-regime result");
    regime::RsOptions opts;
    opts.eps0 = result.eps0;
    return regime::rs_log_likelihood(series.observations(), *rs, result.h0, opts).filter;
}

std::vector<NamedValue> robust_std_errors(const EstimationResult& result, const ExcessReturnSeries& series) {
    if (!result.converged) throw EstimationError("standard errors require a converged fit");
    const auto obs = series.observations();
    const bool restricted = result.spec.restricted;
    estimation::LikelihoodProblem problem;
    if (const auto* d = std::get_if<DummyModelParams>(&result.params)) {
        problem = estimation::make_dummy_problem(obs, *d, restricted, result.dummy, result.h0, result.eps0);
    } else {
        problem = estimation::make_problem(obs, result.params, result.spec, result.h0, result.eps0);
    }
    const auto u = to_unconstrained(result.params, restricted);
    const auto cov = estimation::sandwich_covariance(problem, u).robust;
    const auto jac = unconstrained_jacobian(result.params, restricted);
    const auto free_names = free_parameter_names(result.params, restricted);

    std::vector<NamedValue> out;
    for (const auto& [name, value] : parameter_values(result.params)) {
        const auto it = std::find(free_names.begin(), free_names.end(), name);
        if (it == free_names.end()) {
            out.push_back({name, kNaN});
            continue;
        }
        const auto i = static_cast<Eigen::Index>(it - free_names.begin());
        const double var = cov(i, i);
        out.push_back({name, var >= 0.0 ? std::abs(jac[static_cast<std::size_t>(i)]) * std::sqrt(var) : kNaN});
    }
    return out;
}

EstimationResult fit(const ExcessReturnSeries& series, const ModelSpec& spec, const OptimizerConfig& cfg) {
    cfg.validate();
    const auto obs = series.observations();
    EstimationResult result;
    result.spec = spec;
    result.n_obs = obs.size();
    result.h0 = sample_covariance(obs);
    result.eps0 = {0.0, 0.0};

    const ModelParams start = estimation::starting_values(obs, spec);
    const auto problem = estimation::make_problem(obs, start, spec, result.h0, result.eps0);
    const auto best = estimation::maximize(problem, cfg);

    ModelParams params = from_unconstrained(best.u, start, spec.restricted);
    if (auto* b = std::get_if<BekkParams>(&params)) {
        *b = pin_restricted(canonical_signs(*b), spec.restricted);
    } else if (auto* rs = std::get_if<RsModelParams>(&params)) {
        rs->regime1 = pin_restricted(canonical_signs(rs->regime1), spec.restricted);
        rs->regime2 = pin_restricted(canonical_signs(rs->regime2), spec.restricted);
    }
    result.params = params;
    result.loglik = best.loglik;
    result.n_iterations = best.iterations;
    result.n_restarts = best.restarts;
    result.converged = best.converged;

    if (spec.n_regimes == 2) {
        FilterOutput filter = filter_result(result, series);
        result = normalize_labels(std::move(result), filter);
    }
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

}  // namespace rsgarch
