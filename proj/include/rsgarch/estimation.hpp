#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "rsgarch/bekk.hpp"
#include "rsgarch/regime.hpp"
#include "rsgarch/types.hpp"

namespace rsgarch {

struct ModelSpec {
    int n_regimes = 1;  // 1 or 2
    /// Pins l21 = l22 = 0 (in both states for the regime-switching model).
    bool restricted = false;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct OptimizerConfig {
    int n_restarts = 3;
    int max_iterations = 2000;
    double loglik_tol = 1e-8;
    double param_tol = 1e-6;
    std::uint64_t seed = 0;
    bool compute_std_errors = true;

    /// Throws InputError unless counts >= 1 and tolerances > 0.
    void validate() const;
};

/// Which high-volatility interaction terms enter the market mean equation.
enum class DummyVariant {
    /// lambda11d * D * var_m + lambda12d * D * cov_mb
    interaction,
    /// lambda10d * D + lambda11d * D * var_m
    level,
};

/// Single-regime model with high-volatility dummy terms in the market equation.
struct DummyModelParams {
    BekkParams base;
    double l10d = 0.0;
    double l11d = 0.0;
    double l12d = 0.0;
    DummyVariant variant = DummyVariant::interaction;

    friend bool operator==(const DummyModelParams&, const DummyModelParams&) = default;
};

using ModelParams = std::variant<BekkParams, RsModelParams, DummyModelParams>;

struct NamedValue {
    std::string name;
    double value = 0.0;

    friend bool operator==(const NamedValue&, const NamedValue&) = default;
};

struct EstimationResult {
    ModelSpec spec;
    ModelParams params;
    /// Pre-sample covariance and innovation the likelihood was evaluated with.
    Cov2 h0 = Cov2::identity();
    Vec2 eps0{0.0, 0.0};
    double loglik = 0.0;
    /// Number of observations the model was fitted on.
    std::size_t n_obs = 0;
    /// Robust standard errors keyed like parameter_values(); NaN where undefined (pinned parameters).
    std::vector<NamedValue> std_errors;
    int n_iterations = 0;
    int n_restarts = 0;
    bool converged = false;
    /// Empty when standard errors were computed; otherwise why they were not.
    std::string std_error_note;
    /// 0/1 dummy path for DummyModelParams fits.
    std::vector<int> dummy;
};

/// Every parameter (including pinned ones) with its conventional name, e.g.
/// lambda11, c12, a22, b11; regime blocks carry a _s1/_s2 suffix.
[[nodiscard]] std::vector<NamedValue> parameter_values(const ModelParams& params);

/// Names of the coordinates of the unconstrained vector for this model.
[[nodiscard]] std::vector<std::string> free_parameter_names(const ModelParams& params, bool restricted);

/// Unconstrained coordinates: identity on mean, C, A and B entries; logit on p and q.
/// Pinned restricted coefficients are omitted. Throws InputError if p or q is 0 or 1.
[[nodiscard]] std::vector<double> to_unconstrained(const ModelParams& params, bool restricted);

/// Inverse of to_unconstrained; `like` selects the model family (and dummy variant).
[[nodiscard]] ModelParams from_unconstrained(std::span<const double> u, const ModelParams& like, bool restricted);

/// Derivative of each constrained parameter w.r.t. its unconstrained coordinate.
[[nodiscard]] std::vector<double> unconstrained_jacobian(const ModelParams& params, bool restricted);

namespace estimation {

/// A log-likelihood over an unconstrained vector, used by the generic maximizer.
struct LikelihoodProblem {
    std::vector<double> start;
    /// Typical magnitude of each coordinate; the optimizer works in u / scale.
    std::vector<double> scale;
    /// Total log-likelihood; may throw rsgarch::Error for infeasible points.
    std::function<double(std::span<const double>)> loglik;
    /// Per-observation contributions (for the outer-product-of-scores term).
    std::function<std::vector<double>(std::span<const double>)> contributions;
};

struct ProblemFit {
    std::vector<double> u;
    double loglik = 0.0;
    double start_loglik = 0.0;
    int iterations = 0;
    int restarts = 0;
    bool converged = false;
};

/// Multi-start simplex search followed by a quasi-Newton polish; best restart wins.
/// Throws EstimationError("estimation failed") if no restart reaches a finite likelihood.
[[nodiscard]] ProblemFit maximize(const LikelihoodProblem& problem, const OptimizerConfig& cfg);

struct Sandwich {
    /// Robust covariance H^-1 * OPG * H^-1 in unconstrained coordinates.
    Eigen::MatrixXd robust;
    /// -H^-1, the Hessian-only covariance.
    Eigen::MatrixXd hessian_only;
};

/// Throws EstimationError("singular information matrix ...") when the Hessian is not invertible.
[[nodiscard]] Sandwich sandwich_covariance(const LikelihoodProblem& problem, std::span<const double> u);

/// Problem for the single-regime or regime-switching model on `obs`.
[[nodiscard]] LikelihoodProblem make_problem(std::span<const Vec2> obs, const ModelParams& start,
                                             const ModelSpec& spec, const Cov2& h0, const Vec2& eps0);

/// Problem for the dummy-augmented single-regime model; `dummy` holds one 0/1 flag per observation.
[[nodiscard]] LikelihoodProblem make_dummy_problem(std::span<const Vec2> obs, const DummyModelParams& start,
                                                   bool restricted, std::span<const int> dummy, const Cov2& h0,
                                                   const Vec2& eps0);

/// Starting values: zero prices of risk, C from the scaled Cholesky factor of the sample covariance,
/// a = 0.2, b = 0.9, (p, q) = (0.85, 0.75).
[[nodiscard]] ModelParams starting_values(std::span<const Vec2> obs, const ModelSpec& spec);

/// Per-coordinate magnitudes used to scale the search space.
[[nodiscard]] std::vector<double> coordinate_scales(std::span<const Vec2> obs, const ModelParams& params,
                                                    bool restricted);

}  // namespace estimation

/// Forward pass of the dummy-augmented model.
[[nodiscard]] bekk::LikelihoodPath dummy_log_likelihood(std::span<const Vec2> obs, const DummyModelParams& params,
                                                        std::span<const int> dummy, const Cov2& h0,
                                                        const Vec2& eps0 = {0.0, 0.0});

/// Quasi-maximum-likelihood fit of the single-regime (n_regimes = 1) or
/// regime-switching (n_regimes = 2) model. Two-regime results are label-normalized.
[[nodiscard]] EstimationResult fit(const ExcessReturnSeries& series, const ModelSpec& spec,
                                   const OptimizerConfig& cfg = {});

/// Sandwich (QML-robust) standard errors for a fitted result, mapped back to constrained parameters.
[[nodiscard]] std::vector<NamedValue> robust_std_errors(const EstimationResult& result,
                                                        const ExcessReturnSeries& series);

/// Recomputes the filter output of a two-regime result on the series.
[[nodiscard]] FilterOutput filter_result(const EstimationResult& result, const ExcessReturnSeries& series);

/// Orders the states so that state 1 has the lower median market variance. Returns true if swapped.
bool normalize_labels(RsModelParams& params, FilterOutput& filter);

/// Result-level label normalization; also relabels the standard errors.
[[nodiscard]] EstimationResult normalize_labels(EstimationResult result, FilterOutput& filter);

/// Sign convention c11, c22, a11, b11 >= 0 (flips that leave the likelihood unchanged).
[[nodiscard]] BekkParams canonical_signs(BekkParams params);

}  // namespace rsgarch
