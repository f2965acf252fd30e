#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rsgarch::optim {

/// Objective to be MAXIMIZED. May return -inf for infeasible points.
using Objective = std::function<double(std::span<const double>)>;

struct OptimResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    int max_iterations = 5000;
    double initial_step = 0.5;
    /// Stop when the spread of simplex values and the simplex diameter fall below these.
    double value_tol = 1e-8;
    double x_tol = 1e-6;
};

/// Adaptive Nelder-Mead simplex ascent (dimension-dependent coefficients).
OptimResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opts = {});

struct BfgsOptions {
    int max_iterations = 500;
    /// Converged when the objective improves by less than value_tol AND no coordinate moves more than x_tol.
    double value_tol = 1e-8;
    double x_tol = 1e-6;
};

/// Quasi-Newton ascent with central-difference gradients and a backtracking line search.
OptimResult bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& opts = {});

/// Central-difference step for coordinate value x: max(1e-5, 1e-5 |x|).
[[nodiscard]] double diff_step(double x) noexcept;

[[nodiscard]] Eigen::VectorXd numerical_gradient(const Objective& f, std::span<const double> x);

[[nodiscard]] Eigen::MatrixXd numerical_hessian(const Objective& f, std::span<const double> x);

/// Vector-valued function, e.g. per-observation log-likelihood contributions.
using VectorObjective = std::function<std::vector<double>(std::span<const double>)>;

/// Jacobian (rows = outputs, cols = parameters) by central differences.
[[nodiscard]] Eigen::MatrixXd numerical_jacobian(const VectorObjective& f, std::span<const double> x);

}  // namespace rsgarch::optim
