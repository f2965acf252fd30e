#include "rsgarch/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rsgarch::optim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Negated objective with every non-finite value mapped to +inf (minimization form).
struct Cost {
    const Objective& f;
    int evaluations = 0;

    double operator()(std::span<const double> x) {
        ++evaluations;
        const double v = f(x);
        return std::isfinite(v) ? -v : kInf;
    }
};

Eigen::VectorXd cost_gradient(Cost& cost, const Eigen::VectorXd& x) {
    const auto n = x.size();
    Eigen::VectorXd g(n);
    std::vector<double> buf(x.data(), x.data() + n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = diff_step(x[i]);
        buf[i] = x[i] + h;
        const double up = cost(buf);
        buf[i] = x[i] - h;
        const double down = cost(buf);
        buf[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

}  // namespace

double diff_step(double x) noexcept { return std::max(1e-5, 1e-5 * std::abs(x)); }

OptimResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opts) {
    Cost cost{f};
    const std::size_t n = x0.size();
    OptimResult res;
    if (n == 0) {
        res.value = f(x0);
        res.x = std::move(x0);
        res.converged = true;
        return res;
    }
    const double dn = static_cast<double>(n);
    const double alpha = 1.0;
    const double beta = 1.0 + 2.0 / dn;
    const double gamma = 0.75 - 1.0 / (2.0 * dn);
    const double delta = 1.0 - 1.0 / dn;

    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += opts.initial_step;
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = cost(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    auto point = [&](double coef, const std::vector<double>& worst, std::vector<double>& out) {
        for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + coef * (centroid[j] - worst[j]);
    };

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]));
        }
        if (std::isfinite(fv[worst]) && fv[worst] - fv[best] < opts.value_tol && diameter < opts.x_tol) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / dn;
        }

        point(alpha, simplex[worst], trial);
        const double fr = cost(trial);
        if (fr < fv[best]) {
            point(alpha * beta, simplex[worst], trial2);
            const double fe = cost(trial2);
            if (fe < fr) {
                simplex[worst] = trial2;
                fv[worst] = fe;
            } else {
                simplex[worst] = trial;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = trial;
            fv[worst] = fr;
            continue;
        }
        // contraction, outside if the reflection beat the worst vertex
        const bool outside = fr < fv[worst];
        point(outside ? alpha * gamma : -gamma, simplex[worst], trial2);
        const double fc = cost(trial2);
        if (fc < (outside ? fr : fv[worst])) {
            simplex[worst] = trial2;
            fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[best][j] + delta * (simplex[i][j] - simplex[best][j]);
            fv[i] = cost(simplex[i]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    res.x = simplex[best];
    res.value = -fv[best];
    res.iterations = it;
    res.evaluations = cost.evaluations;
    return res;
}

OptimResult bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& opts) {
    Cost cost{f};
    const auto n = static_cast<Eigen::Index>(x0.size());
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
    OptimResult res;

    double fx = cost(std::span<const double>(x.data(), x.size()));
    if (!std::isfinite(fx)) {
        res.x = std::move(x0);
        res.value = -kInf;
        res.evaluations = cost.evaluations;
        return res;
    }
    Eigen::VectorXd g = cost_gradient(cost, x);
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);

    int it = 0;
    bool reset_tried = false;
    for (; it < opts.max_iterations; ++it) {
        Eigen::VectorXd d = -hinv * g;
        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            hinv.setIdentity();
            d = -g;
            slope = g.dot(d);
        }
        if (!(slope < 0.0)) {
            res.converged = true;  // zero gradient
            break;
        }
        double step = 1.0;
        Eigen::VectorXd x_new;
        double f_new = kInf;
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            x_new = x + step * d;
            f_new = cost(std::span<const double>(x_new.data(), x_new.size()));
            if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // predicted gain below rounding: already at the optimum
            if (-slope < opts.value_tol) {
                res.converged = true;
                break;
            }
            if (reset_tried) break;
            reset_tried = true;
            hinv.setIdentity();
            continue;
        }
        reset_tried = false;
        const Eigen::VectorXd s = x_new - x;
        const double improvement = fx - f_new;
        const Eigen::VectorXd g_new = cost_gradient(cost, x_new);
        const Eigen::VectorXd y = g_new - g;
        x = x_new;
        fx = f_new;
        g = g_new;
        if (improvement < opts.value_tol && s.cwiseAbs().maxCoeff() < opts.x_tol) {
            res.converged = true;
            ++it;
            break;
        }
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
            hinv = (id - rho * s * y.transpose()) * hinv * (id - rho * y * s.transpose()) + rho * s * s.transpose();
        }
    }
    res.x.assign(x.data(), x.data() + n);
    res.value = -fx;
    res.iterations = it;
    res.evaluations = cost.evaluations;
    return res;
}

Eigen::VectorXd numerical_gradient(const Objective& f, std::span<const double> x) {
    std::vector<double> buf(x.begin(), x.end());
    Eigen::VectorXd g(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = diff_step(x[i]);
        buf[i] = x[i] + h;
        const double up = f(buf);
        buf[i] = x[i] - h;
        const double down = f(buf);
        buf[i] = x[i];
        g[static_cast<Eigen::Index>(i)] = (up - down) / (2.0 * h);
    }
    return g;
}

Eigen::MatrixXd numerical_hessian(const Objective& f, std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> buf(x.begin(), x.end());
    Eigen::MatrixXd h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double f0 = f(buf);
    std::vector<double> step(n);
    for (std::size_t i = 0; i < n; ++i) {
        // x + step and x - step are exactly representable offsets
        const double shifted = x[i] + diff_step(x[i]);
        step[i] = shifted - x[i];
    }

    auto eval = [&](std::size_t i, double di, std::size_t j, double dj) {
        buf[i] += di;
        buf[j] += dj;
        const double v = f(buf);
        buf[i] = x[i];
        buf[j] = x[j];
        return v;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        buf[i] = x[i] + step[i];
        const double up = f(buf);
        buf[i] = x[i] - step[i];
        const double down = f(buf);
        buf[i] = x[i];
        h(ii, ii) = (up - 2.0 * f0 + down) / (step[i] * step[i]);
        for (std::size_t j = 0; j < i; ++j) {
            const double hi = step[i], hj = step[j];
            const double v = (eval(i, hi, j, hj) - eval(i, hi, j, -hj) - eval(i, -hi, j, hj) + eval(i, -hi, j, -hj)) /
                             (4.0 * hi * hj);
            const auto jj = static_cast<Eigen::Index>(j);
            h(ii, jj) = v;
            h(jj, ii) = v;
        }
    }
    return h;
}

Eigen::MatrixXd numerical_jacobian(const VectorObjective& f, std::span<const double> x) {
    std::vector<double> buf(x.begin(), x.end());
    Eigen::MatrixXd jac;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = diff_step(x[i]);
        buf[i] = x[i] + h;
        const auto up = f(buf);
        buf[i] = x[i] - h;
        const auto down = f(buf);
        buf[i] = x[i];
        if (i == 0) jac.resize(static_cast<Eigen::Index>(up.size()), static_cast<Eigen::Index>(x.size()));
        for (std::size_t r = 0; r < up.size(); ++r) {
            jac(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = (up[r] - down[r]) / (2.0 * h);
        }
    }
    return jac;
}

}  // namespace rsgarch::optim
