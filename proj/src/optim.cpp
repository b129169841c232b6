#include "volalab/optim.hpp"

#include "volalab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace volalab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool small_change(const Eigen::VectorXd& x_old, const Eigen::VectorXd& x_new, double f_old, double f_new,
                  const OptimizerOptions& opts) {
    const double df = std::abs(f_old - f_new);
    const double dx = (x_new - x_old).lpNorm<Eigen::Infinity>();
    return df <= opts.objective_tol * (1.0 + std::abs(f_new)) && dx <= opts.param_tol * (1.0 + x_new.lpNorm<Eigen::Infinity>());
}

} // namespace

void OptimizerOptions::validate() const {
    if (max_iters <= 0 || !(objective_tol > 0.0) || !(param_tol > 0.0) || restarts < 0) {
        throw InvalidInput("optimizer tolerances and iteration limits must be positive");
    }
}

OptimResult bfgs(const ObjectiveWithGradient& fn, const Eigen::VectorXd& x0, const OptimizerOptions& opts) {
    opts.validate();
    const Eigen::Index d = x0.size();
    OptimResult res;
    res.method = "bfgs";
    Eigen::VectorXd x = x0;
    Eigen::VectorXd g(d);
    double f = fn(x, &g);
    if (!std::isfinite(f)) {
        res.x = x;
        res.f = kInf;
        return res;
    }
    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(d, d);
    bool scaled = false;
    Eigen::VectorXd g_new(d);
    for (int it = 0; it < opts.max_iters; ++it) {
        res.iterations = it + 1;
        const double gnorm = g.lpNorm<Eigen::Infinity>();
        if (gnorm <= 1e-9 * std::max(1.0, std::abs(f))) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd dir = -h_inv * g;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            h_inv.setIdentity();
            scaled = false;
            dir = -g;
            slope = -g.squaredNorm();
        }
        double step = 1.0;
        Eigen::VectorXd x_new;
        double f_new = kInf;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = x + step * dir;
            f_new = fn(x_new, &g_new);
            if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // Line search stalled: accept as converged only if the gradient is already tiny.
            res.converged = gnorm <= 1e-5 * std::max(1.0, std::abs(f));
            break;
        }
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const bool done = small_change(x, x_new, f, f_new, opts);
        x = x_new;
        f = f_new;
        g = g_new;
        if (done) {
            res.converged = true;
            break;
        }
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (!scaled) {
                h_inv *= sy / y.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
            h_inv = (eye - rho * s * y.transpose()) * h_inv * (eye - rho * y * s.transpose()) + rho * s * s.transpose();
        }
    }
    res.x = x;
    res.f = f;
    return res;
}

OptimResult nelder_mead(const Objective& fn, const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                        const OptimizerOptions& opts) {
    opts.validate();
    const Eigen::Index d = x0.size();
    const auto n = static_cast<std::size_t>(d);
    std::vector<Eigen::VectorXd> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i + 1](static_cast<Eigen::Index>(i)) += step(static_cast<Eigen::Index>(i));
    }
    for (std::size_t i = 0; i <= n; ++i) {
        vals[i] = fn(pts[i]);
    }
    OptimResult res;
    res.method = "nelder-mead";
    std::vector<std::size_t> order(n + 1);
    const int max_iters = opts.max_iters * 20 * static_cast<int>(n);
    for (int it = 0; it < max_iters; ++it) {
        res.iterations = it + 1;
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];
        double spread = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            spread = std::max(spread, (pts[i] - pts[best]).lpNorm<Eigen::Infinity>());
        }
        if (std::isfinite(vals[worst]) && vals[worst] - vals[best] <= opts.objective_tol * (1.0 + std::abs(vals[best])) &&
            spread <= opts.param_tol * 100.0) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i != worst) {
                centroid += pts[i];
            }
        }
        centroid /= static_cast<double>(n);
        const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
        const double fr = fn(xr);
        if (fr < vals[best]) {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = fn(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                           : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
        const double fc = fn(xc);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i != best) {
                pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
                vals[i] = fn(pts[i]);
            }
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    res.x = pts[best];
    res.f = vals[best];
    return res;
}

OptimResult minimize(const ObjectiveWithGradient& fn, const Eigen::VectorXd& x0, const OptimizerOptions& opts) {
    OptimResult first = bfgs(fn, x0, opts);
    if (first.converged || !std::isfinite(first.f)) {
        return first;
    }
    Eigen::VectorXd step = first.x.cwiseAbs() * 0.05;
    for (Eigen::Index i = 0; i < step.size(); ++i) {
        step(i) = std::max(step(i), 1e-3);
    }
    const OptimResult simplex = nelder_mead([&](const Eigen::VectorXd& x) { return fn(x, nullptr); }, first.x, step, opts);
    OptimResult polish = bfgs(fn, simplex.f < first.f ? simplex.x : first.x, opts);
    polish.iterations += first.iterations + simplex.iterations;
    polish.method = "bfgs+nelder-mead";
    if (polish.f > std::min(first.f, simplex.f)) {
        const OptimResult& better = simplex.f < first.f ? simplex : first;
        polish.x = better.x;
        polish.f = better.f;
        polish.converged = simplex.converged && simplex.f < first.f;
    }
    return polish;
}

} // namespace volalab
