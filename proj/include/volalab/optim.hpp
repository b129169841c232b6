#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace volalab {

struct OptimizerOptions {
    int max_iters = 500;
    double objective_tol = 1e-10;
    double param_tol = 1e-8;
    /// Extra randomized starts beyond the first (estimator-level setting).
    int restarts = 4;

    void validate() const;
};

/// Objective value; fills `grad` when non-null. Infeasible points return +inf.
using ObjectiveWithGradient = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;
using Objective = std::function<double(const Eigen::VectorXd&)>;

struct OptimResult {
    Eigen::VectorXd x;
    double f = 0.0;
    bool converged = false;
    int iterations = 0;
    std::string method;
};

/// BFGS with backtracking Armijo line search. +inf trial values shrink the step.
OptimResult bfgs(const ObjectiveWithGradient& fn, const Eigen::VectorXd& x0, const OptimizerOptions& opts);

/// Nelder-Mead simplex; `step` sets the initial simplex edge per coordinate.
OptimResult nelder_mead(const Objective& fn, const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                        const OptimizerOptions& opts);

/// BFGS, falling back to Nelder-Mead (then a BFGS polish) if the line search stalls.
OptimResult minimize(const ObjectiveWithGradient& fn, const Eigen::VectorXd& x0, const OptimizerOptions& opts);

} // namespace volalab
