#pragma once

#include "volalab/diagnostics.hpp"
#include "volalab/optim.hpp"
#include "volalab/params.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace volalab {

enum class ModelFamily { LogGarch, Egarch };

std::string to_string(ModelFamily family);
ModelFamily parse_family(const std::string& name);

struct FitOptions {
    /// Discarded initial terms of the criterion; negative means max(p,q) + 10.
    int r0 = -1;
    InitPolicy init_policy = InitPolicy::sample_variance();
    /// Lower bound on |e_t| before taking logs (log-GARCH only).
    double floor = 1e-8;
    /// Explicit starting vectors; empty means the automatic start plus perturbations.
    std::vector<Eigen::VectorXd> starting_points;
    OptimizerOptions optimizer;
    /// Reject points whose beta polynomial has a root on or inside the unit circle.
    bool stationarity_penalty = true;
    /// EGARCH(1,1): enforce the contraction-bound sum instead of the printed one.
    bool strict_egarch_invertibility = false;
    std::uint64_t seed = 0;
    /// Attach a DiagnosticsReport at the estimate (log-GARCH only).
    bool compute_diagnostics = true;

    void validate() const;
    [[nodiscard]] std::size_t resolved_r0(std::size_t p, std::size_t q) const;
};

struct FitResult {
    ModelFamily family = ModelFamily::LogGarch;
    /// beta order.
    std::size_t p = 1;
    /// alpha order (log-GARCH) or l (EGARCH).
    std::size_t q = 1;
    Eigen::VectorXd theta_hat;
    double q_n = 0.0;
    /// -Q_n / 2, the per-observation quasi log-likelihood up to a constant.
    double loglik = 0.0;
    double kappa4_hat = 0.0;
    Eigen::MatrixXd J_hat;
    Eigen::MatrixXd acov;
    Eigen::VectorXd std_errors;
    Series eta_hat;
    bool converged = false;
    bool covariance_available = false;
    /// Sample size n and the number of terms in the criterion.
    std::size_t n_obs = 0;
    std::size_t n_eff = 0;
    std::size_t r0 = 0;
    std::uint64_t fingerprint = 0;
    double floor = 1e-8;
    InitPolicy init_policy;
    int iterations = 0;
    std::vector<std::string> warnings;
    std::optional<DiagnosticsReport> diagnostics;

    [[nodiscard]] LogGarchParams log_garch() const;
    [[nodiscard]] EgarchParams egarch() const;
    [[nodiscard]] std::vector<std::string> parameter_names() const;
};

/// Q_n(theta): mean of e_t^2/s~2_t + log s~2_t over t = r0+1..n. +inf on overflow.
double qmle_objective(const LogGarchParams& params, const Series& eps, const FitOptions& opts = {});
double qmle_objective(const EgarchParams& params, const Series& eps, const FitOptions& opts = {});

/// Gradient of log s~2_t, one row per t = 1..n, columns in flat-vector order.
Eigen::MatrixXd grad_log_sigma2(const LogGarchParams& params, const Series& eps, const FitOptions& opts = {});
Eigen::MatrixXd grad_log_sigma2(const EgarchParams& params, const Series& eps, const FitOptions& opts = {});

/// Gaussian QMLE; needs n >= 50 d.
FitResult fit_log_garch(const Series& eps, std::size_t p, std::size_t q, const FitOptions& opts = {});
FitResult fit_egarch(const Series& eps, std::size_t p, std::size_t ell, const FitOptions& opts = {});
FitResult fit(ModelFamily family, const Series& eps, std::size_t p, std::size_t q, const FitOptions& opts = {});

struct AsymptoticCovariance {
    Eigen::MatrixXd acov;
    /// kappa4 - 1.
    double factor = 0.0;
};
/// (kappa4 - 1) J^{-1} / n_eff; throws IllConditioned when cond(J) >= 1e12.
AsymptoticCovariance asymptotic_covariance(const FitResult& fit);

/// Objective re-evaluated at the stored estimate with the stored window and init policy.
double reevaluate_objective(const FitResult& fit, const Series& eps);

} // namespace volalab
