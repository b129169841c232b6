#pragma once

#include "volalab/innovation.hpp"
#include "volalab/params.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace volalab {

/**
 * @brief Random companion systems of the log-GARCH recursion.
 *
 * The C system has dimension 2q+p and depends only on the sign of eta_t:
 *   z_t = C_t z_{t-1} + b_t,  z_t = (e+_{t,q}, e-_{t,q}, log s2_t..log s2_{t-p+1}).
 * The A system has dimension r = max(p,q) with first row
 *   mu_i(eta_{t-i}) = a+_i 1{eta>0} + a-_i 1{eta<0} + b_i.
 */
class CompanionSystem {
public:
    explicit CompanionSystem(LogGarchParams params);

    [[nodiscard]] std::size_t c_dimension() const noexcept { return 2 * params_.q() + params_.p(); }
    [[nodiscard]] std::size_t a_dimension() const noexcept { return params_.r(); }

    /// C_t for a positive (C+) or negative (C-) innovation.
    [[nodiscard]] Eigen::MatrixXd c_matrix(bool positive) const;
    /// b_t for a realized innovation eta.
    [[nodiscard]] Eigen::VectorXd b_vector(double eta) const;
    /// A_t for the sign pattern of (eta_{t-1}, ..., eta_{t-r}); true = positive.
    [[nodiscard]] Eigen::MatrixXd a_matrix(const std::vector<bool>& positive) const;
    /// Entrywise maximum of Abs(A_t) over sign patterns.
    [[nodiscard]] Eigen::MatrixXd a_infinity() const;

    [[nodiscard]] double mu(std::size_t i, bool positive) const noexcept;
    [[nodiscard]] const LogGarchParams& params() const noexcept { return params_; }

private:
    LogGarchParams params_;
};

struct LyapunovOptions {
    std::size_t horizon = 10000;
    std::size_t reps = 50;
    /// Steps discarded before accumulating log-norm increments.
    std::size_t burn_in = 100;
    std::uint64_t seed = 0;
    std::size_t max_dimension = 64;
};

struct LyapunovEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/**
 * Monte Carlo top Lyapunov exponent of the C system. Each replication
 * multiplies realized C_t, renormalizes every step in the operator 1-norm,
 * and averages the log growth after a burn-in.
 */
LyapunovEstimate lyapunov_mc(const LogGarchParams& params, double sign_prob, const LyapunovOptions& opts = {});
LyapunovEstimate lyapunov_mc(const LogGarchParams& params, const Innovation& dist, const LyapunovOptions& opts = {});

/// a log|a+ + b| + (1-a) log|a- + b| for a (1,1) model.
struct ClosedLyapunov {
    double value = 0.0;
    /// Set when a factor is exactly zero and value is -inf.
    bool degenerate = false;
    std::string note;
};
ClosedLyapunov lyapunov_closed_11(const LogGarchParams& params, double sign_prob);

inline constexpr std::size_t kDefaultKroneckerCap = 4096;

struct MomentMatrix {
    Eigen::MatrixXd matrix;
    double spectral_radius = 0.0;
};

/// A^(m) = E[Abs(A_1)^{(x)m}] by exact enumeration of the 2^r sign patterns.
MomentMatrix moment_matrix_A(const LogGarchParams& params, double sign_prob, int m,
                             std::size_t cap = kDefaultKroneckerCap);

/// C^(m) = a Abs(C+)^{(x)m} + (1-a) Abs(C-)^{(x)m}.
MomentMatrix moment_matrix_C(const LogGarchParams& params, double sign_prob, int m,
                             std::size_t cap = kDefaultKroneckerCap);

struct AnyLogMoment {
    bool ok = false;
    double rho_A_inf = 0.0;
    double sum_form = 0.0;
};
/// rho(A^(inf)) < 1, cross-checked against sum_i max(|a+_i+b_i|, |a-_i+b_i|) < 1.
AnyLogMoment check_any_log_moment(const LogGarchParams& params);

struct Leverage {
    double cov = 0.0;
    double tau = 0.0;
};
/**
 * cov(eta_{t-1}, log s2_t) for a (1,1) model with symmetric innovations:
 *   tau = (omega + (a+ + a-)/2 E log eta^2) / (1 - beta - (a+ + a-)/2)
 *   cov = (a+ - a-)/2 { E|eta| tau + E(|eta| log eta^2) }.
 */
Leverage leverage_covariance_11(const LogGarchParams& params, const Innovation& dist);

/// max_i(|a+_i| v |a-_i|) * sum_l ||(A^(inf))^l||, entry-sum norm.
double compute_lambda(const LogGarchParams& params);

struct MomentOrders {
    double sigma2_order = 0.0;
    double eps_order = 0.0;
};
/// Finite moment orders of sigma^2 and e for a (1,1) model when E|eta|^{2s} < inf.
MomentOrders moment_order_11(const LogGarchParams& params, double s, const Innovation* dist = nullptr);

struct TailIndices {
    double sigma2_index = 0.0;
    double eps_index = 0.0;
};
/// Regular-variation indices of sigma^2 and e when eta has tail index 2s'.
TailIndices tail_index_11(const LogGarchParams& params, double s_prime);

/// Classical Hill estimator on the top-k order statistics of positive data.
double hill_estimate(std::span<const double> values, std::size_t k);
/// n^0.6, rounded.
std::size_t default_hill_k(std::size_t n);

enum class CramerStatus { Holds, Fails, Unknown };
struct CramerCheck {
    CramerStatus status = CramerStatus::Unknown;
    std::string note;
};
/// Whether E exp(s1 |log eta^2|) < inf for some s1 > 0, from the innovation catalog.
CramerCheck cramer_condition_catalog(const Innovation& dist);

/**
 * Moment condition E exp{s (lambda v 1) |log eta^2|} < inf, which yields
 * E|e_t|^{2s} < inf. Decided from the innovation catalog for built-in kinds.
 */
struct MomentCondition {
    double lambda = 0.0;
    CramerStatus status = CramerStatus::Unknown;
    /// Supremum of admissible s for this innovation (inf when unbounded).
    double s_sup = 0.0;
};
MomentCondition moment_condition(const LogGarchParams& params, const Innovation& dist, double s);

enum class LyapunovMethod { MonteCarlo, ClosedForm };

struct DiagnosticsReport {
    struct Lyapunov {
        double estimate = 0.0;
        double std_error = 0.0;
        LyapunovMethod method = LyapunovMethod::MonteCarlo;
    } lyapunov;
    bool stationary = false;
    std::map<int, double> rho_A_m;
    std::map<int, double> rho_C_m;
    double rho_A_inf = 0.0;
    double sum_form = 0.0;
    bool any_log_moment_ok = false;
    std::optional<double> leverage_cov;
    std::optional<double> tau;
    struct Tail {
        double sigma2_index = 0.0;
        double eps_index = 0.0;
    };
    std::optional<Tail> tail;
    std::optional<double> lambda;
    /// Largest 2s with E|e|^{2s} < inf guaranteed by the moment condition.
    std::optional<double> moment_order;
    std::optional<MomentOrders> moment_orders_11;
    CramerCheck cramer;
    /// Per-field reasons for omitted entries.
    std::map<std::string, std::string> not_applicable;
};

struct DiagnoseOptions {
    LyapunovOptions lyapunov;
    std::vector<int> moment_orders{1, 2, 3, 4};
    std::size_t kronecker_cap = kDefaultKroneckerCap;
};

/// Every diagnostic at once; inapplicable items are recorded, never thrown.
DiagnosticsReport diagnose(const LogGarchParams& params, const Innovation& dist, const DiagnoseOptions& opts = {});

} // namespace volalab
