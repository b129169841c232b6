#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace volalab {

/**
 * @brief Coefficients of the asymmetric log-GARCH(p,q) volatility equation
 *
 *   log s2_t = omega + sum_i (a+_i 1{e_{t-i}>0} + a-_i 1{e_{t-i}<0}) log e2_{t-i}
 *                    + sum_j b_j log s2_{t-j}
 *
 * No sign constraints are imposed on any coefficient. The flat parameter
 * vector used by the estimator is ordered (omega, alpha+, alpha-, beta),
 * of length 1 + 2q + p.
 */
struct LogGarchParams {
    double omega = 0.0;
    std::vector<double> alpha_plus;
    std::vector<double> alpha_minus;
    std::vector<double> beta;

    /// Validating constructor; throws InvalidInput on length mismatch or non-finite entries.
    static LogGarchParams make(double omega, std::vector<double> alpha_plus,
                               std::vector<double> alpha_minus, std::vector<double> beta);
    /// log-GARCH(1,1) shorthand.
    static LogGarchParams make11(double omega, double alpha_plus, double alpha_minus, double beta);
    static LogGarchParams from_vector(const Eigen::VectorXd& theta, std::size_t p, std::size_t q);

    void validate() const;
    [[nodiscard]] std::size_t p() const noexcept { return beta.size(); }
    [[nodiscard]] std::size_t q() const noexcept { return alpha_plus.size(); }
    [[nodiscard]] std::size_t r() const noexcept { return p() > q() ? p() : q(); }
    [[nodiscard]] std::size_t dim() const noexcept { return 1 + 2 * q() + p(); }
    [[nodiscard]] bool symmetric() const noexcept { return alpha_plus == alpha_minus; }
    [[nodiscard]] Eigen::VectorXd to_vector() const;

    // Zero-padded accessors (index is 1-based lag).
    [[nodiscard]] double ap(std::size_t i) const noexcept { return i <= q() ? alpha_plus[i - 1] : 0.0; }
    [[nodiscard]] double am(std::size_t i) const noexcept { return i <= q() ? alpha_minus[i - 1] : 0.0; }
    [[nodiscard]] double b(std::size_t j) const noexcept { return j <= p() ? beta[j - 1] : 0.0; }
};

/**
 * @brief Coefficients of the EGARCH(p,l) volatility equation
 *
 *   log s2_t = omega + sum_j b_j log s2_{t-j} + sum_k (g_k eta_{t-k} + d_k |eta_{t-k}|)
 *
 * Flat vector ordering is (omega, gamma, delta, beta), matching how fitted
 * EGARCH models are usually tabulated.
 */
struct EgarchParams {
    double omega = 0.0;
    std::vector<double> beta;
    std::vector<double> gamma;
    std::vector<double> delta;

    static EgarchParams make(double omega, std::vector<double> beta, std::vector<double> gamma,
                             std::vector<double> delta);
    /// EGARCH(1,1) shorthand, argument order (omega, gamma, delta, beta).
    static EgarchParams make11(double omega, double gamma, double delta, double beta);
    static EgarchParams from_vector(const Eigen::VectorXd& theta, std::size_t p, std::size_t ell);

    void validate() const;
    [[nodiscard]] std::size_t p() const noexcept { return beta.size(); }
    [[nodiscard]] std::size_t ell() const noexcept { return gamma.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return 1 + 2 * ell() + p(); }
    [[nodiscard]] Eigen::VectorXd to_vector() const;
};

/// Observed returns (or durations) with optional opaque date labels.
struct Series {
    std::vector<double> values;
    std::vector<std::string> dates;

    Series() = default;
    explicit Series(std::vector<double> v, std::vector<std::string> d = {});

    void validate() const;
    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] double operator[](std::size_t t) const noexcept { return values[t]; }
    /// Order-sensitive hash of the values, used to tell fits on different data apart.
    [[nodiscard]] std::uint64_t fingerprint() const noexcept;
};

enum class VolOrigin { Generative, Filtered };

/// log sigma^2_t aligned index-for-index with a Series.
struct VolPath {
    std::vector<double> log_sigma2;
    VolOrigin origin = VolOrigin::Filtered;
    /// Set when an EGARCH filter ran with parameters failing the invertibility check.
    bool invertibility_warning = false;

    [[nodiscard]] std::size_t size() const noexcept { return log_sigma2.size(); }
};

/**
 * @brief Pre-sample values for the filtered recursions.
 *
 * The pre-sample squared returns carry no sign, so their asymmetric
 * coefficients enter as (a+ + a-)/2 (log-GARCH) and the gamma terms of
 * EGARCH drop out.
 */
struct InitPolicy {
    enum class Kind { SampleVariance, Fixed };
    Kind kind = Kind::SampleVariance;
    double presample_eps2 = 1.0;
    double presample_log_sigma2 = 0.0;

    static InitPolicy sample_variance() { return {}; }
    static InitPolicy fixed(double eps2, double log_sigma2) { return {Kind::Fixed, eps2, log_sigma2}; }

    struct Resolved {
        double eps2;
        double log_sigma2;
    };
    [[nodiscard]] Resolved resolve(const std::vector<double>& eps) const;
};

} // namespace volalab
