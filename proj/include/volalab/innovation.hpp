#pragma once

#include "volalab/rng.hpp"

#include <functional>
#include <limits>
#include <string>

namespace volalab {

/**
 * @brief Analytic moments of an innovation law.
 *
 * NaN marks an unknown entry (custom samplers); +inf marks a divergent
 * moment or a light tail (tail_index).
 */
struct MomentCatalog {
    double mean_abs = std::numeric_limits<double>::quiet_NaN();         // E|eta|
    double mean_log_sq = std::numeric_limits<double>::quiet_NaN();      // E log eta^2
    double mean_abs_log_sq = std::numeric_limits<double>::quiet_NaN();  // E |eta| log eta^2
    double kappa4 = std::numeric_limits<double>::quiet_NaN();           // E eta^4
    double tail_index = std::numeric_limits<double>::quiet_NaN();       // 2s': P(|eta|>x) ~ x^{-2s'}
};

enum class InnovationKind { StandardNormal, StudentT, TwoPoint, Custom };

/// Standard normal constants, tabulated to double precision.
namespace normal_constants {
inline constexpr double kMeanAbs = 0.79788456080286535588;
inline constexpr double kMeanLogSq = -1.2703628454614781700;
inline constexpr double kMeanAbsLogSq = 0.092499966454322924595;
} // namespace normal_constants

/**
 * @brief iid innovation distribution eta_t with E eta = 0, E eta^2 = 1.
 *
 * Built-in kinds are standardized at construction. Custom samplers carry
 * whatever catalog the caller supplies.
 */
class Innovation {
public:
    using Sampler = std::function<double(Rng&)>;

    static Innovation normal();
    /// Student-t with nu > 2 degrees of freedom, rescaled to unit variance.
    static Innovation student_t(double nu);
    /// +1 / -1 with equal probability.
    static Innovation two_point();
    static Innovation custom(Sampler sampler, double sign_prob, MomentCatalog catalog = {},
                             std::string name = "custom");

    double draw(Rng& rng) const;

    [[nodiscard]] InnovationKind kind() const noexcept { return kind_; }
    [[nodiscard]] double nu() const noexcept { return nu_; }
    /// a = P(eta > 0).
    [[nodiscard]] double sign_prob() const noexcept { return sign_prob_; }
    [[nodiscard]] const MomentCatalog& catalog() const noexcept { return catalog_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] bool symmetric() const noexcept;

private:
    Innovation() = default;

    InnovationKind kind_ = InnovationKind::StandardNormal;
    double nu_ = 0.0;
    double scale_ = 1.0;
    double sign_prob_ = 0.5;
    MomentCatalog catalog_;
    Sampler sampler_;
    std::string name_;
};

/// Parses "normal", "t<nu>" / "student-t:<nu>", "two-point".
Innovation parse_innovation(const std::string& spec);

/// Monte Carlo z-scores of each catalog entry (test hook for the built-in kinds).
struct CatalogCheck {
    double mean;         // sample E eta
    double second;       // sample E eta^2
    double z_mean;
    double z_second;
    double z_mean_abs;
    double z_mean_log_sq;
    double z_mean_abs_log_sq;
    double z_sign_prob;
};
CatalogCheck catalog_self_check(const Innovation& dist, std::size_t samples, std::uint64_t seed);

/// Positive, mean-one multiplicative error z_i of a log-ACD model.
class DurationInnovation {
public:
    using Sampler = std::function<double(Rng&)>;

    static DurationInnovation unit_exponential();
    static DurationInnovation custom(Sampler sampler, std::string name = "custom");

    double draw(Rng& rng) const;
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
    DurationInnovation() = default;
    Sampler sampler_;
    std::string name_;
};

} // namespace volalab
