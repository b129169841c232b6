#pragma once

#include "volalab/innovation.hpp"
#include "volalab/params.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace volalab {

/// Simulation length, burn-in, and reproducibility settings.
struct SimConfig {
    std::size_t n = 1000;
    std::size_t burn_in = 1000;
    std::uint64_t seed = 0;
    /// Random stream within the seed; Monte Carlo replication k uses stream k.
    std::uint64_t stream = 0;
    /// Pre-sample log sigma^2 values (p of them). Empty means auto.
    std::vector<double> initial_log_sigma2;

    void validate() const;
};

struct Simulation {
    Series eps;
    VolPath vol;
    /// The innovations eta_t actually drawn, aligned with eps.
    std::vector<double> eta;
};

/// Generative log-GARCH path; throws SimulationExplosion if |log sigma^2| exceeds 700.
Simulation simulate_log_garch(const LogGarchParams& params, const Innovation& dist, const SimConfig& cfg);

/// Generative EGARCH path, driven by eta and |eta| (not by returns).
Simulation simulate_egarch(const EgarchParams& params, const Innovation& dist, const SimConfig& cfg);

/**
 * Asymmetric log-ACD: x_i = psi_i z_i with
 *   log psi_i = omega + sum_k (a+_k 1{y=1} + a-_k 1{y=-1}) log x_{i-k} + sum_j b_j log psi_{i-j}.
 * The coefficient layout reuses LogGarchParams.
 */
struct AcdSimulation {
    Series durations;
    std::vector<int> directions;
    std::vector<double> log_psi;
};
AcdSimulation simulate_log_acd(const LogGarchParams& params, const DurationInnovation& z_dist, double dir_prob,
                               const SimConfig& cfg);

/// GARCH(1,1) comparator sigma^2_t = omega + alpha e^2_{t-1} + beta sigma^2_{t-1}.
struct Garch11 {
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

/// Volatility responses of three models to one shared eta sequence.
struct ImpactCurves {
    VolPath log_garch;
    VolPath egarch;
    VolPath garch;
};

/**
 * Runs log-GARCH(1,1), EGARCH(1,1), and GARCH(1,1) from the same sigma_0^2
 * through the shocks eta_1..eta_T. Element t of each path is log sigma^2_t,
 * t = 0..T (element 0 is the common start).
 */
ImpactCurves impact_curves(const LogGarchParams& log_garch, const EgarchParams& egarch, const Garch11& garch,
                           const std::vector<double>& shocks, double sigma0_sq);

/**
 * Illustrative calibration: all three models share the long-run variance
 * 0.02 when eta_t^2 = 1. The GARCH triple is (0.02*(1-0.97), 0.09, 0.88).
 */
struct ImpactCalibration {
    LogGarchParams log_garch;
    EgarchParams egarch;
    Garch11 garch;
    double sigma0_sq = 0.02;
};
ImpactCalibration default_impact_calibration();

/// Shock sequences for the scenarios large-shock, tiny-run, single-tiny, constant.
std::vector<double> impact_scenario(const std::string& name, std::size_t length = 400);

} // namespace volalab
