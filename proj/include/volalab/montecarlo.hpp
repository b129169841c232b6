#pragma once

#include "volalab/estimate.hpp"
#include "volalab/innovation.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace volalab {

struct McConfig {
    ModelFamily truth = ModelFamily::LogGarch;
    /// True parameters in the flat order of the truth family.
    Eigen::VectorXd theta;
    std::size_t p = 1;
    std::size_t q = 1;
    Innovation dist = Innovation::normal();
    std::size_t n = 3344;
    std::size_t burn_in = 1000;
    std::size_t reps = 5;
    std::uint64_t seed = 0;
    /// Also fit the other family (same orders) and record the likelihood winner.
    bool fit_both = false;
    /// Worker threads; 0 means hardware concurrency.
    unsigned jobs = 0;
    FitOptions fit_options;
    double ci_level = 0.95;
    double wald_level = 0.05;

    void validate() const;
};

struct RepFit {
    bool ok = false;
    std::string error;
    Eigen::VectorXd theta;
    Eigen::VectorXd std_errors;
    double loglik = 0.0;
    bool converged = false;
    bool covariance_available = false;
    /// Symmetry Wald p-value (NaN when unavailable).
    double wald_p = 0.0;
};

struct RepOutcome {
    std::size_t index = 0;
    std::string error;
    RepFit truth_fit;
    std::optional<RepFit> other_fit;
    /// Set when both fits succeeded.
    std::optional<bool> truth_wins;
};

struct McSummary {
    std::size_t reps_ok = 0;
    Eigen::VectorXd mean_theta;
    Eigen::VectorXd bias;
    Eigen::VectorXd rmse;
    Eigen::VectorXd mean_se;
    /// Share of replications whose CI covers the truth, per component.
    Eigen::VectorXd coverage;
    std::size_t coverage_count = 0;
    std::size_t truth_wins = 0;
    std::size_t comparisons = 0;
    double wald_rejection_rate = 0.0;
    std::size_t wald_count = 0;
};

struct McReport {
    McConfig config;
    std::vector<std::string> parameter_names;
    std::vector<RepOutcome> reps;
    McSummary summary;
};

/// One replication: simulate with stream = index, then fit. Never throws for per-rep failures.
RepOutcome run_replication(const McConfig& cfg, std::size_t index);

/// Replications run on `jobs` threads; results are ordered by index and independent of `jobs`.
McReport run_montecarlo(const McConfig& cfg);

McSummary summarize(const McConfig& cfg, const std::vector<RepOutcome>& reps);

} // namespace volalab
