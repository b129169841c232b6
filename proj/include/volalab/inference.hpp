#pragma once

#include "volalab/estimate.hpp"

#include <string>
#include <vector>

namespace volalab {

struct WaldReport {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::string restriction;
};

/// Upper-tail chi-square(dof) probability.
double chi_square_sf(double statistic, int dof);

/// Wald test of R theta = 0 with the fit's asymptotic covariance.
WaldReport wald_test(const FitResult& fit, const Eigen::MatrixXd& restriction, const std::string& description);

/// Symmetry: alpha+ = alpha- (log-GARCH, q rows) or gamma = 0 (EGARCH, l rows).
WaldReport wald_symmetry(const FitResult& fit);

struct ComparisonEntry {
    std::string label;
    ModelFamily family = ModelFamily::LogGarch;
    double loglik = 0.0;
    double q_n = 0.0;
};

struct ComparisonReport {
    std::vector<ComparisonEntry> entries;
    /// Index of the largest log-likelihood; meaningless when `tie`.
    std::size_t winner = 0;
    bool tie = false;
};

/**
 * Ranks fits by quasi log-likelihood. All fits must share the data
 * fingerprint and summation window. When `eps` is given, each stored Q_n
 * is checked against a re-evaluation (tolerance 1e-10).
 */
ComparisonReport compare_models(const std::vector<FitResult>& fits, const Series* eps = nullptr);

} // namespace volalab
