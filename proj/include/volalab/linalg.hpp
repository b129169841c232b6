#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace volalab::linalg {

/// Spectral radius; dense eigen-decomposition up to `dense_cap` rows, power iteration above.
double spectral_radius(const Eigen::MatrixXd& m, std::size_t dense_cap = 4096);

/// Power iteration on Abs-style nonnegative matrices, tolerance on successive estimates.
double spectral_radius_power(const Eigen::MatrixXd& m, double tol = 1e-10, int max_iters = 100000);

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
Eigen::MatrixXd kronecker_power(const Eigen::MatrixXd& a, int m);

/// Companion matrix whose first row is `first_row` and with ones on the subdiagonal.
Eigen::MatrixXd companion(const Eigen::VectorXd& first_row);

} // namespace volalab::linalg
