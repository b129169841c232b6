#include "volalab/linalg.hpp"

#include "volalab/errors.hpp"

#include <cmath>

namespace volalab::linalg {

double spectral_radius(const Eigen::MatrixXd& m, std::size_t dense_cap) {
    if (m.rows() != m.cols()) {
        throw InvalidInput("spectral radius of a non-square matrix");
    }
    if (m.rows() == 0) {
        return 0.0;
    }
    if (static_cast<std::size_t>(m.rows()) > dense_cap) {
        return spectral_radius_power(m);
    }
    if (m.rows() == 1) {
        return std::abs(m(0, 0));
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        return spectral_radius_power(m);
    }
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_radius_power(const Eigen::MatrixXd& m, double tol, int max_iters) {
    const Eigen::Index n = m.rows();
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n) / static_cast<double>(n);
    double prev = 0.0;
    // Geometric mean of growth over blocks handles complex dominant pairs.
    for (int it = 0; it < max_iters; ++it) {
        double log_growth = 0.0;
        constexpr int kBlock = 8;
        for (int k = 0; k < kBlock; ++k) {
            v = m * v;
            const double nv = v.lpNorm<1>();
            if (nv == 0.0) {
                return 0.0;
            }
            log_growth += std::log(nv);
            v /= nv;
        }
        const double est = std::exp(log_growth / kBlock);
        if (std::abs(est - prev) <= tol * std::max(1.0, est)) {
            return est;
        }
        prev = est;
    }
    return prev;
}

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Eigen::MatrixXd kronecker_power(const Eigen::MatrixXd& a, int m) {
    if (m < 1) {
        throw InvalidInput("Kronecker power needs m >= 1");
    }
    Eigen::MatrixXd out = a;
    for (int k = 1; k < m; ++k) {
        out = kronecker(out, a);
    }
    return out;
}

Eigen::MatrixXd companion(const Eigen::VectorXd& first_row) {
    const Eigen::Index r = first_row.size();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(r, r);
    if (r == 0) {
        return c;
    }
    c.row(0) = first_row.transpose();
    for (Eigen::Index i = 1; i < r; ++i) {
        c(i, i - 1) = 1.0;
    }
    return c;
}

} // namespace volalab::linalg
