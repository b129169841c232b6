#include "volalab/inference.hpp"

#include "volalab/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

namespace volalab {

double chi_square_sf(double statistic, int dof) {
    if (dof <= 0) {
        throw InvalidInput("chi-square degrees of freedom must be positive");
    }
    if (!(statistic >= 0.0)) {
        throw InvalidInput("chi-square statistic must be nonnegative");
    }
    if (statistic == 0.0) {
        return 1.0;
    }
    if (std::isinf(statistic)) {
        return 0.0;
    }
    return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

WaldReport wald_test(const FitResult& fit, const Eigen::MatrixXd& restriction, const std::string& description) {
    if (!fit.covariance_available) {
        throw EstimationError("Wald test needs the asymptotic covariance, which is unavailable for this fit");
    }
    if (restriction.cols() != fit.theta_hat.size() || restriction.rows() == 0) {
        throw InvalidInput("restriction matrix has the wrong shape");
    }
    const Eigen::VectorXd r_theta = restriction * fit.theta_hat;
    const Eigen::MatrixXd middle = restriction * fit.acov * restriction.transpose();
    WaldReport out;
    out.dof = static_cast<int>(restriction.rows());
    out.restriction = description;
    if (r_theta.isZero(0.0)) {
        out.statistic = 0.0;
        out.p_value = 1.0;
        return out;
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(middle);
    if (!lu.isInvertible()) {
        throw EstimationError("R acov R' is singular");
    }
    out.statistic = std::max(0.0, r_theta.dot(lu.solve(r_theta)));
    out.p_value = chi_square_sf(out.statistic, out.dof);
    return out;
}

WaldReport wald_symmetry(const FitResult& fit) {
    const auto q = static_cast<Eigen::Index>(fit.q);
    const auto d = fit.theta_hat.size();
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(q, d);
    std::string what;
    for (Eigen::Index i = 0; i < q; ++i) {
        if (fit.family == ModelFamily::LogGarch) {
            r(i, 1 + i) = 1.0;
            r(i, 1 + q + i) = -1.0;
        } else {
            r(i, 1 + i) = 1.0;
        }
    }
    what = fit.family == ModelFamily::LogGarch ? "alpha_plus = alpha_minus" : "gamma = 0";
    return wald_test(fit, r, what);
}

ComparisonReport compare_models(const std::vector<FitResult>& fits, const Series* eps) {
    if (fits.empty()) {
        throw InvalidInput("nothing to compare");
    }
    const auto& ref = fits.front();
    for (const auto& f : fits) {
        if (f.fingerprint != ref.fingerprint || f.n_obs != ref.n_obs) {
            throw InvalidInput("fits were computed on different series");
        }
        if (f.r0 != ref.r0 || f.n_eff != ref.n_eff) {
            throw InvalidInput("fits use different summation windows (r0 differs)");
        }
    }
    ComparisonReport out;
    for (const auto& f : fits) {
        if (eps != nullptr) {
            const double again = reevaluate_objective(f, *eps);
            if (!(std::abs(again - f.q_n) <= 1e-10 * std::max(1.0, std::abs(f.q_n)))) {
                throw std::logic_error("stored Q_n does not match the re-evaluated objective");
            }
        }
        const std::string label = to_string(f.family) + "(" + std::to_string(f.p) + "," + std::to_string(f.q) + ")";
        out.entries.push_back({label, f.family, f.loglik, f.q_n});
    }
    double best = out.entries.front().loglik;
    for (std::size_t i = 1; i < out.entries.size(); ++i) {
        if (out.entries[i].loglik > best) {
            best = out.entries[i].loglik;
            out.winner = i;
        }
    }
    std::size_t at_best = 0;
    for (const auto& e : out.entries) {
        if (std::abs(e.loglik - best) <= 1e-12 * std::max(1.0, std::abs(best))) {
            ++at_best;
        }
    }
    out.tie = at_best > 1;
    return out;
}

} // namespace volalab
