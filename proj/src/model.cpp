#include "volalab/model.hpp"

#include "volalab/errors.hpp"
#include "volalab/linalg.hpp"

#include <cmath>

namespace volalab {

namespace {

double floored_log_sq(double e, double floor) {
    const double a = std::max(std::abs(e), floor);
    return 2.0 * std::log(a);
}

} // namespace

VolPath filter_log_garch(const LogGarchParams& params, const Series& eps, const InitPolicy& init, double floor) {
    params.validate();
    eps.validate();
    if (!(floor > 0.0)) {
        throw InvalidInput("zero-return floor must be positive");
    }
    const std::size_t n = eps.size();
    const std::size_t p = params.p();
    const std::size_t q = params.q();
    const auto start = init.resolve(eps.values);
    const double pre_log_e2 = floored_log_sq(std::sqrt(start.eps2), floor);

    std::vector<double> log_e2(n);
    for (std::size_t t = 0; t < n; ++t) {
        log_e2[t] = floored_log_sq(eps[t], floor);
    }

    VolPath out;
    out.origin = VolOrigin::Filtered;
    out.log_sigma2.resize(n);
    auto& h = out.log_sigma2;
    for (std::size_t t = 0; t < n; ++t) {
        double v = params.omega;
        for (std::size_t i = 1; i <= q; ++i) {
            if (t >= i) {
                const double e = eps[t - i];
                v += (e >= 0.0 ? params.alpha_plus[i - 1] : params.alpha_minus[i - 1]) * log_e2[t - i];
            } else {
                v += 0.5 * (params.alpha_plus[i - 1] + params.alpha_minus[i - 1]) * pre_log_e2;
            }
        }
        for (std::size_t j = 1; j <= p; ++j) {
            v += params.beta[j - 1] * (t >= j ? h[t - j] : start.log_sigma2);
        }
        h[t] = v;
    }
    return out;
}

VolPath filter_egarch(const EgarchParams& params, const Series& eps, const InitPolicy& init) {
    params.validate();
    eps.validate();
    const std::size_t n = eps.size();
    const std::size_t p = params.p();
    const std::size_t ell = params.ell();
    const auto start = init.resolve(eps.values);
    const double pre_abs_eta = std::sqrt(start.eps2) * std::exp(-0.5 * start.log_sigma2);

    VolPath out;
    out.origin = VolOrigin::Filtered;
    out.log_sigma2.resize(n);
    out.invertibility_warning = !egarch_invertibility_constraint(params, eps.values).ok();
    auto& h = out.log_sigma2;
    std::vector<double> eta(n);
    for (std::size_t t = 0; t < n; ++t) {
        double v = params.omega;
        for (std::size_t j = 1; j <= p; ++j) {
            v += params.beta[j - 1] * (t >= j ? h[t - j] : start.log_sigma2);
        }
        for (std::size_t k = 1; k <= ell; ++k) {
            if (t >= k) {
                v += params.gamma[k - 1] * eta[t - k] + params.delta[k - 1] * std::abs(eta[t - k]);
            } else {
                v += params.delta[k - 1] * pre_abs_eta;
            }
        }
        const double inv_sigma = std::exp(-0.5 * v);
        if (!std::isfinite(v) || !std::isfinite(inv_sigma) || inv_sigma == 0.0) {
            throw NumericDegeneracy("EGARCH filtered volatility degenerated", t + 1);
        }
        h[t] = v;
        eta[t] = eps[t] * inv_sigma;
    }
    return out;
}

ArmaRepresentation arma_representation(const LogGarchParams& params) {
    params.validate();
    if (!params.symmetric()) {
        throw NotApplicable("ARMA representation needs alpha_plus == alpha_minus");
    }
    ArmaRepresentation out;
    const std::size_t r = params.r();
    out.ar.resize(r);
    for (std::size_t i = 1; i <= r; ++i) {
        out.ar[i - 1] = params.ap(i) + params.b(i);
    }
    out.ma = params.alpha_plus;
    out.intercept = params.omega;
    return out;
}

bool lag_poly_roots_outside(const std::vector<double>& beta) {
    if (beta.empty()) {
        return true;
    }
    for (double b : beta) {
        if (!std::isfinite(b)) {
            return false;
        }
    }
    // Roots z of 1 - sum b_j z^j are reciprocals of the companion eigenvalues.
    const Eigen::Map<const Eigen::VectorXd> row(beta.data(), static_cast<Eigen::Index>(beta.size()));
    const double rho = linalg::spectral_radius(linalg::companion(row));
    return rho * (1.0 + 1e-10) < 1.0;
}

EgarchInvertibility egarch_invertibility_constraint(const EgarchParams& params, const std::vector<double>& eps) {
    EgarchInvertibility out;
    out.delta_dominates = true;
    for (std::size_t k = 0; k < params.ell(); ++k) {
        if (params.delta[k] < std::abs(params.gamma[k])) {
            out.delta_dominates = false;
        }
    }
    if (params.p() == 1 && params.ell() == 1) {
        const double beta = params.beta[0];
        if (!(beta < 1.0) || !(beta > 0.0)) {
            out.sum_condition = false;
            out.sum = std::numeric_limits<double>::infinity();
            out.strict_sum = out.sum;
            return out;
        }
        const double scale = std::exp(-0.5 * params.omega / (1.0 - beta));
        const double g = params.gamma[0];
        const double d = params.delta[0];
        double sum = 0.0;
        double strict = 0.0;
        for (std::size_t t = 1; t < eps.size(); ++t) {
            const double e = eps[t - 1];
            const double x = 0.5 * (g * e + d * std::abs(e)) * scale;
            sum += std::log(std::max(beta, x) - beta);
            strict += std::log(std::max(beta, x - beta));
        }
        out.sum = sum;
        out.sum_condition = sum < 0.0;
        out.strict_sum = strict;
        out.strict_condition = strict < 0.0;
        return out;
    }
    out.heuristic = true;
    out.sum_condition = lag_poly_roots_outside(params.beta);
    out.strict_condition = out.sum_condition;
    return out;
}

} // namespace volalab
