#include "volalab/params.hpp"

#include "volalab/errors.hpp"

#include <cmath>
#include <cstring>
#include <numeric>

namespace volalab {

namespace {

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw InvalidInput(std::string("non-finite value in ") + what);
    }
}

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        require_finite(x, what);
    }
}

std::vector<double> slice(const Eigen::VectorXd& v, Eigen::Index start, std::size_t len) {
    std::vector<double> out(len);
    for (std::size_t i = 0; i < len; ++i) {
        out[i] = v(start + static_cast<Eigen::Index>(i));
    }
    return out;
}

} // namespace

LogGarchParams LogGarchParams::make(double omega, std::vector<double> alpha_plus,
                                    std::vector<double> alpha_minus, std::vector<double> beta) {
    LogGarchParams out{omega, std::move(alpha_plus), std::move(alpha_minus), std::move(beta)};
    out.validate();
    return out;
}

LogGarchParams LogGarchParams::make11(double omega, double alpha_plus, double alpha_minus, double beta) {
    return make(omega, {alpha_plus}, {alpha_minus}, {beta});
}

LogGarchParams LogGarchParams::from_vector(const Eigen::VectorXd& theta, std::size_t p, std::size_t q) {
    if (static_cast<std::size_t>(theta.size()) != 1 + 2 * q + p) {
        throw InvalidInput("log-GARCH parameter vector has wrong length");
    }
    const auto qi = static_cast<Eigen::Index>(q);
    return make(theta(0), slice(theta, 1, q), slice(theta, 1 + qi, q), slice(theta, 1 + 2 * qi, p));
}

void LogGarchParams::validate() const {
    if (alpha_plus.size() != alpha_minus.size()) {
        throw InvalidInput("alpha_plus and alpha_minus must have the same length");
    }
    require_finite(omega, "omega");
    require_finite(alpha_plus, "alpha_plus");
    require_finite(alpha_minus, "alpha_minus");
    require_finite(beta, "beta");
}

Eigen::VectorXd LogGarchParams::to_vector() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(dim()));
    Eigen::Index k = 0;
    v(k++) = omega;
    for (double a : alpha_plus) v(k++) = a;
    for (double a : alpha_minus) v(k++) = a;
    for (double b : beta) v(k++) = b;
    return v;
}

EgarchParams EgarchParams::make(double omega, std::vector<double> beta, std::vector<double> gamma,
                                std::vector<double> delta) {
    EgarchParams out{omega, std::move(beta), std::move(gamma), std::move(delta)};
    out.validate();
    return out;
}

EgarchParams EgarchParams::make11(double omega, double gamma, double delta, double beta) {
    return make(omega, {beta}, {gamma}, {delta});
}

EgarchParams EgarchParams::from_vector(const Eigen::VectorXd& theta, std::size_t p, std::size_t ell) {
    if (static_cast<std::size_t>(theta.size()) != 1 + 2 * ell + p) {
        throw InvalidInput("EGARCH parameter vector has wrong length");
    }
    const auto li = static_cast<Eigen::Index>(ell);
    return make(theta(0), slice(theta, 1 + 2 * li, p), slice(theta, 1, ell), slice(theta, 1 + li, ell));
}

void EgarchParams::validate() const {
    if (gamma.size() != delta.size()) {
        throw InvalidInput("gamma and delta must have the same length");
    }
    require_finite(omega, "omega");
    require_finite(beta, "beta");
    require_finite(gamma, "gamma");
    require_finite(delta, "delta");
}

Eigen::VectorXd EgarchParams::to_vector() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(dim()));
    Eigen::Index k = 0;
    v(k++) = omega;
    for (double g : gamma) v(k++) = g;
    for (double d : delta) v(k++) = d;
    for (double b : beta) v(k++) = b;
    return v;
}

Series::Series(std::vector<double> v, std::vector<std::string> d) : values(std::move(v)), dates(std::move(d)) {}

void Series::validate() const {
    if (values.empty()) {
        throw InvalidInput("series is empty");
    }
    if (!dates.empty() && dates.size() != values.size()) {
        throw InvalidInput("date labels and values differ in length");
    }
    for (std::size_t t = 0; t < values.size(); ++t) {
        if (!std::isfinite(values[t])) {
            throw InvalidInput("non-finite series value at index " + std::to_string(t));
        }
    }
}

std::uint64_t Series::fingerprint() const noexcept {
    // FNV-1a over the raw bytes.
    std::uint64_t h = 1469598103934665603ULL;
    for (double x : values) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &x, sizeof(double));
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

InitPolicy::Resolved InitPolicy::resolve(const std::vector<double>& eps) const {
    if (kind == Kind::Fixed) {
        if (!(presample_eps2 > 0.0) || !std::isfinite(presample_log_sigma2)) {
            throw InvalidInput("fixed init policy needs eps2 > 0 and finite log sigma^2");
        }
        return {presample_eps2, presample_log_sigma2};
    }
    const double n = static_cast<double>(eps.size());
    const double mean = std::accumulate(eps.begin(), eps.end(), 0.0) / n;
    double var = 0.0;
    for (double e : eps) {
        var += (e - mean) * (e - mean);
    }
    var /= n;
    if (!(var > 0.0)) {
        var = 1.0;
    }
    return {var, std::log(var)};
}

} // namespace volalab
