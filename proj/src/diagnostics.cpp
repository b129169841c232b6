#include "volalab/diagnostics.hpp"

#include "volalab/errors.hpp"
#include "volalab/linalg.hpp"
#include "volalab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace volalab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_11(const LogGarchParams& params, const char* what) {
    if (params.p() != 1 || params.q() != 1) {
        throw NotApplicable(std::string(what) + " is defined for p = q = 1 only");
    }
}

void require_probability(double a) {
    if (!(a > 0.0 && a < 1.0)) {
        throw InvalidInput("sign probability must lie in (0,1)");
    }
}

double max_abs_alpha(const LogGarchParams& params) {
    double m = 0.0;
    for (std::size_t i = 0; i < params.q(); ++i) {
        m = std::max({m, std::abs(params.alpha_plus[i]), std::abs(params.alpha_minus[i])});
    }
    return m;
}

// Hypotheses shared by the (1,1) moment-order and regular-variation results.
void require_tail_hypotheses(const LogGarchParams& params, const char* what) {
    require_11(params, what);
    const double ap = params.alpha_plus[0];
    const double am = params.alpha_minus[0];
    const double b = params.beta[0];
    auto in_unit = [](double x) { return x > 0.0 && x < 1.0; };
    if (!in_unit(b + ap)) {
        throw NotApplicable(std::string(what) + ": beta + alpha_plus must lie in (0,1)");
    }
    if (!in_unit(b + am)) {
        throw NotApplicable(std::string(what) + ": beta + alpha_minus must lie in (0,1)");
    }
    if (!(std::min(ap, am) > 0.0)) {
        throw NotApplicable(std::string(what) + ": min(alpha_plus, alpha_minus) must be positive");
    }
}

double operator_one_norm(const Eigen::MatrixXd& m) {
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

} // namespace

CompanionSystem::CompanionSystem(LogGarchParams params) : params_(std::move(params)) {
    params_.validate();
}

double CompanionSystem::mu(std::size_t i, bool positive) const noexcept {
    return (positive ? params_.ap(i) : params_.am(i)) + params_.b(i);
}

Eigen::MatrixXd CompanionSystem::c_matrix(bool positive) const {
    const auto q = static_cast<Eigen::Index>(params_.q());
    const auto p = static_cast<Eigen::Index>(params_.p());
    const Eigen::Index d = 2 * q + p;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
    Eigen::RowVectorXd coeff(d);
    for (Eigen::Index i = 0; i < q; ++i) {
        coeff(i) = params_.alpha_plus[static_cast<std::size_t>(i)];
        coeff(q + i) = params_.alpha_minus[static_cast<std::size_t>(i)];
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        coeff(2 * q + j) = params_.beta[static_cast<std::size_t>(j)];
    }
    if (q > 0) {
        if (positive) {
            c.row(0) = coeff;
        } else {
            c.row(q) = coeff;
        }
        for (Eigen::Index i = 1; i < q; ++i) {
            c(i, i - 1) = 1.0;
            c(q + i, q + i - 1) = 1.0;
        }
    }
    if (p > 0) {
        c.row(2 * q) = coeff;
        for (Eigen::Index j = 1; j < p; ++j) {
            c(2 * q + j, 2 * q + j - 1) = 1.0;
        }
    }
    return c;
}

Eigen::VectorXd CompanionSystem::b_vector(double eta) const {
    const auto q = static_cast<Eigen::Index>(params_.q());
    const auto p = static_cast<Eigen::Index>(params_.p());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * q + p);
    const double drive = params_.omega + std::log(eta * eta);
    if (q > 0) {
        if (eta > 0.0) {
            b(0) = drive;
        } else if (eta < 0.0) {
            b(q) = drive;
        }
    }
    if (p > 0) {
        b(2 * q) = params_.omega;
    }
    return b;
}

Eigen::MatrixXd CompanionSystem::a_matrix(const std::vector<bool>& positive) const {
    const std::size_t r = params_.r();
    if (positive.size() != r) {
        throw InvalidInput("sign pattern must have r = max(p,q) entries");
    }
    Eigen::VectorXd row(static_cast<Eigen::Index>(r));
    for (std::size_t i = 1; i <= r; ++i) {
        row(static_cast<Eigen::Index>(i - 1)) = mu(i, positive[i - 1]);
    }
    return linalg::companion(row);
}

Eigen::MatrixXd CompanionSystem::a_infinity() const {
    const std::size_t r = params_.r();
    Eigen::VectorXd row(static_cast<Eigen::Index>(r));
    for (std::size_t i = 1; i <= r; ++i) {
        row(static_cast<Eigen::Index>(i - 1)) = std::max(std::abs(mu(i, true)), std::abs(mu(i, false)));
    }
    return linalg::companion(row);
}

LyapunovEstimate lyapunov_mc(const LogGarchParams& params, double sign_prob, const LyapunovOptions& opts) {
    require_probability(sign_prob);
    if (opts.horizon < 100 || opts.reps < 10) {
        throw InvalidInput("lyapunov_mc needs horizon >= 100 and reps >= 10");
    }
    const CompanionSystem sys(params);
    const std::size_t d = sys.c_dimension();
    if (d > opts.max_dimension) {
        throw SizeLimitExceeded("C system dimension " + std::to_string(d) + " exceeds the configured maximum");
    }
    if (d == 0) {
        return {-kInf, 0.0};
    }
    const Eigen::MatrixXd c_pos = sys.c_matrix(true);
    const Eigen::MatrixXd c_neg = sys.c_matrix(false);
    const auto di = static_cast<Eigen::Index>(d);

    std::vector<double> per_rep(opts.reps);
    Eigen::MatrixXd prod(di, di), next(di, di);
    for (std::size_t rep = 0; rep < opts.reps; ++rep) {
        Rng rng(opts.seed, rep);
        prod.setIdentity();
        double acc = 0.0;
        bool collapsed = false;
        for (std::size_t step = 0; step < opts.burn_in + opts.horizon; ++step) {
            next.noalias() = (rng.bernoulli(sign_prob) ? c_pos : c_neg) * prod;
            const double nrm = operator_one_norm(next);
            if (nrm == 0.0) {
                collapsed = true;
                break;
            }
            prod = next / nrm;
            if (step >= opts.burn_in) {
                acc += std::log(nrm);
            }
        }
        per_rep[rep] = collapsed ? -kInf : acc / static_cast<double>(opts.horizon);
    }
    const double n = static_cast<double>(opts.reps);
    const double mean = std::accumulate(per_rep.begin(), per_rep.end(), 0.0) / n;
    if (!std::isfinite(mean)) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double v : per_rep) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

LyapunovEstimate lyapunov_mc(const LogGarchParams& params, const Innovation& dist, const LyapunovOptions& opts) {
    return lyapunov_mc(params, dist.sign_prob(), opts);
}

ClosedLyapunov lyapunov_closed_11(const LogGarchParams& params, double sign_prob) {
    require_11(params, "closed-form Lyapunov exponent");
    require_probability(sign_prob);
    const double up = std::abs(params.alpha_plus[0] + params.beta[0]);
    const double down = std::abs(params.alpha_minus[0] + params.beta[0]);
    if (up == 0.0 || down == 0.0) {
        return {-kInf, true, up == 0.0 ? "alpha_plus + beta = 0" : "alpha_minus + beta = 0"};
    }
    return {sign_prob * std::log(up) + (1.0 - sign_prob) * std::log(down), false, {}};
}

MomentMatrix moment_matrix_A(const LogGarchParams& params, double sign_prob, int m, std::size_t cap) {
    require_probability(sign_prob);
    if (m < 1) {
        throw InvalidInput("moment order m must be positive");
    }
    const CompanionSystem sys(params);
    const std::size_t r = sys.a_dimension();
    if (r == 0) {
        return {Eigen::MatrixXd::Zero(0, 0), 0.0};
    }
    if (std::pow(static_cast<double>(r), m) > static_cast<double>(cap)) {
        throw SizeLimitExceeded("r^m exceeds the Kronecker cap; use the C-matrix route or the any-order condition");
    }
    if (r > 24) {
        throw SizeLimitExceeded("sign-pattern enumeration limited to r <= 24");
    }
    const auto side = static_cast<Eigen::Index>(std::llround(std::pow(static_cast<double>(r), m)));
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(side, side);
    std::vector<bool> pattern(r);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << r); ++bits) {
        double prob = 1.0;
        for (std::size_t i = 0; i < r; ++i) {
            pattern[i] = ((bits >> i) & 1U) != 0;
            prob *= pattern[i] ? sign_prob : 1.0 - sign_prob;
        }
        acc += prob * linalg::kronecker_power(sys.a_matrix(pattern).cwiseAbs(), m);
    }
    return {acc, linalg::spectral_radius(acc, cap)};
}

MomentMatrix moment_matrix_C(const LogGarchParams& params, double sign_prob, int m, std::size_t cap) {
    require_probability(sign_prob);
    if (m < 1) {
        throw InvalidInput("moment order m must be positive");
    }
    const CompanionSystem sys(params);
    const std::size_t d = sys.c_dimension();
    if (d == 0) {
        return {Eigen::MatrixXd::Zero(0, 0), 0.0};
    }
    if (std::pow(static_cast<double>(d), m) > static_cast<double>(cap)) {
        throw SizeLimitExceeded("(2q+p)^m exceeds the Kronecker cap");
    }
    Eigen::MatrixXd acc = sign_prob * linalg::kronecker_power(sys.c_matrix(true).cwiseAbs(), m) +
                          (1.0 - sign_prob) * linalg::kronecker_power(sys.c_matrix(false).cwiseAbs(), m);
    const double rho = linalg::spectral_radius(acc, cap);
    return {std::move(acc), rho};
}

AnyLogMoment check_any_log_moment(const LogGarchParams& params) {
    const CompanionSystem sys(params);
    const Eigen::MatrixXd a_inf = sys.a_infinity();
    AnyLogMoment out;
    out.sum_form = a_inf.rows() > 0 ? a_inf.row(0).sum() : 0.0;
    out.rho_A_inf = linalg::spectral_radius(a_inf);
    out.ok = out.sum_form < 1.0;
    const bool rho_ok = out.rho_A_inf < 1.0;
    if (rho_ok != out.ok && std::abs(out.sum_form - 1.0) > 1e-9) {
        throw std::logic_error("spectral radius and sum form of A^(inf) disagree");
    }
    return out;
}

Leverage leverage_covariance_11(const LogGarchParams& params, const Innovation& dist) {
    require_11(params, "leverage covariance");
    if (!dist.symmetric()) {
        throw NotApplicable("leverage covariance needs symmetrically distributed innovations");
    }
    const auto& cat = dist.catalog();
    if (!std::isfinite(cat.mean_abs) || !std::isfinite(cat.mean_log_sq) || !std::isfinite(cat.mean_abs_log_sq)) {
        throw NotApplicable("innovation catalog lacks E|eta|, E log eta^2 or E|eta| log eta^2");
    }
    const double ap = params.alpha_plus[0];
    const double am = params.alpha_minus[0];
    const double b = params.beta[0];
    if (!(std::abs(b) + 0.5 * (std::abs(ap) + std::abs(am)) < 1.0)) {
        throw NotApplicable("leverage covariance needs |beta| + (|alpha_plus| + |alpha_minus|)/2 < 1");
    }
    if (!check_any_log_moment(params).ok) {
        throw NotApplicable("leverage covariance needs rho(A^(inf)) < 1");
    }
    const double half_sum = 0.5 * (ap + am);
    const double tau = (params.omega + half_sum * cat.mean_log_sq) / (1.0 - b - half_sum);
    const double cov = 0.5 * (ap - am) * (cat.mean_abs * tau + cat.mean_abs_log_sq);
    return {ap == am ? 0.0 : cov, tau};
}

double compute_lambda(const LogGarchParams& params) {
    const CompanionSystem sys(params);
    const Eigen::MatrixXd a_inf = sys.a_infinity();
    const double rho = linalg::spectral_radius(a_inf);
    if (!(rho < 1.0)) {
        throw NotApplicable("rho(A^(inf)) >= 1: the series defining lambda diverges");
    }
    const double scale = max_abs_alpha(params);
    if (scale == 0.0 || a_inf.rows() == 0) {
        return 0.0;
    }
    const double ratio = rho + 0.1 * (1.0 - rho);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(a_inf.rows(), a_inf.cols());
    double total = 0.0;
    for (long step = 0; step < 100'000'000L; ++step) {
        const double term = power.sum();
        total += term;
        if (term * ratio / (1.0 - ratio) < 1e-12) {
            break;
        }
        power = a_inf * power;
    }
    return scale * total;
}

MomentOrders moment_order_11(const LogGarchParams& params, double s, const Innovation* dist) {
    require_tail_hypotheses(params, "moment order");
    if (!(s > 0.0)) {
        throw InvalidInput("s must be positive");
    }
    if (dist != nullptr && std::isfinite(dist->catalog().tail_index) && !(2.0 * s < dist->catalog().tail_index)) {
        throw NotApplicable("E|eta|^{2s} is infinite for this innovation law");
    }
    const double a = std::max(params.alpha_plus[0], params.alpha_minus[0]);
    return {s / a, 2.0 * s / std::max(a, 1.0)};
}

TailIndices tail_index_11(const LogGarchParams& params, double s_prime) {
    require_tail_hypotheses(params, "tail index");
    if (!(s_prime > 0.0) || !std::isfinite(s_prime)) {
        throw InvalidInput("s' must be positive and finite");
    }
    const double a = std::max(params.alpha_plus[0], params.alpha_minus[0]);
    return {s_prime / a, 2.0 * s_prime / std::max(a, 1.0)};
}

double hill_estimate(std::span<const double> values, std::size_t k) {
    const std::size_t n = values.size();
    if (k < 1 || k >= n) {
        throw InvalidInput("Hill estimator needs 1 <= k < n");
    }
    std::vector<double> x(values.begin(), values.end());
    for (double v : x) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InvalidInput("Hill estimator needs positive finite data");
        }
    }
    // Top k+1 order statistics, descending.
    std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k), x.end(), std::greater<>());
    const double threshold = x[k];
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        acc += std::log(x[i]) - std::log(threshold);
    }
    const double h = acc / static_cast<double>(k);
    if (!(h > 0.0)) {
        throw InvalidInput("Hill estimator is degenerate: zero log-spacings");
    }
    return 1.0 / h;
}

std::size_t default_hill_k(std::size_t n) {
    return static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n), 0.6)));
}

CramerCheck cramer_condition_catalog(const Innovation& dist) {
    switch (dist.kind()) {
    case InnovationKind::StandardNormal:
        return {CramerStatus::Holds, "density bounded near 0 and all moments finite"};
    case InnovationKind::StudentT:
        return {CramerStatus::Holds, "density bounded near 0 and E|eta|^s finite for s < nu"};
    case InnovationKind::TwoPoint:
        return {CramerStatus::Holds, "no density, but |log eta^2| is bounded (here identically 0)"};
    case InnovationKind::Custom:
        break;
    }
    return {CramerStatus::Unknown, "custom sampler: no analytic information"};
}

MomentCondition moment_condition(const LogGarchParams& params, const Innovation& dist, double s) {
    if (!(s > 0.0)) {
        throw InvalidInput("s must be positive");
    }
    MomentCondition out;
    out.lambda = compute_lambda(params);
    const double scale = std::max(out.lambda, 1.0);
    // E exp(c|log eta^2|) = E max(eta^2, eta^-2)^c: needs E|eta|^{-2c} (density at 0) and E|eta|^{2c}.
    switch (dist.kind()) {
    case InnovationKind::StandardNormal:
        out.s_sup = 0.5 / scale;
        break;
    case InnovationKind::StudentT:
        out.s_sup = std::min(0.5, 0.5 * dist.nu()) / scale;
        break;
    case InnovationKind::TwoPoint:
        out.s_sup = kInf;
        break;
    case InnovationKind::Custom:
        out.status = CramerStatus::Unknown;
        out.s_sup = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.status = s < out.s_sup ? CramerStatus::Holds : CramerStatus::Fails;
    return out;
}

DiagnosticsReport diagnose(const LogGarchParams& params, const Innovation& dist, const DiagnoseOptions& opts) {
    params.validate();
    DiagnosticsReport rep;
    const double a = dist.sign_prob();

    bool closed = false;
    if (params.p() == 1 && params.q() == 1) {
        const auto c = lyapunov_closed_11(params, a);
        rep.lyapunov = {c.value, 0.0, LyapunovMethod::ClosedForm};
        closed = true;
    }
    if (!closed) {
        try {
            const auto mc = lyapunov_mc(params, a, opts.lyapunov);
            rep.lyapunov = {mc.estimate, mc.std_error, LyapunovMethod::MonteCarlo};
        } catch (const std::exception& e) {
            rep.not_applicable["lyapunov"] = e.what();
            rep.lyapunov.estimate = std::numeric_limits<double>::quiet_NaN();
        }
    }
    rep.stationary = rep.lyapunov.estimate < 0.0;

    for (int m : opts.moment_orders) {
        try {
            rep.rho_A_m[m] = moment_matrix_A(params, a, m, opts.kronecker_cap).spectral_radius;
        } catch (const std::exception& e) {
            rep.not_applicable["rho_A_" + std::to_string(m)] = e.what();
        }
        try {
            rep.rho_C_m[m] = moment_matrix_C(params, a, m, opts.kronecker_cap).spectral_radius;
        } catch (const std::exception& e) {
            rep.not_applicable["rho_C_" + std::to_string(m)] = e.what();
        }
    }

    const auto any = check_any_log_moment(params);
    rep.rho_A_inf = any.rho_A_inf;
    rep.sum_form = any.sum_form;
    rep.any_log_moment_ok = any.ok;

    try {
        const auto lev = leverage_covariance_11(params, dist);
        rep.leverage_cov = lev.cov;
        rep.tau = lev.tau;
    } catch (const std::exception& e) {
        rep.not_applicable["leverage_cov"] = e.what();
    }

    try {
        const double ti = dist.catalog().tail_index;
        if (!std::isfinite(ti)) {
            throw NotApplicable("innovations are not regularly varying");
        }
        const auto t = tail_index_11(params, 0.5 * ti);
        rep.tail = DiagnosticsReport::Tail{t.sigma2_index, t.eps_index};
    } catch (const std::exception& e) {
        rep.not_applicable["tail"] = e.what();
    }

    try {
        rep.lambda = compute_lambda(params);
        const auto mc = moment_condition(params, dist, 1e-6);
        if (mc.status == CramerStatus::Unknown) {
            throw NotApplicable("moment condition undecidable for a custom sampler");
        }
        rep.moment_order = 2.0 * mc.s_sup;
    } catch (const std::exception& e) {
        if (!rep.lambda) {
            rep.not_applicable["lambda"] = e.what();
        }
        rep.not_applicable["moment_order"] = e.what();
    }

    try {
        rep.moment_orders_11 = moment_order_11(params, 1.0, &dist);
    } catch (const std::exception& e) {
        rep.not_applicable["moment_orders_11"] = e.what();
    }

    rep.cramer = cramer_condition_catalog(dist);
    return rep;
}

} // namespace volalab
