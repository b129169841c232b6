#include "volalab/estimate.hpp"

#include "volalab/errors.hpp"
#include "volalab/innovation.hpp"
#include "volalab/linalg.hpp"
#include "volalab/model.hpp"
#include "volalab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

namespace volalab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Prepared {
    const Series* eps = nullptr;
    std::vector<double> e2;
    std::vector<double> log_e2;
    InitPolicy::Resolved start{};
    double pre_log_e2 = 0.0;
    double pre_abs_eta = 0.0;
    std::size_t r0 = 0;
};

Prepared prepare(const Series& eps, std::size_t r0, const FitOptions& opts) {
    eps.validate();
    Prepared out;
    out.eps = &eps;
    out.r0 = r0;
    const std::size_t n = eps.size();
    out.e2.resize(n);
    out.log_e2.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        out.e2[t] = eps[t] * eps[t];
        out.log_e2[t] = 2.0 * std::log(std::max(std::abs(eps[t]), opts.floor));
    }
    out.start = opts.init_policy.resolve(eps.values);
    out.pre_log_e2 = 2.0 * std::log(std::max(std::sqrt(out.start.eps2), opts.floor));
    out.pre_abs_eta = std::sqrt(out.start.eps2) * std::exp(-0.5 * out.start.log_sigma2);
    return out;
}

// log s~2_t for t = 0..n-1 and, if requested, its gradient (n x d).
bool log_garch_path(const Prepared& data, const Eigen::VectorXd& theta, std::size_t p, std::size_t q,
                    std::vector<double>& h, Eigen::MatrixXd* dh) {
    const std::size_t n = data.e2.size();
    const auto d = static_cast<Eigen::Index>(1 + 2 * q + p);
    const Eigen::Index ia = 1;
    const auto im = static_cast<Eigen::Index>(1 + q);
    const auto ib = static_cast<Eigen::Index>(1 + 2 * q);
    const double omega = theta(0);
    const auto& eps = *data.eps;
    h.resize(n);
    if (dh != nullptr) {
        dh->setZero(static_cast<Eigen::Index>(n), d);
    }
    for (std::size_t t = 0; t < n; ++t) {
        double v = omega;
        const auto ti = static_cast<Eigen::Index>(t);
        for (std::size_t i = 1; i <= q; ++i) {
            const auto k = static_cast<Eigen::Index>(i - 1);
            if (t >= i) {
                const bool pos = eps[t - i] >= 0.0;
                const double le = data.log_e2[t - i];
                v += (pos ? theta(ia + k) : theta(im + k)) * le;
                if (dh != nullptr) {
                    (*dh)(ti, (pos ? ia : im) + k) = le;
                }
            } else {
                v += 0.5 * (theta(ia + k) + theta(im + k)) * data.pre_log_e2;
                if (dh != nullptr) {
                    (*dh)(ti, ia + k) = 0.5 * data.pre_log_e2;
                    (*dh)(ti, im + k) = 0.5 * data.pre_log_e2;
                }
            }
        }
        if (dh != nullptr) {
            (*dh)(ti, 0) = 1.0;
        }
        for (std::size_t j = 1; j <= p; ++j) {
            const auto k = static_cast<Eigen::Index>(j - 1);
            const double b = theta(ib + k);
            const double lag = t >= j ? h[t - j] : data.start.log_sigma2;
            v += b * lag;
            if (dh != nullptr) {
                (*dh)(ti, ib + k) += lag;
                if (t >= j) {
                    dh->row(ti) += b * dh->row(ti - static_cast<Eigen::Index>(j));
                }
            }
        }
        if (!std::isfinite(v)) {
            return false;
        }
        h[t] = v;
    }
    return true;
}

bool egarch_path(const Prepared& data, const Eigen::VectorXd& theta, std::size_t p, std::size_t ell,
                 std::vector<double>& h, Eigen::MatrixXd* dh) {
    const std::size_t n = data.e2.size();
    const auto d = static_cast<Eigen::Index>(1 + 2 * ell + p);
    const Eigen::Index ig = 1;
    const auto id = static_cast<Eigen::Index>(1 + ell);
    const auto ib = static_cast<Eigen::Index>(1 + 2 * ell);
    const auto& eps = *data.eps;
    std::vector<double> eta(n);
    h.resize(n);
    if (dh != nullptr) {
        dh->setZero(static_cast<Eigen::Index>(n), d);
    }
    for (std::size_t t = 0; t < n; ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        double v = theta(0);
        if (dh != nullptr) {
            (*dh)(ti, 0) = 1.0;
        }
        for (std::size_t j = 1; j <= p; ++j) {
            const auto k = static_cast<Eigen::Index>(j - 1);
            const double b = theta(ib + k);
            const double lag = t >= j ? h[t - j] : data.start.log_sigma2;
            v += b * lag;
            if (dh != nullptr) {
                (*dh)(ti, ib + k) += lag;
                if (t >= j) {
                    dh->row(ti) += b * dh->row(ti - static_cast<Eigen::Index>(j));
                }
            }
        }
        for (std::size_t k = 1; k <= ell; ++k) {
            const auto c = static_cast<Eigen::Index>(k - 1);
            const double g = theta(ig + c);
            const double dl = theta(id + c);
            if (t >= k) {
                const double e = eta[t - k];
                const double a = std::abs(e);
                v += g * e + dl * a;
                if (dh != nullptr) {
                    (*dh)(ti, ig + c) += e;
                    (*dh)(ti, id + c) += a;
                    // d eta_s = -eta_s/2 d h_s
                    dh->row(ti) -= 0.5 * (g * e + dl * a) * dh->row(ti - static_cast<Eigen::Index>(k));
                }
            } else {
                v += dl * data.pre_abs_eta;
                if (dh != nullptr) {
                    (*dh)(ti, id + c) += data.pre_abs_eta;
                }
            }
        }
        const double inv_sigma = std::exp(-0.5 * v);
        if (!std::isfinite(v) || !std::isfinite(inv_sigma) || inv_sigma == 0.0) {
            return false;
        }
        h[t] = v;
        eta[t] = eps[t] * inv_sigma;
    }
    return true;
}

struct Kernel {
    ModelFamily family;
    std::size_t p;
    std::size_t q;
    const Prepared* data;
    bool stationarity_penalty;
    bool strict_invertibility;

    bool feasible(const Eigen::VectorXd& theta) const {
        if (!theta.allFinite()) {
            return false;
        }
        if (family == ModelFamily::LogGarch) {
            if (!stationarity_penalty) {
                return true;
            }
            const auto b = theta.tail(static_cast<Eigen::Index>(p));
            return lag_poly_roots_outside(std::vector<double>(b.data(), b.data() + b.size()));
        }
        const EgarchParams par = EgarchParams::from_vector(theta, p, q);
        const auto inv = egarch_invertibility_constraint(par, data->eps->values);
        return strict_invertibility ? inv.strict_ok() : inv.ok();
    }

    bool path(const Eigen::VectorXd& theta, std::vector<double>& h, Eigen::MatrixXd* dh) const {
        return family == ModelFamily::LogGarch ? log_garch_path(*data, theta, p, q, h, dh)
                                               : egarch_path(*data, theta, p, q, h, dh);
    }

    // Q_n and its gradient; +inf when infeasible or overflowing.
    double operator()(const Eigen::VectorXd& theta, Eigen::VectorXd* grad, bool check = true) const {
        if (check && !feasible(theta)) {
            return kInf;
        }
        std::vector<double> h;
        Eigen::MatrixXd dh;
        if (!path(theta, h, grad != nullptr ? &dh : nullptr)) {
            return kInf;
        }
        const std::size_t n = h.size();
        const double count = static_cast<double>(n - data->r0);
        double sum = 0.0;
        if (grad != nullptr) {
            grad->setZero(theta.size());
        }
        for (std::size_t t = data->r0; t < n; ++t) {
            const double ratio = data->e2[t] * std::exp(-h[t]);
            sum += ratio + h[t];
            if (grad != nullptr) {
                *grad += (1.0 - ratio) * dh.row(static_cast<Eigen::Index>(t)).transpose();
            }
        }
        const double value = sum / count;
        if (!std::isfinite(value)) {
            return kInf;
        }
        if (grad != nullptr) {
            *grad /= count;
        }
        return value;
    }
};

void check_window(std::size_t n, std::size_t r0, std::size_t p, std::size_t q) {
    if (n <= r0 + std::max(p, q)) {
        throw InvalidInput("series length must exceed r0 + max(p,q)");
    }
}

double mean_log_e2(const Prepared& data) {
    return std::accumulate(data.log_e2.begin(), data.log_e2.end(), 0.0) / static_cast<double>(data.log_e2.size());
}

Eigen::VectorXd auto_start(ModelFamily family, std::size_t p, std::size_t q, const Prepared& data) {
    const double m = mean_log_e2(data);
    const double level = m - normal_constants::kMeanLogSq;  // mean log sigma^2
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(1 + 2 * q + p));
    const auto ib = static_cast<Eigen::Index>(1 + 2 * q);
    if (family == ModelFamily::LogGarch) {
        const double b = p > 0 ? 0.9 : 0.0;
        const double a = q > 0 ? 0.05 : 0.0;
        if (q > 0) {
            x(1) = a;
            x(1 + static_cast<Eigen::Index>(q)) = a;
        }
        if (p > 0) {
            x(ib) = b;
        }
        x(0) = (1.0 - b) * level - a * m;
    } else {
        const double b = p > 0 ? 0.95 : 0.0;
        const double dl = q > 0 ? 0.2 : 0.0;
        if (q > 0) {
            x(1 + static_cast<Eigen::Index>(q)) = dl;
        }
        if (p > 0) {
            x(ib) = b;
        }
        x(0) = (1.0 - b) * level - dl * normal_constants::kMeanAbs;
    }
    return x;
}

Eigen::VectorXd perturb(ModelFamily family, std::size_t p, std::size_t q, const Eigen::VectorXd& x0, Rng& rng,
                        double shrink) {
    Eigen::VectorXd x = x0;
    const auto qi = static_cast<Eigen::Index>(q);
    const auto ib = 1 + 2 * qi;
    x(0) += shrink * 0.05 * rng.normal();
    for (Eigen::Index k = 0; k < 2 * qi; ++k) {
        x(1 + k) += shrink * (family == ModelFamily::LogGarch ? 0.02 : 0.05) * rng.normal();
    }
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(p); ++j) {
        x(ib + j) = std::min(x(ib + j) + shrink * 0.03 * rng.normal(), 0.995);
    }
    if (family == ModelFamily::Egarch) {
        for (Eigen::Index k = 0; k < qi; ++k) {
            x(1 + qi + k) = std::max(x(1 + qi + k), std::abs(x(1 + k)) + 0.01);
        }
    }
    return x;
}

MomentCatalog empirical_catalog(const std::vector<double>& eta) {
    MomentCatalog cat;
    double ma = 0.0, ml = 0.0, mal = 0.0, m4 = 0.0;
    std::size_t used = 0;
    for (double e : eta) {
        const double a = std::abs(e);
        m4 += e * e * e * e;
        ma += a;
        if (a > 0.0) {
            const double l = std::log(e * e);
            ml += l;
            mal += a * l;
            ++used;
        }
    }
    const double n = static_cast<double>(eta.size());
    cat.mean_abs = ma / n;
    cat.kappa4 = m4 / n;
    if (used > 0) {
        cat.mean_log_sq = ml / static_cast<double>(used);
        cat.mean_abs_log_sq = mal / static_cast<double>(used);
    }
    return cat;
}

FitResult run_fit(ModelFamily family, const Series& eps, std::size_t p, std::size_t q, const FitOptions& opts) {
    opts.validate();
    eps.validate();
    const std::size_t d = 1 + 2 * q + p;
    const std::size_t n = eps.size();
    if (n < 50 * d) {
        throw InvalidInput("sample too small: n = " + std::to_string(n) + " but at least 50*d = " +
                           std::to_string(50 * d) + " observations are required");
    }
    const std::size_t r0 = opts.resolved_r0(p, q);
    check_window(n, r0, p, q);
    const Prepared data = prepare(eps, r0, opts);
    const Kernel kernel{family, p, q, &data, opts.stationarity_penalty, opts.strict_egarch_invertibility};
    const ObjectiveWithGradient fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) { return kernel(x, g); };

    std::vector<Eigen::VectorXd> starts = opts.starting_points;
    for (const auto& s : starts) {
        if (static_cast<std::size_t>(s.size()) != d) {
            throw InvalidInput("starting point has the wrong dimension");
        }
    }
    if (starts.empty()) {
        const Eigen::VectorXd x0 = auto_start(family, p, q, data);
        starts.push_back(x0);
        Rng rng(opts.seed, 0x5eed);
        for (int k = 0; k < opts.optimizer.restarts; ++k) {
            double shrink = 1.0;
            for (int attempt = 0; attempt < 10; ++attempt, shrink *= 0.5) {
                Eigen::VectorXd x = perturb(family, p, q, x0, rng, shrink);
                if (std::isfinite(kernel(x, nullptr))) {
                    starts.push_back(std::move(x));
                    break;
                }
            }
        }
    }

    OptimResult best;
    best.f = kInf;
    bool any_feasible = false;
    for (const auto& s : starts) {
        if (!std::isfinite(kernel(s, nullptr))) {
            continue;
        }
        any_feasible = true;
        OptimResult r = minimize(fn, s, opts.optimizer);
        if (r.f < best.f || (r.f == best.f && r.converged && !best.converged)) {
            best = std::move(r);
        }
    }
    if (!any_feasible) {
        throw EstimationError("no feasible starting point: every start violates the constraints");
    }
    if (!std::isfinite(best.f)) {
        throw EstimationError("optimizer failed to find a finite objective value");
    }

    FitResult res;
    res.family = family;
    res.p = p;
    res.q = q;
    res.theta_hat = best.x;
    res.q_n = best.f;
    res.loglik = -0.5 * best.f;
    res.converged = best.converged;
    res.iterations = best.iterations;
    res.n_obs = n;
    res.r0 = r0;
    res.n_eff = n - r0;
    res.fingerprint = eps.fingerprint();
    res.floor = opts.floor;
    res.init_policy = opts.init_policy;
    if (!res.converged) {
        res.warnings.emplace_back("optimizer did not converge; reporting the best point found");
    }

    std::vector<double> h;
    Eigen::MatrixXd dh;
    kernel.path(best.x, h, &dh);
    const auto di = static_cast<Eigen::Index>(d);
    res.J_hat = Eigen::MatrixXd::Zero(di, di);
    std::vector<double> eta(n);
    double k4 = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        eta[t] = eps[t] * std::exp(-0.5 * h[t]);
        if (t >= r0) {
            const auto row = dh.row(static_cast<Eigen::Index>(t));
            res.J_hat.noalias() += row.transpose() * row;
            k4 += std::pow(eta[t], 4);
        }
    }
    const double count = static_cast<double>(res.n_eff);
    res.J_hat /= count;
    res.J_hat = 0.5 * (res.J_hat + res.J_hat.transpose()).eval();
    res.kappa4_hat = k4 / count;
    res.eta_hat = Series(eta, eps.dates);

    if (res.kappa4_hat - 1.0 < 1e-6) {
        res.warnings.emplace_back(
            "kappa4 - 1 is ~0: degenerate innovations (eta^2 must take at least two values)");
    }
    try {
        const auto cov = asymptotic_covariance(res);
        res.acov = cov.acov;
        res.std_errors = res.acov.diagonal().cwiseMax(0.0).cwiseSqrt();
        res.covariance_available = true;
    } catch (const IllConditioned& e) {
        res.warnings.emplace_back(std::string("covariance unavailable: ") + e.what());
        res.acov = Eigen::MatrixXd::Constant(di, di, std::numeric_limits<double>::quiet_NaN());
        res.std_errors = Eigen::VectorXd::Constant(di, std::numeric_limits<double>::quiet_NaN());
    }

    if (family == ModelFamily::LogGarch && p > 0) {
        const auto b = best.x.tail(static_cast<Eigen::Index>(p));
        if (linalg::spectral_radius(linalg::companion(b)) > 0.999) {
            res.warnings.emplace_back("estimate adjacent to the beta root boundary; asymptotic normality needs an interior point");
        }
    }
    if (family == ModelFamily::Egarch) {
        const EgarchParams par = res.egarch();
        for (std::size_t k = 0; k < q; ++k) {
            if (par.delta[k] - std::abs(par.gamma[k]) < 1e-3) {
                res.warnings.emplace_back("estimate adjacent to the delta >= |gamma| boundary");
            }
        }
        if (p == 1 && q == 1 && !egarch_invertibility_constraint(par, eps.values).strict_ok()) {
            res.warnings.emplace_back("estimate fails the strict (contraction-bound) invertibility sum");
        }
        if (p != 1 || q != 1) {
            res.warnings.emplace_back("invertibility for p, l > 1 enforced heuristically (beta roots and delta >= |gamma|)");
        }
    }

    if (opts.compute_diagnostics && family == ModelFamily::LogGarch) {
        std::vector<double> window(eta.begin() + static_cast<std::ptrdiff_t>(r0), eta.end());
        const double pos = static_cast<double>(std::count_if(window.begin(), window.end(), [](double e) { return e > 0.0; }));
        double a = pos / static_cast<double>(window.size());
        a = std::clamp(a, 1e-6, 1.0 - 1e-6);
        auto pool = std::make_shared<std::vector<double>>(window);
        const Innovation empirical = Innovation::custom(
            [pool](Rng& rng) {
                const auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(pool->size()));
                return (*pool)[std::min(k, pool->size() - 1)];
            },
            a, empirical_catalog(window), "empirical residuals");
        DiagnoseOptions dopts;
        dopts.lyapunov.seed = opts.seed;
        res.diagnostics = diagnose(res.log_garch(), empirical, dopts);
    }
    return res;
}

} // namespace

std::string to_string(ModelFamily family) {
    return family == ModelFamily::LogGarch ? "loggarch" : "egarch";
}

ModelFamily parse_family(const std::string& name) {
    if (name == "loggarch" || name == "log-garch") {
        return ModelFamily::LogGarch;
    }
    if (name == "egarch") {
        return ModelFamily::Egarch;
    }
    throw InvalidInput("unknown model family '" + name + "' (expected loggarch or egarch)");
}

void FitOptions::validate() const {
    if (!(floor > 0.0)) {
        throw InvalidInput("floor must be positive");
    }
    optimizer.validate();
}

std::size_t FitOptions::resolved_r0(std::size_t p, std::size_t q) const {
    return r0 < 0 ? std::max(p, q) + 10 : static_cast<std::size_t>(r0);
}

LogGarchParams FitResult::log_garch() const {
    if (family != ModelFamily::LogGarch) {
        throw InvalidInput("fit is not a log-GARCH fit");
    }
    return LogGarchParams::from_vector(theta_hat, p, q);
}

EgarchParams FitResult::egarch() const {
    if (family != ModelFamily::Egarch) {
        throw InvalidInput("fit is not an EGARCH fit");
    }
    return EgarchParams::from_vector(theta_hat, p, q);
}

std::vector<std::string> FitResult::parameter_names() const {
    std::vector<std::string> names{"omega"};
    const bool lg = family == ModelFamily::LogGarch;
    const bool one = q == 1;
    for (std::size_t i = 1; i <= q; ++i) {
        names.push_back((lg ? "alpha_plus" : "gamma") + (one ? std::string() : std::to_string(i)));
    }
    for (std::size_t i = 1; i <= q; ++i) {
        names.push_back((lg ? "alpha_minus" : "delta") + (one ? std::string() : std::to_string(i)));
    }
    for (std::size_t j = 1; j <= p; ++j) {
        names.push_back("beta" + (p == 1 ? std::string() : std::to_string(j)));
    }
    return names;
}

double qmle_objective(const LogGarchParams& params, const Series& eps, const FitOptions& opts) {
    params.validate();
    opts.validate();
    const std::size_t r0 = opts.resolved_r0(params.p(), params.q());
    check_window(eps.size(), r0, params.p(), params.q());
    const Prepared data = prepare(eps, r0, opts);
    const Kernel kernel{ModelFamily::LogGarch, params.p(), params.q(), &data, false, false};
    return kernel(params.to_vector(), nullptr, false);
}

double qmle_objective(const EgarchParams& params, const Series& eps, const FitOptions& opts) {
    params.validate();
    opts.validate();
    const std::size_t r0 = opts.resolved_r0(params.p(), params.ell());
    check_window(eps.size(), r0, params.p(), params.ell());
    const Prepared data = prepare(eps, r0, opts);
    const Kernel kernel{ModelFamily::Egarch, params.p(), params.ell(), &data, false, false};
    return kernel(params.to_vector(), nullptr, false);
}

Eigen::MatrixXd grad_log_sigma2(const LogGarchParams& params, const Series& eps, const FitOptions& opts) {
    params.validate();
    opts.validate();
    const Prepared data = prepare(eps, 0, opts);
    std::vector<double> h;
    Eigen::MatrixXd dh;
    if (!log_garch_path(data, params.to_vector(), params.p(), params.q(), h, &dh)) {
        throw NumericDegeneracy("log-GARCH filter overflowed", h.size());
    }
    return dh;
}

Eigen::MatrixXd grad_log_sigma2(const EgarchParams& params, const Series& eps, const FitOptions& opts) {
    params.validate();
    opts.validate();
    const Prepared data = prepare(eps, 0, opts);
    std::vector<double> h;
    Eigen::MatrixXd dh;
    if (!egarch_path(data, params.to_vector(), params.p(), params.ell(), h, &dh)) {
        throw NumericDegeneracy("EGARCH filtered volatility degenerated", h.size());
    }
    return dh;
}

FitResult fit_log_garch(const Series& eps, std::size_t p, std::size_t q, const FitOptions& opts) {
    return run_fit(ModelFamily::LogGarch, eps, p, q, opts);
}

FitResult fit_egarch(const Series& eps, std::size_t p, std::size_t ell, const FitOptions& opts) {
    if (ell == 0) {
        throw InvalidInput("EGARCH needs l >= 1");
    }
    return run_fit(ModelFamily::Egarch, eps, p, ell, opts);
}

FitResult fit(ModelFamily family, const Series& eps, std::size_t p, std::size_t q, const FitOptions& opts) {
    return family == ModelFamily::LogGarch ? fit_log_garch(eps, p, q, opts) : fit_egarch(eps, p, q, opts);
}

AsymptoticCovariance asymptotic_covariance(const FitResult& fit) {
    if (fit.J_hat.rows() == 0 || fit.n_eff == 0) {
        throw InvalidInput("fit carries no information matrix");
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(fit.J_hat);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(cond < 1e12)) {
        throw IllConditioned("information matrix J is singular or ill-conditioned (identifiability failure)", cond);
    }
    AsymptoticCovariance out;
    out.factor = fit.kappa4_hat - 1.0;
    const Eigen::MatrixXd j_inv = fit.J_hat.ldlt().solve(Eigen::MatrixXd::Identity(fit.J_hat.rows(), fit.J_hat.cols()));
    out.acov = out.factor * j_inv / static_cast<double>(fit.n_eff);
    out.acov = 0.5 * (out.acov + out.acov.transpose()).eval();
    return out;
}

double reevaluate_objective(const FitResult& fit, const Series& eps) {
    FitOptions opts;
    opts.r0 = static_cast<int>(fit.r0);
    opts.init_policy = fit.init_policy;
    opts.floor = fit.floor;
    return fit.family == ModelFamily::LogGarch ? qmle_objective(fit.log_garch(), eps, opts)
                                               : qmle_objective(fit.egarch(), eps, opts);
}

} // namespace volalab
