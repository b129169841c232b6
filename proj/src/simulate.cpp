#include "volalab/simulate.hpp"

#include "volalab/errors.hpp"

#include <cmath>
#include <numeric>

namespace volalab {

namespace {

constexpr double kExplosionBound = 700.0;

void check_bound(double h, std::size_t step) {
    if (!std::isfinite(h) || std::abs(h) > kExplosionBound) {
        throw SimulationExplosion("|log sigma^2| exceeded 700; parameters are likely non-stationary", step);
    }
}

// Rough stationary mean of log sigma^2 under a symmetrised model, used only as a starting level.
double auto_start(double omega, double sum_alpha_half, double sum_beta, double mean_log_sq) {
    const double den = 1.0 - sum_beta - sum_alpha_half;
    if (std::abs(den) < 1e-3) {
        return 0.0;
    }
    const double drift = std::isfinite(mean_log_sq) ? sum_alpha_half * mean_log_sq : 0.0;
    const double v = (omega + drift) / den;
    return std::isfinite(v) && std::abs(v) < 50.0 ? v : 0.0;
}

std::vector<double> initial_levels(const SimConfig& cfg, std::size_t lags, double fallback) {
    if (!cfg.initial_log_sigma2.empty()) {
        if (cfg.initial_log_sigma2.size() < lags) {
            throw InvalidInput("initial_log_sigma2 needs one value per lag");
        }
        return cfg.initial_log_sigma2;
    }
    return std::vector<double>(lags, fallback);
}

} // namespace

void SimConfig::validate() const {
    if (n < 1) {
        throw InvalidInput("simulation length must be at least 1");
    }
    for (double v : initial_log_sigma2) {
        if (!std::isfinite(v)) {
            throw InvalidInput("non-finite initial log sigma^2");
        }
    }
}

Simulation simulate_log_garch(const LogGarchParams& params, const Innovation& dist, const SimConfig& cfg) {
    params.validate();
    cfg.validate();
    const std::size_t p = params.p();
    const std::size_t q = params.q();
    const std::size_t lag = params.r();
    const std::size_t total = cfg.burn_in + cfg.n;
    Rng rng(cfg.seed, cfg.stream);

    double half_alpha = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        half_alpha += 0.5 * (params.alpha_plus[i] + params.alpha_minus[i]);
    }
    const double sum_beta = std::accumulate(params.beta.begin(), params.beta.end(), 0.0);
    const auto start = initial_levels(cfg, lag, auto_start(params.omega, half_alpha, sum_beta,
                                                           dist.catalog().mean_log_sq));

    // Index `lag + t` holds time t; the first `lag` slots are the pre-sample.
    std::vector<double> h(lag + total), eta(lag + total), log_e2(lag + total);
    for (std::size_t k = 0; k < lag; ++k) {
        h[k] = start[lag - 1 - k];
        eta[k] = dist.draw(rng);
        log_e2[k] = h[k] + std::log(eta[k] * eta[k]);
    }
    for (std::size_t s = lag; s < lag + total; ++s) {
        double v = params.omega;
        for (std::size_t i = 1; i <= q; ++i) {
            const double a = eta[s - i] > 0.0 ? params.alpha_plus[i - 1]
                             : eta[s - i] < 0.0 ? params.alpha_minus[i - 1]
                                                : 0.0;
            if (a != 0.0) {
                v += a * log_e2[s - i];
            }
        }
        for (std::size_t j = 1; j <= p; ++j) {
            v += params.beta[j - 1] * h[s - j];
        }
        check_bound(v, s - lag + 1);
        h[s] = v;
        eta[s] = dist.draw(rng);
        log_e2[s] = v + std::log(eta[s] * eta[s]);
    }

    Simulation out;
    out.vol.origin = VolOrigin::Generative;
    const std::size_t first = lag + cfg.burn_in;
    out.vol.log_sigma2.assign(h.begin() + static_cast<std::ptrdiff_t>(first), h.end());
    out.eta.assign(eta.begin() + static_cast<std::ptrdiff_t>(first), eta.end());
    out.eps.values.resize(cfg.n);
    for (std::size_t t = 0; t < cfg.n; ++t) {
        out.eps.values[t] = std::exp(0.5 * out.vol.log_sigma2[t]) * out.eta[t];
    }
    return out;
}

Simulation simulate_egarch(const EgarchParams& params, const Innovation& dist, const SimConfig& cfg) {
    params.validate();
    cfg.validate();
    const std::size_t p = params.p();
    const std::size_t ell = params.ell();
    const std::size_t lag = std::max(p, ell);
    const std::size_t total = cfg.burn_in + cfg.n;
    Rng rng(cfg.seed, cfg.stream);

    const double sum_beta = std::accumulate(params.beta.begin(), params.beta.end(), 0.0);
    double drift = 0.0;
    if (std::isfinite(dist.catalog().mean_abs)) {
        drift = std::accumulate(params.delta.begin(), params.delta.end(), 0.0) * dist.catalog().mean_abs;
    }
    const auto start = initial_levels(cfg, lag, auto_start(params.omega + drift, 0.0, sum_beta, 0.0));

    std::vector<double> h(lag + total), eta(lag + total);
    for (std::size_t k = 0; k < lag; ++k) {
        h[k] = start[lag - 1 - k];
        eta[k] = dist.draw(rng);
    }
    for (std::size_t s = lag; s < lag + total; ++s) {
        double v = params.omega;
        for (std::size_t j = 1; j <= p; ++j) {
            v += params.beta[j - 1] * h[s - j];
        }
        for (std::size_t k = 1; k <= ell; ++k) {
            v += params.gamma[k - 1] * eta[s - k] + params.delta[k - 1] * std::abs(eta[s - k]);
        }
        check_bound(v, s - lag + 1);
        h[s] = v;
        eta[s] = dist.draw(rng);
    }

    Simulation out;
    out.vol.origin = VolOrigin::Generative;
    const std::size_t first = lag + cfg.burn_in;
    out.vol.log_sigma2.assign(h.begin() + static_cast<std::ptrdiff_t>(first), h.end());
    out.eta.assign(eta.begin() + static_cast<std::ptrdiff_t>(first), eta.end());
    out.eps.values.resize(cfg.n);
    for (std::size_t t = 0; t < cfg.n; ++t) {
        out.eps.values[t] = std::exp(0.5 * out.vol.log_sigma2[t]) * out.eta[t];
    }
    return out;
}

AcdSimulation simulate_log_acd(const LogGarchParams& params, const DurationInnovation& z_dist, double dir_prob,
                               const SimConfig& cfg) {
    params.validate();
    cfg.validate();
    if (!(dir_prob > 0.0 && dir_prob < 1.0)) {
        throw InvalidInput("direction probability must lie in (0,1)");
    }
    const std::size_t p = params.p();
    const std::size_t q = params.q();
    const std::size_t lag = params.r();
    const std::size_t total = cfg.burn_in + cfg.n;
    Rng rng(cfg.seed, cfg.stream);

    double alpha_avg = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        alpha_avg += dir_prob * params.alpha_plus[i] + (1.0 - dir_prob) * params.alpha_minus[i];
    }
    const double sum_beta = std::accumulate(params.beta.begin(), params.beta.end(), 0.0);
    const auto start = initial_levels(cfg, lag, auto_start(params.omega, alpha_avg, sum_beta, 0.0));

    std::vector<double> log_psi(lag + total), log_x(lag + total);
    std::vector<int> y(lag + total);
    auto draw_pair = [&](std::size_t s) {
        const double z = z_dist.draw(rng);
        if (!(z > 0.0)) {
            throw InvalidInput("duration innovation must be positive");
        }
        log_x[s] = log_psi[s] + std::log(z);
        y[s] = rng.uniform() < dir_prob ? 1 : -1;
    };
    for (std::size_t k = 0; k < lag; ++k) {
        log_psi[k] = start[lag - 1 - k];
        draw_pair(k);
    }
    for (std::size_t s = lag; s < lag + total; ++s) {
        double v = params.omega;
        for (std::size_t i = 1; i <= q; ++i) {
            v += (y[s - i] == 1 ? params.alpha_plus[i - 1] : params.alpha_minus[i - 1]) * log_x[s - i];
        }
        for (std::size_t j = 1; j <= p; ++j) {
            v += params.beta[j - 1] * log_psi[s - j];
        }
        check_bound(v, s - lag + 1);
        log_psi[s] = v;
        draw_pair(s);
    }

    AcdSimulation out;
    const std::size_t first = lag + cfg.burn_in;
    out.log_psi.assign(log_psi.begin() + static_cast<std::ptrdiff_t>(first), log_psi.end());
    out.directions.assign(y.begin() + static_cast<std::ptrdiff_t>(first), y.end());
    out.durations.values.resize(cfg.n);
    for (std::size_t t = 0; t < cfg.n; ++t) {
        out.durations.values[t] = std::exp(log_x[first + t]);
    }
    return out;
}

ImpactCurves impact_curves(const LogGarchParams& log_garch, const EgarchParams& egarch, const Garch11& garch,
                           const std::vector<double>& shocks, double sigma0_sq) {
    if (!(sigma0_sq > 0.0) || !std::isfinite(sigma0_sq)) {
        throw InvalidInput("sigma0^2 must be positive");
    }
    if (log_garch.p() != 1 || log_garch.q() != 1 || egarch.p() != 1 || egarch.ell() != 1) {
        throw InvalidInput("impact curves use (1,1) models");
    }
    for (double s : shocks) {
        if (!std::isfinite(s)) {
            throw InvalidInput("non-finite shock");
        }
    }
    const std::size_t T = shocks.size();
    ImpactCurves out;
    for (VolPath* path : {&out.log_garch, &out.egarch, &out.garch}) {
        path->origin = VolOrigin::Generative;
        path->log_sigma2.resize(T + 1);
        path->log_sigma2[0] = std::log(sigma0_sq);
    }
    double var = sigma0_sq;
    for (std::size_t t = 0; t < T; ++t) {
        const double eta = shocks[t];
        const double h_lg = out.log_garch.log_sigma2[t];
        const double a = eta > 0.0 ? log_garch.alpha_plus[0] : eta < 0.0 ? log_garch.alpha_minus[0] : 0.0;
        const double next_lg =
            log_garch.omega + (a != 0.0 ? a * (h_lg + std::log(eta * eta)) : 0.0) + log_garch.beta[0] * h_lg;

        const double h_eg = out.egarch.log_sigma2[t];
        const double next_eg =
            egarch.omega + egarch.beta[0] * h_eg + egarch.gamma[0] * eta + egarch.delta[0] * std::abs(eta);

        var = garch.omega + garch.alpha * var * eta * eta + garch.beta * var;

        check_bound(next_lg, t + 1);
        check_bound(next_eg, t + 1);
        if (!(var > 0.0) || !std::isfinite(var)) {
            throw SimulationExplosion("GARCH variance left (0, inf)", t + 1);
        }
        out.log_garch.log_sigma2[t + 1] = next_lg;
        out.egarch.log_sigma2[t + 1] = next_eg;
        out.garch.log_sigma2[t + 1] = std::log(var);
    }
    return out;
}

ImpactCalibration default_impact_calibration() {
    constexpr double kLongRunVar = 0.02;
    const double level = std::log(kLongRunVar);
    const Garch11 garch{kLongRunVar * (1.0 - 0.97), 0.09, 0.88};
    // Fixed points with eta^2 = 1: log-GARCH h = omega/(1-alpha-beta), EGARCH h = (omega+delta)/(1-beta).
    const double lg_alpha = 0.02;
    const double lg_beta = 0.971;
    const double eg_delta = 0.227;
    const double eg_beta = 0.963;
    return {LogGarchParams::make11(level * (1.0 - lg_alpha - lg_beta), lg_alpha, lg_alpha, lg_beta),
            EgarchParams::make11(level * (1.0 - eg_beta) - eg_delta, 0.0, eg_delta, eg_beta), garch, kLongRunVar};
}

std::vector<double> impact_scenario(const std::string& name, std::size_t length) {
    if (length < 2) {
        throw InvalidInput("scenario length must be at least 2");
    }
    std::vector<double> shocks(length, 1.0);
    const std::size_t mid = length / 2;
    if (name == "large-shock") {
        shocks[mid] = 5.0;
    } else if (name == "tiny-run") {
        for (std::size_t t = 0; t < mid; ++t) {
            shocks[t] = 0.01;
        }
    } else if (name == "single-tiny") {
        shocks[mid] = 1e-4;
    } else if (name != "constant") {
        throw InvalidInput("unknown impact scenario '" + name + "'");
    }
    return shocks;
}

} // namespace volalab
