#include "volalab/montecarlo.hpp"

#include "volalab/errors.hpp"
#include "volalab/inference.hpp"
#include "volalab/simulate.hpp"

#include <boost/math/distributions/normal.hpp>

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace volalab {

namespace {

RepFit fit_one(ModelFamily family, const Series& eps, const McConfig& cfg) {
    RepFit out;
    try {
        const FitResult f = fit(family, eps, cfg.p, cfg.q, cfg.fit_options);
        out.ok = true;
        out.theta = f.theta_hat;
        out.std_errors = f.std_errors;
        out.loglik = f.loglik;
        out.converged = f.converged;
        out.covariance_available = f.covariance_available;
        out.wald_p = std::numeric_limits<double>::quiet_NaN();
        if (f.covariance_available) {
            try {
                out.wald_p = wald_symmetry(f).p_value;
            } catch (const std::exception&) {
            }
        }
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

} // namespace

void McConfig::validate() const {
    const std::size_t d = 1 + 2 * q + p;
    if (static_cast<std::size_t>(theta.size()) != d) {
        throw InvalidInput("truth parameter vector has the wrong length for the given orders");
    }
    if (reps == 0 || n == 0) {
        throw InvalidInput("reps and n must be positive");
    }
    if (!(ci_level > 0.0 && ci_level < 1.0) || !(wald_level > 0.0 && wald_level < 1.0)) {
        throw InvalidInput("levels must lie in (0,1)");
    }
    fit_options.validate();
}

RepOutcome run_replication(const McConfig& cfg, std::size_t index) {
    RepOutcome out;
    out.index = index;
    SimConfig sc;
    sc.n = cfg.n;
    sc.burn_in = cfg.burn_in;
    sc.seed = cfg.seed;
    sc.stream = index;
    Series eps;
    try {
        if (cfg.truth == ModelFamily::LogGarch) {
            eps = simulate_log_garch(LogGarchParams::from_vector(cfg.theta, cfg.p, cfg.q), cfg.dist, sc).eps;
        } else {
            eps = simulate_egarch(EgarchParams::from_vector(cfg.theta, cfg.p, cfg.q), cfg.dist, sc).eps;
        }
    } catch (const std::exception& e) {
        out.error = std::string("simulation failed: ") + e.what();
        return out;
    }
    out.truth_fit = fit_one(cfg.truth, eps, cfg);
    if (cfg.fit_both) {
        const ModelFamily other = cfg.truth == ModelFamily::LogGarch ? ModelFamily::Egarch : ModelFamily::LogGarch;
        out.other_fit = fit_one(other, eps, cfg);
        if (out.truth_fit.ok && out.other_fit->ok) {
            out.truth_wins = out.truth_fit.loglik > out.other_fit->loglik;
        }
    }
    return out;
}

McSummary summarize(const McConfig& cfg, const std::vector<RepOutcome>& reps) {
    const Eigen::Index d = cfg.theta.size();
    McSummary s;
    s.mean_theta = Eigen::VectorXd::Zero(d);
    s.rmse = Eigen::VectorXd::Zero(d);
    s.mean_se = Eigen::VectorXd::Zero(d);
    s.coverage = Eigen::VectorXd::Zero(d);
    const boost::math::normal_distribution<> z;
    const double crit = boost::math::quantile(z, 0.5 + 0.5 * cfg.ci_level);
    std::size_t rejections = 0;
    for (const auto& r : reps) {
        if (r.truth_wins) {
            ++s.comparisons;
            s.truth_wins += *r.truth_wins ? 1 : 0;
        }
        if (!r.truth_fit.ok) {
            continue;
        }
        ++s.reps_ok;
        const Eigen::VectorXd err = r.truth_fit.theta - cfg.theta;
        s.mean_theta += r.truth_fit.theta;
        s.rmse += err.cwiseAbs2();
        if (r.truth_fit.covariance_available) {
            ++s.coverage_count;
            s.mean_se += r.truth_fit.std_errors;
            for (Eigen::Index i = 0; i < d; ++i) {
                if (std::abs(err(i)) <= crit * r.truth_fit.std_errors(i)) {
                    s.coverage(i) += 1.0;
                }
            }
        }
        if (std::isfinite(r.truth_fit.wald_p)) {
            ++s.wald_count;
            rejections += r.truth_fit.wald_p < cfg.wald_level ? 1 : 0;
        }
    }
    if (s.reps_ok > 0) {
        const double k = static_cast<double>(s.reps_ok);
        s.mean_theta /= k;
        s.rmse = (s.rmse / k).cwiseSqrt();
    }
    s.bias = s.mean_theta - cfg.theta;
    if (s.coverage_count > 0) {
        s.mean_se /= static_cast<double>(s.coverage_count);
        s.coverage /= static_cast<double>(s.coverage_count);
    }
    if (s.wald_count > 0) {
        s.wald_rejection_rate = static_cast<double>(rejections) / static_cast<double>(s.wald_count);
    }
    return s;
}

McReport run_montecarlo(const McConfig& cfg) {
    cfg.validate();
    McReport report;
    report.config = cfg;
    report.config.fit_options.compute_diagnostics = false;
    report.reps.resize(cfg.reps);
    {
        FitResult names;
        names.family = cfg.truth;
        names.p = cfg.p;
        names.q = cfg.q;
        report.parameter_names = names.parameter_names();
    }
    unsigned jobs = cfg.jobs == 0 ? std::max(1U, std::thread::hardware_concurrency()) : cfg.jobs;
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, cfg.reps));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cfg.reps; i = next++) {
            report.reps[i] = run_replication(report.config, i);
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    report.summary = summarize(cfg, report.reps);
    return report;
}

} // namespace volalab
