#include "volalab/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace volalab {

namespace {

std::string fixed(double v, int digits = 3) {
    if (std::isnan(v)) {
        return "NA";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

const char* status_name(CramerStatus s) {
    switch (s) {
    case CramerStatus::Holds:
        return "holds";
    case CramerStatus::Fails:
        return "fails";
    case CramerStatus::Unknown:
        break;
    }
    return "unknown";
}

Json rep_fit_json(const RepFit& f) {
    Json j;
    j["ok"] = f.ok;
    if (!f.ok) {
        j["error"] = f.error;
        return j;
    }
    j["theta"] = json_vector(f.theta);
    j["std_errors"] = json_vector(f.std_errors);
    j["loglik"] = json_number(f.loglik);
    j["converged"] = f.converged;
    j["wald_p"] = json_number(f.wald_p);
    return j;
}

} // namespace

Json json_number(double v) {
    if (std::isnan(v)) {
        return nullptr;
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

Json json_vector(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(json_number(v(i)));
    }
    return a;
}

Json json_matrix(const Eigen::MatrixXd& m) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        a.push_back(json_vector(m.row(i).transpose()));
    }
    return a;
}

Json to_json(const DiagnosticsReport& rep) {
    Json j;
    j["lyapunov"] = {{"estimate", json_number(rep.lyapunov.estimate)},
                     {"std_error", json_number(rep.lyapunov.std_error)},
                     {"method", rep.lyapunov.method == LyapunovMethod::ClosedForm ? "closed-form" : "monte-carlo"}};
    j["stationary"] = rep.stationary;
    Json ra = Json::object(), rc = Json::object();
    for (const auto& [m, v] : rep.rho_A_m) {
        ra[std::to_string(m)] = json_number(v);
    }
    for (const auto& [m, v] : rep.rho_C_m) {
        rc[std::to_string(m)] = json_number(v);
    }
    j["rho_A_m"] = ra;
    j["rho_C_m"] = rc;
    j["rho_A_inf"] = json_number(rep.rho_A_inf);
    j["sum_form"] = json_number(rep.sum_form);
    j["any_log_moment_ok"] = rep.any_log_moment_ok;
    j["leverage_cov"] = rep.leverage_cov ? json_number(*rep.leverage_cov) : Json(nullptr);
    j["tau"] = rep.tau ? json_number(*rep.tau) : Json(nullptr);
    if (rep.tail) {
        j["tail"] = {{"sigma2_index", json_number(rep.tail->sigma2_index)},
                     {"eps_index", json_number(rep.tail->eps_index)}};
    } else {
        j["tail"] = nullptr;
    }
    j["lambda"] = rep.lambda ? json_number(*rep.lambda) : Json(nullptr);
    j["moment_order"] = rep.moment_order ? json_number(*rep.moment_order) : Json(nullptr);
    if (rep.moment_orders_11) {
        j["moment_orders_11"] = {{"sigma2_order", json_number(rep.moment_orders_11->sigma2_order)},
                                 {"eps_order", json_number(rep.moment_orders_11->eps_order)}};
    } else {
        j["moment_orders_11"] = nullptr;
    }
    j["cramer"] = {{"status", status_name(rep.cramer.status)}, {"note", rep.cramer.note}};
    Json na = Json::object();
    for (const auto& [k, v] : rep.not_applicable) {
        na[k] = v;
    }
    j["not_applicable"] = na;
    return j;
}

Json to_json(const WaldReport& wald) {
    return {{"restriction", wald.restriction},
            {"statistic", json_number(wald.statistic)},
            {"dof", wald.dof},
            {"p_value", json_number(wald.p_value)}};
}

Json to_json(const ComparisonReport& cmp) {
    Json j;
    Json rows = Json::array();
    for (const auto& e : cmp.entries) {
        rows.push_back({{"model", e.label}, {"loglik", json_number(e.loglik)}, {"q_n", json_number(e.q_n)}});
    }
    j["models"] = rows;
    j["tie"] = cmp.tie;
    j["winner"] = cmp.tie ? Json(nullptr) : Json(cmp.entries[cmp.winner].label);
    return j;
}

Json to_json(const FitResult& fit, const std::optional<WaldReport>& wald, bool with_residuals) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["model"] = to_string(fit.family);
    j["p"] = fit.p;
    j[fit.family == ModelFamily::LogGarch ? "q" : "l"] = fit.q;
    const auto names = fit.parameter_names();
    Json est = Json::object(), se = Json::object();
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        est[names[i]] = json_number(fit.theta_hat(k));
        se[names[i]] = fit.std_errors.size() > k ? json_number(fit.std_errors(k)) : Json(nullptr);
    }
    j["estimates"] = est;
    j["std_errors"] = se;
    j["loglik"] = json_number(fit.loglik);
    j["q_n"] = json_number(fit.q_n);
    j["kappa4_hat"] = json_number(fit.kappa4_hat);
    j["converged"] = fit.converged;
    j["covariance_available"] = fit.covariance_available;
    j["n_obs"] = fit.n_obs;
    j["r0"] = fit.r0;
    j["n_eff"] = fit.n_eff;
    j["floor"] = json_number(fit.floor);
    j["J_hat"] = json_matrix(fit.J_hat);
    j["acov"] = json_matrix(fit.acov);
    j["wald_symmetry"] = wald ? to_json(*wald) : Json(nullptr);
    j["diagnostics"] = fit.diagnostics ? to_json(*fit.diagnostics) : Json(nullptr);
    j["warnings"] = fit.warnings;
    if (with_residuals) {
        j["eta_hat"] = fit.eta_hat.values;
    }
    return j;
}

Json to_json(const McReport& mc) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["truth"] = to_string(mc.config.truth);
    j["theta0"] = json_vector(mc.config.theta);
    j["parameters"] = mc.parameter_names;
    j["n"] = mc.config.n;
    j["reps"] = mc.config.reps;
    j["seed"] = mc.config.seed;
    j["dist"] = mc.config.dist.name();
    j["fit_both"] = mc.config.fit_both;
    Json rows = Json::array();
    for (const auto& r : mc.reps) {
        Json row;
        row["index"] = r.index;
        if (!r.error.empty()) {
            row["error"] = r.error;
        }
        row["truth_fit"] = rep_fit_json(r.truth_fit);
        if (r.other_fit) {
            row["other_fit"] = rep_fit_json(*r.other_fit);
        }
        row["truth_wins"] = r.truth_wins ? Json(*r.truth_wins) : Json(nullptr);
        rows.push_back(row);
    }
    j["replications"] = rows;
    const auto& s = mc.summary;
    j["summary"] = {{"reps_ok", s.reps_ok},
                    {"mean_theta", json_vector(s.mean_theta)},
                    {"bias", json_vector(s.bias)},
                    {"rmse", json_vector(s.rmse)},
                    {"mean_std_error", json_vector(s.mean_se)},
                    {"coverage", json_vector(s.coverage)},
                    {"ci_level", mc.config.ci_level},
                    {"truth_wins", s.truth_wins},
                    {"comparisons", s.comparisons},
                    {"wald_rejection_rate", json_number(s.wald_rejection_rate)},
                    {"wald_count", s.wald_count}};
    return j;
}

std::string fit_table(const std::vector<FitResult>& fits, const std::vector<std::optional<WaldReport>>& walds) {
    std::ostringstream out;
    constexpr std::size_t w = 10;
    for (std::size_t k = 0; k < fits.size(); ++k) {
        const auto& f = fits[k];
        const auto names = f.parameter_names();
        out << pad("Model", 16);
        for (const auto& n : names) {
            out << pad(n, w);
        }
        out << pad("p-val", w) << "Log-Lik.\n";
        out << pad(to_string(f.family) + "(" + std::to_string(f.p) + "," + std::to_string(f.q) + ")", 16);
        for (Eigen::Index i = 0; i < f.theta_hat.size(); ++i) {
            out << pad(fixed(f.theta_hat(i)), w);
        }
        const bool has_wald = k < walds.size() && walds[k].has_value();
        out << pad(has_wald ? fixed(walds[k]->p_value, 2) : "NA", w) << fixed(f.loglik, 4) << '\n';
        out << pad("", 16);
        for (Eigen::Index i = 0; i < f.theta_hat.size(); ++i) {
            const double se = f.std_errors.size() > i ? f.std_errors(i) : std::nan("");
            out << pad("(" + fixed(se) + ")", w);
        }
        out << '\n';
    }
    return out.str();
}

std::string diagnostics_table(const DiagnosticsReport& rep) {
    std::ostringstream out;
    auto line = [&](const std::string& k, const std::string& v) { out << pad(k, 26) << v << '\n'; };
    line("lyapunov", fixed(rep.lyapunov.estimate, 6) +
                         (rep.lyapunov.method == LyapunovMethod::ClosedForm ? " (closed form)"
                                                                            : " (mc, se " + fixed(rep.lyapunov.std_error, 6) + ")"));
    line("stationary", rep.stationary ? "yes" : "no");
    for (const auto& [m, v] : rep.rho_A_m) {
        line("rho(A^(" + std::to_string(m) + "))", fixed(v, 6));
    }
    for (const auto& [m, v] : rep.rho_C_m) {
        line("rho(C^(" + std::to_string(m) + "))", fixed(v, 6));
    }
    line("rho(A^(inf))", fixed(rep.rho_A_inf, 6));
    line("all log-moments finite", rep.any_log_moment_ok ? "yes" : "no");
    line("leverage cov", rep.leverage_cov ? fixed(*rep.leverage_cov, 6) : "n/a");
    line("tau", rep.tau ? fixed(*rep.tau, 6) : "n/a");
    line("lambda", rep.lambda ? fixed(*rep.lambda, 6) : "n/a");
    line("moment order 2s", rep.moment_order ? fixed(*rep.moment_order, 6) : "n/a");
    if (rep.tail) {
        line("tail index sigma^2", fixed(rep.tail->sigma2_index, 4));
        line("tail index e", fixed(rep.tail->eps_index, 4));
    } else {
        line("tail indices", "n/a");
    }
    line("cramer condition", std::string(status_name(rep.cramer.status)) + " - " + rep.cramer.note);
    for (const auto& [k, v] : rep.not_applicable) {
        line("  n/a " + k, v);
    }
    return out.str();
}

std::string montecarlo_table(const McReport& mc) {
    std::ostringstream out;
    constexpr std::size_t w = 11;
    const auto& s = mc.summary;
    out << pad("", 12);
    for (const auto& n : mc.parameter_names) {
        out << pad(n, w);
    }
    out << '\n';
    auto row = [&](const std::string& label, const Eigen::VectorXd& v, int digits) {
        out << pad(label, 12);
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            out << pad(fixed(v(i), digits), w);
        }
        out << '\n';
    };
    row("truth", mc.config.theta, 4);
    row("mean", s.mean_theta, 4);
    row("bias", s.bias, 4);
    row("rmse", s.rmse, 4);
    row("mean s.e.", s.mean_se, 4);
    row("coverage", s.coverage, 3);
    out << "replications ok: " << s.reps_ok << "/" << mc.config.reps << '\n';
    if (s.comparisons > 0) {
        out << "true family wins: " << s.truth_wins << "/" << s.comparisons << '\n';
    }
    if (s.wald_count > 0) {
        out << "symmetry rejections at " << fixed(mc.config.wald_level, 2) << ": " << fixed(100.0 * s.wald_rejection_rate, 1)
            << "%\n";
    }
    return out.str();
}

} // namespace volalab
