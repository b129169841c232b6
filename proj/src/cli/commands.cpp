#include "volalab/cli/commands.hpp"

#include "volalab/data_io.hpp"
#include "volalab/diagnostics.hpp"
#include "volalab/errors.hpp"
#include "volalab/estimate.hpp"
#include "volalab/inference.hpp"
#include "volalab/montecarlo.hpp"
#include "volalab/report.hpp"
#include "volalab/simulate.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace volalab::cli {

namespace {

// Usage problems detected after CLI11 parsing (bad parameter lists, unknown names).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Manifest {
    std::string command;
    std::vector<std::string> args;
    Json parameters = Json::object();
    std::uint64_t seed = 0;
    std::vector<std::string> artifacts;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (used != cell.size()) {
                throw std::invalid_argument(cell);
            }
        } catch (const std::exception&) {
            throw UsageError("cannot parse parameter '" + cell + "'");
        }
    }
    if (out.empty()) {
        throw UsageError("empty parameter list");
    }
    return out;
}

Eigen::VectorXd parse_theta(const std::string& text, std::size_t p, std::size_t q) {
    const auto v = parse_list(text);
    if (v.size() != 1 + 2 * q + p) {
        throw UsageError("expected " + std::to_string(1 + 2 * q + p) + " parameters for orders p=" + std::to_string(p) +
                         ", q=" + std::to_string(q) + ", got " + std::to_string(v.size()));
    }
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Innovation parse_dist(const std::string& spec) {
    try {
        return parse_innovation(spec);
    } catch (const InvalidInput& e) {
        throw UsageError(e.what());
    }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) {
        return *flag;
    }
    if (const char* env = std::getenv("VOLALAB_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError("VOLALAB_SEED must be a nonnegative integer");
        }
    }
    return 0;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InvalidInput(path + ": cannot open file for writing");
    }
    out << text;
}

void write_json(const std::string& path, const Json& j) {
    write_text(path, j.dump(2) + "\n");
}

void write_manifest(const std::string& path, const Manifest& m) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["tool"] = "volalab";
    j["version"] = VOLALAB_VERSION;
    j["command"] = m.command;
    j["args"] = m.args;
    j["parameters"] = m.parameters;
    j["seed"] = m.seed;
    j["artifacts"] = m.artifacts;
    write_json(path, j);
}

// Arguments as given, with the resolved seed pinned so a replay ignores the environment.
std::vector<std::string> pinned_args(const std::vector<std::string>& args, std::uint64_t seed, bool uses_seed) {
    std::vector<std::string> out;
    bool has_seed = false;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--manifest") {
            ++i;
            continue;
        }
        if (args[i].rfind("--manifest=", 0) == 0) {
            continue;
        }
        has_seed = has_seed || args[i] == "--seed" || args[i].rfind("--seed=", 0) == 0;
        out.push_back(args[i]);
    }
    if (uses_seed && !has_seed) {
        out.push_back("--seed");
        out.push_back(std::to_string(seed));
    }
    return out;
}

std::string manifest_path(const std::string& flag, const std::string& primary) {
    return flag.empty() ? primary + ".manifest.json" : flag;
}

struct SimulateOpts {
    std::string model = "loggarch";
    std::string params;
    std::size_t p = 1;
    std::size_t q = 1;
    std::size_t n = 1000;
    std::size_t burn_in = 1000;
    std::optional<std::uint64_t> seed;
    std::string dist = "normal";
    double dir_prob = 0.5;
    std::string out;
    std::string vol;
    std::string manifest;
};

struct FitOpts {
    std::string model = "loggarch";
    std::size_t p = 1;
    std::size_t q = 1;
    std::string in;
    std::string column = "value";
    std::string date_column;
    bool no_header = false;
    bool durations = false;
    bool prices = false;
    double scale = 100.0;
    std::string out;
    double floor = 1e-8;
    int r0 = -1;
    std::string init = "sample-variance";
    int restarts = 4;
    std::optional<std::uint64_t> seed;
    bool residuals = false;
    std::string manifest;
};

struct DiagnoseOpts {
    std::string params;
    std::size_t p = 1;
    std::size_t q = 1;
    std::string dist = "normal";
    std::size_t horizon = 10000;
    std::size_t reps = 50;
    std::optional<std::uint64_t> seed;
    std::string out = "diagnose.json";
    std::string manifest;
};

struct MonteCarloOpts {
    std::string truth = "loggarch";
    std::string params;
    std::size_t p = 1;
    std::size_t q = 1;
    std::size_t reps = 5;
    std::size_t n = 3344;
    std::string dist = "normal";
    bool fit_both = false;
    unsigned jobs = 0;
    int restarts = 4;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string manifest;
};

struct ImpactOpts {
    std::string scenario = "large-shock";
    std::size_t length = 400;
    std::string out;
    std::string manifest;
};

InitPolicy parse_init(const std::string& text) {
    if (text == "sample-variance") {
        return InitPolicy::sample_variance();
    }
    if (text.rfind("fixed:", 0) == 0) {
        const auto v = parse_list(text.substr(6));
        if (v.size() != 2) {
            throw UsageError("--init fixed:<eps2>,<log_sigma2>");
        }
        return InitPolicy::fixed(v[0], v[1]);
    }
    throw UsageError("--init must be sample-variance or fixed:<eps2>,<log_sigma2>");
}

int cmd_simulate(const SimulateOpts& o, const std::vector<std::string>& args) {
    const std::uint64_t seed = resolve_seed(o.seed);
    SimConfig cfg;
    cfg.n = o.n;
    cfg.burn_in = o.burn_in;
    cfg.seed = seed;
    Manifest m{"simulate", pinned_args(args, seed, true), Json::object(), seed, {o.out}};
    m.parameters = {{"model", o.model}, {"params", o.params}, {"p", o.p}, {"q", o.q}, {"n", o.n}, {"dist", o.dist}};
    if (o.model == "loggarch") {
        const auto theta = parse_theta(o.params, o.p, o.q);
        const auto sim = simulate_log_garch(LogGarchParams::from_vector(theta, o.p, o.q), parse_dist(o.dist), cfg);
        write_series_csv(o.out, sim.eps);
        if (!o.vol.empty()) {
            write_series_csv(o.vol, Series(sim.vol.log_sigma2));
            m.artifacts.push_back(o.vol);
        }
    } else if (o.model == "egarch") {
        const auto theta = parse_theta(o.params, o.p, o.q);
        const auto sim = simulate_egarch(EgarchParams::from_vector(theta, o.p, o.q), parse_dist(o.dist), cfg);
        write_series_csv(o.out, sim.eps);
        if (!o.vol.empty()) {
            write_series_csv(o.vol, Series(sim.vol.log_sigma2));
            m.artifacts.push_back(o.vol);
        }
    } else if (o.model == "logacd") {
        const auto theta = parse_theta(o.params, o.p, o.q);
        const auto sim = simulate_log_acd(LogGarchParams::from_vector(theta, o.p, o.q),
                                          DurationInnovation::unit_exponential(), o.dir_prob, cfg);
        std::vector<DurationRecord> recs(sim.durations.size());
        for (std::size_t i = 0; i < recs.size(); ++i) {
            recs[i] = {sim.durations[i], sim.directions[i]};
        }
        write_durations_csv(o.out, recs);
        if (!o.vol.empty()) {
            write_series_csv(o.vol, Series(sim.log_psi));
            m.artifacts.push_back(o.vol);
        }
    } else {
        throw UsageError("unknown model '" + o.model + "' (loggarch, egarch, logacd)");
    }
    write_manifest(manifest_path(o.manifest, o.out), m);
    std::cout << "wrote " << o.n << " observations to " << o.out << '\n';
    return kExitOk;
}

int cmd_fit(const FitOpts& o, const std::vector<std::string>& args) {
    const std::uint64_t seed = resolve_seed(o.seed);
    std::vector<ModelFamily> families;
    if (o.model == "both") {
        families = {ModelFamily::LogGarch, ModelFamily::Egarch};
    } else {
        try {
            families = {parse_family(o.model)};
        } catch (const InvalidInput& e) {
            throw UsageError(e.what());
        }
    }
    FitOptions fo;
    fo.floor = o.floor;
    fo.r0 = o.r0;
    fo.init_policy = parse_init(o.init);
    fo.optimizer.restarts = o.restarts;
    fo.seed = seed;

    Series eps;
    if (o.durations) {
        eps = acd_transform(load_durations_csv(o.in, !o.no_header));
    } else {
        CsvOptions co;
        co.column = o.column;
        co.header = !o.no_header;
        co.date_column = o.date_column;
        eps = load_series_csv(o.in, co);
        if (o.prices) eps = prices_to_log_returns(eps, o.scale);
    }

    std::vector<FitResult> fits;
    std::vector<std::optional<WaldReport>> walds;
    try {
        for (auto family : families) {
            fits.push_back(fit(family, eps, o.p, o.q, fo));
            std::optional<WaldReport> w;
            if (fits.back().covariance_available) {
                try {
                    w = wald_symmetry(fits.back());
                } catch (const EstimationError&) {
                }
            }
            walds.push_back(w);
        }
    } catch (const std::exception& e) {
        std::cerr << "estimation failed: " << e.what() << '\n';
        return kExitEstimation;
    }

    Json report;
    if (fits.size() == 1) {
        report = to_json(fits[0], walds[0], o.residuals);
    } else {
        report["schema_version"] = kReportSchemaVersion;
        report["fits"] = Json::array();
        for (std::size_t i = 0; i < fits.size(); ++i) {
            report["fits"].push_back(to_json(fits[i], walds[i], o.residuals));
        }
        report["comparison"] = to_json(compare_models(fits, &eps));
    }
    write_json(o.out, report);
    Manifest m{"fit", pinned_args(args, seed, true), Json::object(), seed, {o.out}};
    m.parameters = {{"model", o.model}, {"p", o.p}, {"q", o.q}, {"in", o.in}, {"floor", o.floor}, {"init", o.init}};
    write_manifest(manifest_path(o.manifest, o.out), m);
    std::cout << fit_table(fits, walds);
    for (const auto& f : fits) {
        for (const auto& w : f.warnings) {
            std::cout << "warning (" << to_string(f.family) << "): " << w << '\n';
        }
    }
    return kExitOk;
}

int cmd_diagnose(const DiagnoseOpts& o, const std::vector<std::string>& args) {
    const std::uint64_t seed = resolve_seed(o.seed);
    const auto theta = parse_theta(o.params, o.p, o.q);
    DiagnoseOptions d;
    d.lyapunov.horizon = o.horizon;
    d.lyapunov.reps = o.reps;
    d.lyapunov.seed = seed;
    const auto rep = diagnose(LogGarchParams::from_vector(theta, o.p, o.q), parse_dist(o.dist), d);
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["model"] = "loggarch";
    j["params"] = json_vector(theta);
    j["dist"] = o.dist;
    j["diagnostics"] = to_json(rep);
    write_json(o.out, j);
    Manifest m{"diagnose", pinned_args(args, seed, true), Json::object(), seed, {o.out}};
    m.parameters = {{"params", o.params}, {"p", o.p}, {"q", o.q}, {"dist", o.dist}};
    write_manifest(manifest_path(o.manifest, o.out), m);
    std::cout << diagnostics_table(rep);
    return kExitOk;
}

int cmd_montecarlo(const MonteCarloOpts& o, const std::vector<std::string>& args) {
    const std::uint64_t seed = resolve_seed(o.seed);
    McConfig cfg;
    try {
        cfg.truth = parse_family(o.truth);
    } catch (const InvalidInput& e) {
        throw UsageError(e.what());
    }
    cfg.theta = parse_theta(o.params, o.p, o.q);
    cfg.p = o.p;
    cfg.q = o.q;
    cfg.dist = parse_dist(o.dist);
    cfg.n = o.n;
    cfg.reps = o.reps;
    cfg.seed = seed;
    cfg.fit_both = o.fit_both;
    cfg.jobs = o.jobs;
    cfg.fit_options.optimizer.restarts = o.restarts;
    cfg.fit_options.seed = seed;
    const McReport rep = run_montecarlo(cfg);
    write_json(o.out, to_json(rep));
    Manifest m{"montecarlo", pinned_args(args, seed, true), Json::object(), seed, {o.out}};
    m.parameters = {{"truth", o.truth}, {"params", o.params}, {"reps", o.reps}, {"n", o.n}, {"fit_both", o.fit_both}};
    write_manifest(manifest_path(o.manifest, o.out), m);
    std::cout << montecarlo_table(rep);
    return kExitOk;
}

int cmd_impact(const ImpactOpts& o, const std::vector<std::string>& args) {
    std::vector<double> shocks;
    try {
        shocks = impact_scenario(o.scenario, o.length);
    } catch (const InvalidInput& e) {
        throw UsageError(e.what());
    }
    const auto cal = default_impact_calibration();
    const auto curves = impact_curves(cal.log_garch, cal.egarch, cal.garch, shocks, cal.sigma0_sq);
    std::ostringstream csv;
    csv << "t,shock,log_garch,egarch,garch\n";
    for (std::size_t t = 0; t < curves.log_garch.size(); ++t) {
        csv << t << ',' << (t == 0 ? std::string() : format_double(shocks[t - 1])) << ','
            << format_double(curves.log_garch.log_sigma2[t]) << ',' << format_double(curves.egarch.log_sigma2[t]) << ','
            << format_double(curves.garch.log_sigma2[t]) << '\n';
    }
    write_text(o.out, csv.str());
    Manifest m{"impact", pinned_args(args, 0, false), Json::object(), 0, {o.out}};
    m.parameters = {{"scenario", o.scenario}, {"length", o.length}};
    write_manifest(manifest_path(o.manifest, o.out), m);
    std::cout << "wrote " << curves.log_garch.size() << " rows to " << o.out << '\n';
    return kExitOk;
}

int cmd_replay(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError(path + ": cannot open manifest");
    }
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception& e) {
        throw UsageError(path + ": invalid manifest: " + e.what());
    }
    if (!j.contains("args") || !j["args"].is_array()) {
        throw UsageError(path + ": manifest has no argument list");
    }
    auto args = j["args"].get<std::vector<std::string>>();
    if (!args.empty() && args.front() == "replay") {
        throw UsageError("refusing to replay a replay manifest");
    }
    // Keep the manifest where it was.
    args.push_back("--manifest");
    args.push_back(path);
    return run(args);
}

void add_seed(CLI::App* sub, std::optional<std::uint64_t>& seed) {
    sub->add_option("--seed", seed, "Random seed (falls back to VOLALAB_SEED, then 0)");
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Log-GARCH and EGARCH volatility toolkit"};
    app.set_version_flag("--version", std::string(VOLALAB_VERSION));
    app.require_subcommand(1);

    SimulateOpts so;
    auto* sim = app.add_subcommand("simulate", "Simulate a log-GARCH, EGARCH or log-ACD path");
    sim->add_option("--model", so.model, "loggarch | egarch | logacd")->check(CLI::IsMember({"loggarch", "egarch", "logacd"}));
    sim->add_option("--params", so.params, "Comma-separated parameter vector")->required();
    sim->add_option("--p", so.p, "beta order");
    sim->add_option("--q", so.q, "alpha order (l for EGARCH)");
    sim->add_option("--n", so.n, "Number of observations")->check(CLI::PositiveNumber);
    sim->add_option("--burn-in", so.burn_in, "Discarded warm-up steps");
    add_seed(sim, so.seed);
    sim->add_option("--dist", so.dist, "normal | t<nu> | two-point");
    sim->add_option("--dir-prob", so.dir_prob, "P(y = +1) for log-ACD");
    sim->add_option("--out", so.out, "Output CSV")->required();
    sim->add_option("--vol", so.vol, "Optional log-volatility CSV");
    sim->add_option("--manifest", so.manifest, "Manifest path (default <out>.manifest.json)");

    FitOpts fo;
    auto* fit_cmd = app.add_subcommand("fit", "QML estimation of one or both model families");
    fit_cmd->add_option("--model", fo.model, "loggarch | egarch | both");
    fit_cmd->add_option("--p", fo.p, "beta order");
    fit_cmd->add_option("--q", fo.q, "alpha order (l for EGARCH)");
    fit_cmd->add_option("--in", fo.in, "Input CSV")->required();
    fit_cmd->add_option("--column", fo.column, "Value column, name or index");
    fit_cmd->add_option("--date-column", fo.date_column, "Date column, name or index");
    fit_cmd->add_flag("--no-header", fo.no_header, "Input has no header row");
    fit_cmd->add_flag("--durations", fo.durations, "Input is duration,direction data; fit the transformed series");
    fit_cmd->add_flag("--prices", fo.prices, "Input column holds prices; fit scaled log returns");
    fit_cmd->add_option("--scale", fo.scale, "Log-return multiplier with --prices (100 gives percent)")
        ->check(CLI::PositiveNumber);
    fit_cmd->add_option("--out", fo.out, "Output JSON report")->required();
    fit_cmd->add_option("--floor", fo.floor, "Zero-return floor")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--r0", fo.r0, "Discarded initial criterion terms (default max(p,q)+10)");
    fit_cmd->add_option("--init", fo.init, "sample-variance | fixed:<eps2>,<log_sigma2>");
    fit_cmd->add_option("--restarts", fo.restarts, "Randomized extra starts")->check(CLI::NonNegativeNumber);
    fit_cmd->add_flag("--residuals", fo.residuals, "Include residuals in the report");
    add_seed(fit_cmd, fo.seed);
    fit_cmd->add_option("--manifest", fo.manifest, "Manifest path");

    DiagnoseOpts dopt;
    auto* diag = app.add_subcommand("diagnose", "Stationarity, moment and tail diagnostics of a log-GARCH");
    diag->add_option("--model", "only loggarch is supported")->check(CLI::IsMember({"loggarch"}));
    diag->add_option("--params", dopt.params, "Comma-separated parameter vector")->required();
    diag->add_option("--p", dopt.p, "beta order");
    diag->add_option("--q", dopt.q, "alpha order");
    diag->add_option("--dist", dopt.dist, "normal | t<nu> | two-point");
    diag->add_option("--horizon", dopt.horizon, "Lyapunov Monte Carlo horizon");
    diag->add_option("--reps", dopt.reps, "Lyapunov Monte Carlo replications");
    add_seed(diag, dopt.seed);
    diag->add_option("--out", dopt.out, "Output JSON report");
    diag->add_option("--manifest", dopt.manifest, "Manifest path");

    MonteCarloOpts mo;
    auto* mc = app.add_subcommand("montecarlo", "Replicated simulate-and-fit experiment");
    mc->add_option("--truth", mo.truth, "loggarch | egarch");
    mc->add_option("--params", mo.params, "True parameter vector")->required();
    mc->add_option("--p", mo.p, "beta order");
    mc->add_option("--q", mo.q, "alpha order (l for EGARCH)");
    mc->add_option("--reps", mo.reps, "Replications")->check(CLI::PositiveNumber);
    mc->add_option("--n", mo.n, "Sample size")->check(CLI::PositiveNumber);
    mc->add_option("--dist", mo.dist, "normal | t<nu> | two-point");
    mc->add_flag("--fit-both", mo.fit_both, "Fit both families and record the likelihood winner");
    mc->add_option("--jobs", mo.jobs, "Worker threads (default: logical cores)");
    mc->add_option("--restarts", mo.restarts, "Randomized extra starts per fit")->check(CLI::NonNegativeNumber);
    add_seed(mc, mo.seed);
    mc->add_option("--out", mo.out, "Output JSON report")->required();
    mc->add_option("--manifest", mo.manifest, "Manifest path");

    ImpactOpts io;
    auto* imp = app.add_subcommand("impact", "Volatility response of log-GARCH, EGARCH and GARCH to a shock scenario");
    imp->add_option("--scenario", io.scenario, "large-shock | tiny-run | single-tiny | constant");
    imp->add_option("--length", io.length, "Number of shocks")->check(CLI::PositiveNumber);
    imp->add_option("--out", io.out, "Output CSV")->required();
    imp->add_option("--manifest", io.manifest, "Manifest path");

    std::string replay_path;
    auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay->add_option("manifest", replay_path, "Manifest JSON")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*sim) return cmd_simulate(so, args);
        if (*fit_cmd) return cmd_fit(fo, args);
        if (*diag) return cmd_diagnose(dopt, args);
        if (*mc) return cmd_montecarlo(mo, args);
        if (*imp) return cmd_impact(io, args);
        if (*replay) return cmd_replay(replay_path);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SimulationExplosion& e) {
        std::cerr << "simulation exploded at step " << e.step() << ": " << e.what() << '\n';
        return kExitExplosion;
    } catch (const EstimationError& e) {
        std::cerr << "estimation failed: " << e.what() << '\n';
        return kExitEstimation;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args);
}

} // namespace volalab::cli
