#include <doctest.h>

#include "volalab/cli/commands.hpp"
#include "volalab/data_io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace volalab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Workspace {
    fs::path root;
    Workspace() {
        root = fs::temp_directory_path() / ("volalab_cli_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(root);
    }
    ~Workspace() { fs::remove_all(root); }
    std::string operator()(const std::string& name) const { return (root / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load_json(const std::string& path) {
    return json::parse(slurp(path));
}

int run(std::vector<std::string> args) {
    return cli::run(args);
}

const std::string kTheta0 = "0.024,0.027,0.016,0.971";

} // namespace

TEST_CASE("simulate writes the requested rows and a manifest, deterministically") {
    Workspace ws;
    REQUIRE(run({"simulate", "--model", "loggarch", "--params", kTheta0, "--n", "3344", "--dist", "normal", "--seed",
                 "1", "--out", ws("a.csv"), "--vol", ws("a_vol.csv")}) == cli::kExitOk);
    const auto series = load_series_csv(ws("a.csv"));
    CHECK(series.size() == 3344);
    CHECK(load_series_csv(ws("a_vol.csv")).size() == 3344);
    const auto manifest = load_json(ws("a.csv") + ".manifest.json");
    CHECK(manifest["command"] == "simulate");
    CHECK(manifest["seed"] == 1);
    CHECK(manifest["schema_version"] == 1);
    CHECK_FALSE(manifest["artifacts"].empty());

    REQUIRE(run({"simulate", "--model", "loggarch", "--params", kTheta0, "--n", "3344", "--seed", "1", "--out",
                 ws("b.csv")}) == cli::kExitOk);
    CHECK(slurp(ws("a.csv")) == slurp(ws("b.csv")));
    REQUIRE(run({"simulate", "--model", "loggarch", "--params", kTheta0, "--n", "3344", "--seed", "2", "--out",
                 ws("c.csv")}) == cli::kExitOk);
    CHECK(slurp(ws("a.csv")) != slurp(ws("c.csv")));

    // Zero parameters: unit volatility throughout.
    REQUIRE(run({"simulate", "--params", "0,0,0,0", "--n", "200", "--seed", "3", "--out", ws("z.csv"), "--vol",
                 ws("z_vol.csv")}) == cli::kExitOk);
    for (double h : load_series_csv(ws("z_vol.csv")).values) CHECK(h == 0.0);

    REQUIRE(run({"simulate", "--model", "egarch", "--params", "-0.204,-0.012,0.227,0.963", "--n", "500", "--out",
                 ws("e.csv")}) == cli::kExitOk);
    REQUIRE(run({"simulate", "--model", "logacd", "--params", "0.1,0.05,0.05,0.9", "--n", "500", "--out",
                 ws("d.csv")}) == cli::kExitOk);
    CHECK(load_durations_csv(ws("d.csv")).size() == 500);
}

TEST_CASE("usage errors and explosions map to their exit codes") {
    Workspace ws;
    CHECK(run({}) == cli::kExitUsage);
    CHECK(run({"frobnicate"}) == cli::kExitUsage);
    CHECK(run({"simulate", "--params", kTheta0}) == cli::kExitUsage);
    CHECK(run({"simulate", "--model", "garch", "--params", kTheta0, "--out", ws("x.csv")}) == cli::kExitUsage);
    CHECK(run({"simulate", "--params", "0.1,0.2", "--out", ws("x.csv")}) == cli::kExitUsage);
    CHECK(run({"simulate", "--params", kTheta0, "--dist", "cauchy", "--out", ws("x.csv")}) == cli::kExitUsage);
    CHECK(run({"simulate", "--params", kTheta0, "--n", "-5", "--out", ws("x.csv")}) == cli::kExitUsage);
    CHECK(run({"simulate", "--params", "0.5,0.3,0.3,1.2", "--n", "5000", "--seed", "1", "--out", ws("x.csv")}) ==
          cli::kExitExplosion);
    CHECK(run({"impact", "--scenario", "sideways", "--out", ws("i.csv")}) == cli::kExitUsage);
    CHECK(run({"fit", "--in", ws("missing.csv"), "--out", ws("f.json")}) == cli::kExitUsage);
}

TEST_CASE("fit reports one table row per model in JSON") {
    Workspace ws;
    REQUIRE(run({"simulate", "--params", kTheta0, "--n", "3344", "--seed", "1", "--out", ws("s.csv")}) ==
            cli::kExitOk);
    REQUIRE(run({"fit", "--model", "loggarch", "--in", ws("s.csv"), "--out", ws("lg.json")}) == cli::kExitOk);
    const auto lg = load_json(ws("lg.json"));
    CHECK(lg["schema_version"] == 1);
    CHECK(lg["model"] == "loggarch");
    const std::vector<std::string> names{"omega", "alpha_plus", "alpha_minus", "beta"};
    const std::vector<double> truth{0.024, 0.027, 0.016, 0.971};
    for (std::size_t k = 0; k < 4; ++k) {
        const double est = lg["estimates"][names[k]];
        const double se = lg["std_errors"][names[k]];
        CHECK(std::abs(est - truth[k]) < 0.015);
        CHECK(se > 0.002);
        CHECK(se < 0.008);
    }
    CHECK(lg["kappa4_hat"].get<double>() > 2.0);
    CHECK(lg["loglik"].get<double>() == doctest::Approx(-0.5 * lg["q_n"].get<double>()));
    CHECK(lg.contains("wald_symmetry"));
    CHECK(lg["diagnostics"]["any_log_moment_ok"] == true);

    REQUIRE(run({"fit", "--model", "egarch", "--in", ws("s.csv"), "--out", ws("eg.json")}) == cli::kExitOk);
    const auto eg = load_json(ws("eg.json"));
    const double gamma = eg["estimates"]["gamma"];
    const double delta = eg["estimates"]["delta"];
    CHECK(delta >= std::abs(gamma));

    REQUIRE(run({"fit", "--model", "both", "--in", ws("s.csv"), "--out", ws("both.json"), "--residuals"}) ==
            cli::kExitOk);
    const auto both = load_json(ws("both.json"));
    REQUIRE(both["fits"].size() == 2);
    CHECK(both["fits"][0]["eta_hat"].size() == 3344);
    CHECK(both["comparison"].contains("winner"));

    // Prices whose percent log returns are the simulated series give the same fit.
    const auto returns = load_series_csv(ws("s.csv")).values;
    std::vector<double> prices{100.0};
    for (double r : returns) prices.push_back(prices.back() * std::exp(r / 100.0));
    write_series_csv(ws("p.csv"), Series(prices));
    REQUIRE(run({"fit", "--in", ws("p.csv"), "--prices", "--out", ws("p.json")}) == cli::kExitOk);
    const auto from_prices = load_json(ws("p.json"));
    CHECK(from_prices["n_obs"] == 3344);
    for (const auto& name : names) {
        CHECK(std::abs(from_prices["estimates"][name].get<double>() - lg["estimates"][name].get<double>()) < 1e-6);
    }

    // Guard: a short sample is an estimation failure.
    REQUIRE(run({"simulate", "--params", kTheta0, "--n", "100", "--seed", "1", "--out", ws("short.csv")}) ==
            cli::kExitOk);
    CHECK(run({"fit", "--in", ws("short.csv"), "--out", ws("short.json")}) == cli::kExitEstimation);
    CHECK(run({"fit", "--model", "arch", "--in", ws("s.csv"), "--out", ws("x.json")}) == cli::kExitUsage);
}

TEST_CASE("diagnose reports stationarity, leverage and moments") {
    Workspace ws;
    REQUIRE(run({"diagnose", "--params", kTheta0, "--out", ws("d.json")}) == cli::kExitOk);
    const auto d = load_json(ws("d.json"))["diagnostics"];
    CHECK(d["lyapunov"]["estimate"].get<double>() == doctest::Approx(-0.0075).epsilon(0.01));
    CHECK(d["any_log_moment_ok"] == true);
    CHECK(d["lambda"].get<double>() == doctest::Approx(13.5));

    REQUIRE(run({"diagnose", "--params", "0,0.3,0.3,0.8", "--out", ws("x.json")}) == cli::kExitOk);
    const auto x = load_json(ws("x.json"))["diagnostics"];
    CHECK(x["lyapunov"]["estimate"].get<double>() > 0.0);
    CHECK(x["stationary"] == false);
    CHECK(x["not_applicable"].contains("lambda"));

    REQUIRE(run({"diagnose", "--params", "0.01,0.04,0.04,0.9", "--out", ws("s.json")}) == cli::kExitOk);
    CHECK(load_json(ws("s.json"))["diagnostics"]["leverage_cov"].get<double>() == 0.0);

    REQUIRE(run({"diagnose", "--params", "0.01,0.03,0.01,0.05,0.0,0.9", "--q", "2", "--horizon", "500", "--reps",
                 "10", "--out", ws("m.json")}) == cli::kExitOk);
    CHECK(load_json(ws("m.json"))["diagnostics"]["lyapunov"]["method"] == "monte-carlo");
}

TEST_CASE("impact writes three aligned paths") {
    Workspace ws;
    REQUIRE(run({"impact", "--scenario", "single-tiny", "--length", "400", "--out", ws("i.csv")}) == cli::kExitOk);
    std::ifstream in(ws("i.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,shock,log_garch,egarch,garch");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> r;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) r.push_back(cell.empty() ? std::nan("") : std::stod(cell));
        rows.push_back(r);
    }
    REQUIRE(rows.size() == 401);
    int below = 0;
    for (std::size_t t = 201; t <= 220; ++t) {
        if (rows[t][2] < rows[t][3] && rows[t][2] < rows[t][4]) ++below;
    }
    CHECK(below == 20);

    REQUIRE(run({"impact", "--scenario", "constant", "--length", "50", "--out", ws("c.csv")}) == cli::kExitOk);
}

TEST_CASE("replaying a manifest reproduces outputs byte for byte") {
    Workspace ws;
    REQUIRE(run({"simulate", "--params", kTheta0, "--n", "1000", "--seed", "5", "--out", ws("s.csv")}) ==
            cli::kExitOk);
    const std::string sim_bytes = slurp(ws("s.csv"));
    REQUIRE(run({"fit", "--in", ws("s.csv"), "--out", ws("f.json")}) == cli::kExitOk);
    const std::string fit_bytes = slurp(ws("f.json"));
    REQUIRE(run({"impact", "--scenario", "large-shock", "--out", ws("i.csv")}) == cli::kExitOk);
    const std::string imp_bytes = slurp(ws("i.csv"));
    REQUIRE(run({"montecarlo", "--params", kTheta0, "--reps", "3", "--n", "600", "--fit-both", "--jobs", "2",
                 "--seed", "4", "--out", ws("mc.json")}) == cli::kExitOk);
    const std::string mc_bytes = slurp(ws("mc.json"));

    fs::remove(ws("s.csv"));
    fs::remove(ws("f.json"));
    fs::remove(ws("i.csv"));
    fs::remove(ws("mc.json"));
    CHECK(run({"replay", ws("s.csv") + ".manifest.json"}) == cli::kExitOk);
    CHECK(slurp(ws("s.csv")) == sim_bytes);
    CHECK(run({"replay", ws("f.json") + ".manifest.json"}) == cli::kExitOk);
    CHECK(slurp(ws("f.json")) == fit_bytes);
    CHECK(run({"replay", ws("i.csv") + ".manifest.json"}) == cli::kExitOk);
    CHECK(slurp(ws("i.csv")) == imp_bytes);
    CHECK(run({"replay", ws("mc.json") + ".manifest.json"}) == cli::kExitOk);
    CHECK(slurp(ws("mc.json")) == mc_bytes);

    CHECK(run({"replay", ws("nothing.json")}) != cli::kExitOk);
}

TEST_CASE("montecarlo summarizes replications and the likelihood winner") {
    Workspace ws;
    REQUIRE(run({"montecarlo", "--truth", "loggarch", "--params", kTheta0, "--reps", "5", "--n", "3344",
                 "--fit-both", "--seed", "2013", "--out", ws("mc.json")}) == cli::kExitOk);
    const auto mc = load_json(ws("mc.json"));
    CHECK(mc["replications"].size() == 5);
    CHECK(mc["summary"]["truth_wins"] == 5);
}

TEST_CASE("VOLALAB_SEED is the seed fallback") {
    Workspace ws;
    ::setenv("VOLALAB_SEED", "77", 1);
    const int rc = run({"simulate", "--params", kTheta0, "--n", "300", "--out", ws("env.csv")});
    ::unsetenv("VOLALAB_SEED");
    REQUIRE(rc == cli::kExitOk);
    REQUIRE(run({"simulate", "--params", kTheta0, "--n", "300", "--seed", "77", "--out", ws("flag.csv")}) ==
            cli::kExitOk);
    CHECK(slurp(ws("env.csv")) == slurp(ws("flag.csv")));
    CHECK(load_json(ws("env.csv") + ".manifest.json")["seed"] == 77);

    ::setenv("VOLALAB_SEED", "abc", 1);
    CHECK(run({"simulate", "--params", kTheta0, "--n", "300", "--out", ws("bad.csv")}) == cli::kExitUsage);
    ::unsetenv("VOLALAB_SEED");
}
