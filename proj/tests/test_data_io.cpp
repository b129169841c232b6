#include <doctest.h>

#include "volalab/data_io.hpp"
#include "volalab/errors.hpp"
#include "volalab/estimate.hpp"
#include "volalab/innovation.hpp"
#include "volalab/rng.hpp"
#include "volalab/simulate.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include <unistd.h>

using namespace volalab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("volalab_io_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& content) const {
        const auto p = (path / name).string();
        std::ofstream(p) << content;
        return p;
    }
    std::string name(const std::string& n) const { return (path / n).string(); }
};

bool has_text(const std::exception& e, const std::string& needle) {
    return std::string(e.what()).find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("loading a small CSV by column name with dates") {
    TempDir dir;
    const auto path = dir.file("r.csv", "date,ret\n2020-01-01,0.1\n2020-01-02,-0.2\n");
    CsvOptions opts;
    opts.column = "ret";
    opts.date_column = "date";
    const auto s = load_series_csv(path, opts);
    REQUIRE(s.size() == 2);
    CHECK(s[0] == 0.1);
    CHECK(s[1] == -0.2);
    REQUIRE(s.dates.size() == 2);
    CHECK(s.dates[1] == "2020-01-02");

    CsvOptions by_index;
    by_index.column = "1";
    CHECK(load_series_csv(path, by_index).values == s.values);

    CsvOptions no_header;
    no_header.header = false;
    no_header.column = "0";
    const auto bare = load_series_csv(dir.file("b.csv", "1.5\n-2.5\r\n3e-3\n"), no_header);
    CHECK(bare.values == std::vector<double>{1.5, -2.5, 3e-3});
}

TEST_CASE("CSV errors name the problem") {
    TempDir dir;
    const auto path = dir.file("r.csv", "date,ret\n2020-01-01,0.1\n2020-01-02,-0.2\n");
    CsvOptions missing;
    missing.column = "close";
    try {
        load_series_csv(path, missing);
        FAIL("expected InvalidInput");
    } catch (const InvalidInput& e) {
        CHECK(has_text(e, "column 'close' not found"));
    }

    CsvOptions ret;
    ret.column = "ret";
    try {
        load_series_csv(dir.file("bad.csv", "ret\n0.1\n0.2\nabc\n"), ret);
        FAIL("expected InvalidInput");
    } catch (const InvalidInput& e) {
        CHECK(has_text(e, "line 4"));
    }
    CHECK_THROWS_AS(load_series_csv(dir.file("empty.csv", ""), ret), InvalidInput);
    CHECK_THROWS_AS(load_series_csv(dir.file("hdr.csv", "ret\n"), ret), InvalidInput);
    CHECK_THROWS_AS(load_series_csv(dir.name("nope.csv"), ret), InvalidInput);
}

TEST_CASE("a 3344-row file loads completely and round-trips exactly") {
    TempDir dir;
    Rng rng(1);
    std::vector<double> v(3344);
    std::vector<std::string> d(3344);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = rng.normal() * std::pow(10.0, static_cast<int>(i % 7) - 3);
        d[i] = "day" + std::to_string(i);
    }
    v[5] = std::numeric_limits<double>::denorm_min();
    v[6] = -std::numeric_limits<double>::max();
    v[7] = 0.1 + 0.2;
    const Series s(v, d);
    const auto path = dir.name("out.csv");
    write_series_csv(path, s);
    CsvOptions opts;
    opts.date_column = "date";
    const auto back = load_series_csv(path, opts);
    CHECK(back.size() == 3344);
    CHECK(back.values == s.values);
    CHECK(back.dates == s.dates);

    write_series_csv(path, Series(v));
    CHECK(load_series_csv(path).values == v);
    CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("log returns from prices") {
    const auto one = prices_to_log_returns(Series({1.0, std::exp(1.0)}), 1.0);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == doctest::Approx(1.0).epsilon(1e-15));
    const auto flat = prices_to_log_returns(Series({2.0, 2.0, 2.0, 2.0}));
    for (double r : flat.values) CHECK(r == 0.0);

    Rng rng(2);
    std::vector<double> prices{1.3};
    for (int i = 0; i < 1000; ++i) prices.push_back(prices.back() * std::exp(0.01 * rng.normal()));
    const auto ret = prices_to_log_returns(Series(prices));
    CHECK(ret.size() == prices.size() - 1);
    double level = std::log(prices[0]);
    double worst = 0.0;
    for (std::size_t t = 0; t < ret.size(); ++t) {
        level += ret[t] / 100.0;
        worst = std::max(worst, std::abs(std::exp(level) / prices[t + 1] - 1.0));
    }
    CHECK(worst < 1e-12);

    CHECK_THROWS_AS(prices_to_log_returns(Series({1.0, 0.0})), InvalidInput);
    CHECK_THROWS_AS(prices_to_log_returns(Series({1.0})), InvalidInput);
}

TEST_CASE("flooring small returns") {
    const auto f = floor_small_returns(Series({0.0, 1.0, -1e-9}));
    CHECK(f.series.values == std::vector<double>{1e-8, 1.0, -1e-8});
    CHECK(f.count_floored == 2);
    const auto none = floor_small_returns(Series({0.5, -2.0}));
    CHECK(none.series.values == std::vector<double>{0.5, -2.0});
    CHECK(none.count_floored == 0);
    CHECK_THROWS_AS(floor_small_returns(Series({1.0}), 0.0), InvalidInput);
}

TEST_CASE("duration records and the square-root transform") {
    const auto s = acd_transform({{4.0, -1}, {1.0, 1}, {0.25, 1}});
    CHECK(s.values == std::vector<double>{-2.0, 1.0, 0.5});
    CHECK_THROWS_AS(acd_transform({{0.0, 1}}), InvalidInput);
    CHECK_THROWS_AS(acd_transform({{1.0, 0}}), InvalidInput);

    TempDir dir;
    const std::vector<DurationRecord> recs{{1.5, 1}, {0.3, -1}, {2.25, -1}};
    const auto path = dir.name("d.csv");
    write_durations_csv(path, recs);
    const auto back = load_durations_csv(path);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back[i].x == recs[i].x);
        CHECK(back[i].y == recs[i].y);
    }
    CHECK_THROWS_AS(load_durations_csv(dir.file("bad.csv", "duration,direction\n1.0,2\n")), InvalidInput);
}

TEST_CASE("log-ACD data fitted through the transform recovers the duration model") {
    const auto acd = LogGarchParams::make11(0.05, 0.08, 0.03, 0.85);
    SimConfig cfg;
    cfg.n = 5000;
    cfg.seed = 13;
    const auto sim = simulate_log_acd(acd, DurationInnovation::unit_exponential(), 0.5, cfg);
    std::vector<DurationRecord> recs(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) recs[i] = {sim.durations[i], sim.directions[i]};
    const auto eps = acd_transform(recs);
    for (std::size_t i = 0; i < cfg.n; ++i) CHECK((eps[i] > 0) == (sim.directions[i] > 0));

    FitOptions opts;
    opts.compute_diagnostics = false;
    const auto fit = fit_log_garch(eps, 1, 1, opts);
    // e^2 = x, so log s2 of the transformed series is log psi and the coefficients carry over.
    const Eigen::Vector4d truth(0.05, 0.08, 0.03, 0.85);
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(fit.theta_hat(k) - truth(k)) < 3.0 * fit.std_errors(k));
    }
}
