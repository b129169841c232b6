#include <doctest.h>

#include "volalab/errors.hpp"
#include "volalab/estimate.hpp"
#include "volalab/inference.hpp"
#include "volalab/innovation.hpp"
#include "volalab/simulate.hpp"

#include <cmath>
#include <vector>

using namespace volalab;

namespace {

const LogGarchParams kTheta0 = LogGarchParams::make11(0.024, 0.027, 0.016, 0.971);
const EgarchParams kEgarchTruth = EgarchParams::make11(-0.204, -0.012, 0.227, 0.963);

FitResult fake_fit(ModelFamily family, Eigen::VectorXd theta, Eigen::MatrixXd acov) {
    FitResult f;
    f.family = family;
    f.theta_hat = std::move(theta);
    f.acov = std::move(acov);
    f.covariance_available = true;
    return f;
}

FitOptions quick() {
    FitOptions o;
    o.compute_diagnostics = false;
    return o;
}

} // namespace

TEST_CASE("chi-square upper tail") {
    for (double x : {0.0, 0.3, 1.0, 3.84, 10.0}) {
        CHECK(chi_square_sf(x, 1) == doctest::Approx(std::erfc(std::sqrt(x / 2.0))).epsilon(1e-12));
        CHECK(chi_square_sf(x, 2) == doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-12));
    }
    CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
    for (int dof : {1, 2, 3, 5}) {
        double prev = 1.0;
        for (double x = 0.0; x < 30.0; x += 0.5) {
            const double p = chi_square_sf(x, dof);
            CHECK(p <= prev);
            CHECK(p >= 0.0);
            prev = p;
        }
    }
    CHECK_THROWS_AS(chi_square_sf(1.0, 0), InvalidInput);
    CHECK_THROWS_AS(chi_square_sf(-1.0, 1), InvalidInput);
}

TEST_CASE("Wald symmetry test on constructed fits") {
    Eigen::MatrixXd acov = Eigen::MatrixXd::Identity(4, 4) * 1e-5;
    acov(1, 2) = acov(2, 1) = 4e-6;
    auto sym = fake_fit(ModelFamily::LogGarch, Eigen::Vector4d(0.02, 0.03, 0.03, 0.95), acov);
    const auto zero = wald_symmetry(sym);
    CHECK(zero.statistic == 0.0);
    CHECK(zero.p_value == 1.0);
    CHECK(zero.dof == 1);

    auto asym = fake_fit(ModelFamily::LogGarch, Eigen::Vector4d(0.02, 0.027, 0.016, 0.95), acov);
    const auto w = wald_symmetry(asym);
    const double d = 0.011;
    const double var = 1e-5 + 1e-5 - 2.0 * 4e-6;
    CHECK(w.statistic == doctest::Approx(d * d / var).epsilon(1e-12));
    CHECK(w.p_value == doctest::Approx(std::erfc(std::sqrt(w.statistic / 2.0))).epsilon(1e-10));
    CHECK_FALSE(w.restriction.empty());

    auto eg = fake_fit(ModelFamily::Egarch, Eigen::Vector4d(-0.2, -0.03, 0.2, 0.96), acov);
    const auto we = wald_symmetry(eg);
    CHECK(we.statistic == doctest::Approx(0.03 * 0.03 / 1e-5).epsilon(1e-12));

    asym.covariance_available = false;
    CHECK_THROWS_AS(wald_symmetry(asym), EstimationError);
    CHECK_THROWS_AS(wald_test(eg, Eigen::MatrixXd::Ones(1, 3), "bad"), InvalidInput);
}

TEST_CASE("Wald statistic ignores the order of restriction rows") {
    SimConfig cfg;
    cfg.n = 3344;
    cfg.seed = 12;
    const auto params = LogGarchParams::make(0.03, {0.03, 0.01}, {0.02, 0.0}, {0.93});
    const auto eps = simulate_log_garch(params, Innovation::normal(), cfg).eps;
    const auto fit = fit_log_garch(eps, 1, 2, quick());
    REQUIRE(fit.covariance_available);
    const auto sym = wald_symmetry(fit);
    CHECK(sym.dof == 2);

    Eigen::MatrixXd r(2, 6);
    r << 0, 1, 0, -1, 0, 0,  //
        0, 0, 1, 0, -1, 0;
    Eigen::MatrixXd swapped(2, 6);
    swapped.row(0) = r.row(1);
    swapped.row(1) = r.row(0);
    const auto a = wald_test(fit, r, "rows");
    const auto b = wald_test(fit, swapped, "swapped");
    CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-10));
    CHECK(a.statistic == doctest::Approx(sym.statistic).epsilon(1e-10));
    CHECK(a.p_value == doctest::Approx(chi_square_sf(a.statistic, 2)).epsilon(1e-12));
}

TEST_CASE("model comparison: ties, window checks, and stored objectives") {
    SimConfig cfg;
    cfg.n = 2000;
    cfg.seed = 3;
    const auto eps = simulate_log_garch(kTheta0, Innovation::normal(), cfg).eps;
    const auto lg = fit_log_garch(eps, 1, 1, quick());

    const auto same = compare_models({lg, lg}, &eps);
    CHECK(same.tie);
    CHECK(same.entries.size() == 2);

    auto other_window = lg;
    other_window.r0 = 20;
    other_window.n_eff = lg.n_obs - 20;
    CHECK_THROWS_AS(compare_models({lg, other_window}), InvalidInput);

    auto other_series = lg;
    other_series.fingerprint ^= 1;
    CHECK_THROWS_AS(compare_models({lg, other_series}), InvalidInput);
    CHECK_THROWS_AS(compare_models({}), InvalidInput);

    auto tampered = lg;
    tampered.q_n += 1e-6;
    CHECK_NOTHROW(compare_models({lg, tampered}));
    CHECK_THROWS_AS(compare_models({lg, tampered}, &eps), std::logic_error);

    const auto eg = fit_egarch(eps, 1, 1, quick());
    const auto rep = compare_models({lg, eg}, &eps);
    CHECK_FALSE(rep.tie);
    CHECK(rep.entries[rep.winner].loglik == std::max(lg.loglik, eg.loglik));
}

TEST_CASE("the true family wins the likelihood comparison") {
    int lg_wins = 0, eg_wins = 0;
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
        SimConfig cfg;
        cfg.n = 3344;
        cfg.seed = 2013;
        cfg.stream = rep;
        const auto lg_data = simulate_log_garch(kTheta0, Innovation::normal(), cfg).eps;
        const auto on_lg = compare_models({fit_log_garch(lg_data, 1, 1, quick()), fit_egarch(lg_data, 1, 1, quick())});
        if (!on_lg.tie && on_lg.winner == 0) ++lg_wins;

        const auto eg_data = simulate_egarch(kEgarchTruth, Innovation::normal(), cfg).eps;
        const auto on_eg = compare_models({fit_log_garch(eg_data, 1, 1, quick()), fit_egarch(eg_data, 1, 1, quick())});
        if (!on_eg.tie && on_eg.winner == 1) ++eg_wins;
    }
    MESSAGE("log-GARCH wins " << lg_wins << "/5 on its own data; EGARCH wins " << eg_wins << "/5 on its own data");
    CHECK(lg_wins == 5);
    CHECK(eg_wins >= 4);
}
