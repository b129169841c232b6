#include <doctest.h>

#include "volalab/errors.hpp"
#include "volalab/innovation.hpp"
#include "volalab/model.hpp"
#include "volalab/params.hpp"
#include "volalab/rng.hpp"
#include "volalab/simulate.hpp"

#include <cmath>
#include <limits>

using namespace volalab;

namespace {

const LogGarchParams kTheta0 = LogGarchParams::make11(0.024, 0.027, 0.016, 0.971);

Series noise(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return Series(v);
}

} // namespace

TEST_CASE("parameter types validate shape and finiteness") {
    CHECK_THROWS_AS(LogGarchParams::make(0.0, {0.1}, {}, {}), InvalidInput);
    CHECK_THROWS_AS(LogGarchParams::make11(0.0, std::nan(""), 0.1, 0.5), InvalidInput);
    CHECK_NOTHROW(LogGarchParams::make11(-3.0, -0.5, 2.0, 1.5));  // no sign constraints
    CHECK_THROWS_AS(EgarchParams::make(0.0, {}, {0.1}, {}), InvalidInput);

    const auto lg = LogGarchParams::make(0.1, {0.2, 0.3}, {0.4, 0.5}, {0.6});
    CHECK(lg.dim() == 6);
    CHECK(lg.r() == 2);
    const auto back = LogGarchParams::from_vector(lg.to_vector(), 1, 2);
    CHECK(back.alpha_minus == lg.alpha_minus);
    CHECK(back.beta == lg.beta);

    const auto eg = EgarchParams::make11(-0.204, -0.012, 0.227, 0.963);
    const auto v = eg.to_vector();
    CHECK(v(0) == -0.204);
    CHECK(v(1) == -0.012);
    CHECK(v(2) == 0.227);
    CHECK(v(3) == 0.963);

    CHECK_THROWS_AS(Series(std::vector<double>{}).validate(), InvalidInput);
    CHECK_THROWS_AS(Series(std::vector<double>{1.0, INFINITY}).validate(), InvalidInput);
}

TEST_CASE("rng streams are reproducible and distinct") {
    Rng a(7, 3), b(7, 3), c(7, 4);
    for (int i = 0; i < 100; ++i) {
        const double x = a.normal();
        CHECK(x == b.normal());
        CHECK(x != c.normal());
    }
}

TEST_CASE("innovation catalogs agree with Monte Carlo") {
    for (const auto& dist : {Innovation::normal(), Innovation::student_t(6.0), Innovation::student_t(9.0),
                             Innovation::two_point()}) {
        CAPTURE(dist.name());
        const auto chk = catalog_self_check(dist, 1'000'000, 11);
        CHECK(std::abs(chk.z_mean) < 3.0);
        CHECK(std::abs(chk.z_second) < 3.0);
        CHECK(std::abs(chk.z_mean_abs) < 3.0);
        CHECK(std::abs(chk.z_mean_log_sq) < 3.0);
        CHECK(std::abs(chk.z_mean_abs_log_sq) < 3.0);
        CHECK(std::abs(chk.z_sign_prob) < 3.0);
    }
}

TEST_CASE("normal constants against a 1e7-sample oracle") {
    Rng rng(2024);
    const int n = 10'000'000;
    double s1 = 0, s2 = 0, l1 = 0, l2 = 0, m1 = 0, m2 = 0;
    for (int i = 0; i < n; ++i) {
        const double e = rng.normal();
        const double a = std::abs(e);
        const double l = std::log(e * e);
        s1 += a;
        s2 += a * a;
        l1 += l;
        l2 += l * l;
        m1 += a * l;
        m2 += a * l * a * l;
    }
    auto z = [&](double sum, double sq, double target) {
        const double mean = sum / n;
        const double se = std::sqrt((sq / n - mean * mean) / n);
        return (mean - target) / se;
    };
    CHECK(std::abs(z(s1, s2, normal_constants::kMeanAbs)) < 4.0);
    CHECK(std::abs(z(l1, l2, normal_constants::kMeanLogSq)) < 4.0);
    CHECK(std::abs(z(m1, m2, normal_constants::kMeanAbsLogSq)) < 4.0);
    // E log eta^2 = -euler_gamma - log 2 for the standard normal.
    CHECK(normal_constants::kMeanLogSq == doctest::Approx(-0.57721566490153286 - std::log(2.0)).epsilon(1e-15));
    CHECK(normal_constants::kMeanAbs == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-15));
}

TEST_CASE("innovation parsing") {
    CHECK(parse_innovation("normal").kind() == InnovationKind::StandardNormal);
    CHECK(parse_innovation("t6").nu() == 6.0);
    CHECK(parse_innovation("student-t:4.5").nu() == 4.5);
    CHECK(parse_innovation("two-point").kind() == InnovationKind::TwoPoint);
    CHECK_THROWS_AS(parse_innovation("cauchy"), InvalidInput);
    CHECK_THROWS_AS(parse_innovation("t2"), InvalidInput);
    CHECK(Innovation::student_t(4.0).catalog().kappa4 == std::numeric_limits<double>::infinity());
    CHECK(Innovation::student_t(6.0).catalog().kappa4 == doctest::Approx(6.0));
}

TEST_CASE("filter_log_garch trivial recursions") {
    const Series eps = noise(50, 1);
    const auto empty = filter_log_garch(LogGarchParams::make(0.0, {}, {}, {}), eps);
    for (double h : empty.log_sigma2) CHECK(h == 0.0);
    const auto constant = filter_log_garch(LogGarchParams::make(1.0, {}, {}, {0.0}), eps);
    for (double h : constant.log_sigma2) CHECK(h == 1.0);
    CHECK(constant.origin == VolOrigin::Filtered);
    CHECK(constant.size() == eps.size());
}

TEST_CASE("filter_log_garch floors zero returns and treats zero as positive") {
    const auto params = LogGarchParams::make(0.0, {1.0}, {2.0}, {});
    const Series eps(std::vector<double>{0.0, -1e-12, 0.5, 0.0});
    const auto path = filter_log_garch(params, eps, InitPolicy::fixed(1.0, 0.0), 1e-8);
    CHECK(path.log_sigma2[1] == doctest::Approx(1.0 * 2.0 * std::log(1e-8)));
    CHECK(path.log_sigma2[2] == doctest::Approx(2.0 * 2.0 * std::log(1e-8)));
    CHECK(path.log_sigma2[3] == doctest::Approx(2.0 * std::log(0.5)));
    CHECK_THROWS_AS(filter_log_garch(params, eps, InitPolicy::fixed(1.0, 0.0), 0.0), InvalidInput);
}

TEST_CASE("filtered log-GARCH forgets its initial values geometrically") {
    SimConfig cfg;
    cfg.n = 3344;
    cfg.seed = 5;
    const auto sim = simulate_log_garch(kTheta0, Innovation::normal(), cfg);
    const auto filt = filter_log_garch(kTheta0, sim.eps);
    // The gap obeys d_t = beta d_{t-1} exactly once returns are in-sample (q = 1).
    const double d1 = filt.log_sigma2[1] - sim.vol.log_sigma2[1];
    for (std::size_t t = 2; t < 400; ++t) {
        const double d = filt.log_sigma2[t] - sim.vol.log_sigma2[t];
        CHECK(d == doctest::Approx(d1 * std::pow(0.971, static_cast<double>(t - 1))).epsilon(1e-6).scale(1e-12));
    }
    double sup_after = 0.0;
    for (std::size_t t = 1000; t < cfg.n; ++t) {
        sup_after = std::max(sup_after, std::abs(filt.log_sigma2[t] - sim.vol.log_sigma2[t]));
    }
    CHECK(sup_after < 1e-6);
}

TEST_CASE("filtered EGARCH forgets its initial values") {
    const auto eg = EgarchParams::make11(-0.204, -0.012, 0.227, 0.963);
    SimConfig cfg;
    cfg.n = 3344;
    cfg.seed = 9;
    const auto sim = simulate_egarch(eg, Innovation::normal(), cfg);
    const auto filt = filter_egarch(eg, sim.eps);
    CHECK_FALSE(filt.invertibility_warning);
    double sup_after = 0.0;
    for (std::size_t t = 1000; t < cfg.n; ++t) {
        sup_after = std::max(sup_after, std::abs(filt.log_sigma2[t] - sim.vol.log_sigma2[t]));
    }
    CHECK(sup_after < 1e-6);
    // log gap against t has negative slope
    double sx = 0, sy = 0, sxx = 0, sxy = 0, k = 0;
    for (std::size_t t = 1; t < 600; t += 10) {
        const double g = std::abs(filt.log_sigma2[t] - sim.vol.log_sigma2[t]);
        if (g <= 0.0) continue;
        const double x = static_cast<double>(t), y = std::log(g);
        sx += x; sy += y; sxx += x * x; sxy += x * y; k += 1;
    }
    CHECK((k * sxy - sx * sy) / (k * sxx - sx * sx) < 0.0);
}

TEST_CASE("filter_egarch trivial recursions") {
    const Series eps = noise(40, 2);
    const auto flat = filter_egarch(EgarchParams::make(0.0, {}, {0.0}, {0.0}), eps);
    for (double h : flat.log_sigma2) CHECK(h == 0.0);
    const auto decay = filter_egarch(EgarchParams::make(0.0, {0.5}, {}, {}), eps, InitPolicy::fixed(1.0, 3.0));
    for (std::size_t t = 0; t < eps.size(); ++t) {
        CHECK(decay.log_sigma2[t] == doctest::Approx(3.0 * std::pow(0.5, static_cast<double>(t + 1))));
    }
}

TEST_CASE("filter_egarch reports degeneracy with the step") {
    const auto bad = EgarchParams::make(1600.0, {}, {0.0}, {0.0});
    try {
        filter_egarch(bad, noise(10, 3));
        FAIL("expected NumericDegeneracy");
    } catch (const NumericDegeneracy& e) {
        CHECK(e.step() == 1);
    }
}

TEST_CASE("arma representation") {
    const auto a = arma_representation(LogGarchParams::make11(0.1, 0.3, 0.3, 0.5));
    CHECK(a.ar.size() == 1);
    CHECK(a.ar[0] == doctest::Approx(0.8));
    CHECK(a.ma[0] == doctest::Approx(0.3));
    const auto z = arma_representation(LogGarchParams::make11(0.1, 0.0, 0.0, 0.0));
    CHECK(z.ar[0] == 0.0);
    CHECK(z.ma[0] == 0.0);
    const auto b = arma_representation(LogGarchParams::make(0.1, {0.1, 0.2}, {0.1, 0.2}, {0.3}));
    REQUIRE(b.ar.size() == 2);
    CHECK(b.ar[0] == doctest::Approx(0.4));
    CHECK(b.ar[1] == doctest::Approx(0.2));
    CHECK(b.ma[1] == doctest::Approx(0.2));
    CHECK_THROWS_AS(arma_representation(kTheta0), NotApplicable);
}

TEST_CASE("symmetric log-GARCH equals its ARMA recursion in log sigma^2") {
    const auto params = LogGarchParams::make(0.05, {0.1, 0.05}, {0.1, 0.05}, {0.6});
    SimConfig cfg;
    cfg.n = 2000;
    cfg.burn_in = 0;
    cfg.seed = 4;
    const auto sim = simulate_log_garch(params, Innovation::normal(), cfg);
    const auto arma = arma_representation(params);
    const auto& h = sim.vol.log_sigma2;
    for (std::size_t t = 2; t < cfg.n; ++t) {
        double v = arma.intercept;
        for (std::size_t i = 1; i <= arma.ar.size(); ++i) v += arma.ar[i - 1] * h[t - i];
        for (std::size_t i = 1; i <= arma.ma.size(); ++i) v += arma.ma[i - 1] * std::log(sim.eta[t - i] * sim.eta[t - i]);
        CHECK(v == doctest::Approx(h[t]).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("power invariance of the filter") {
    const Series eps = noise(500, 6);
    const double eps2 = 1.3, ls = 0.2;
    const auto base = filter_log_garch(kTheta0, eps, InitPolicy::fixed(eps2, ls), 1e-300);
    for (double s : {1.0, 2.0, 4.0}) {
        Series scaled = eps;
        for (auto& v : scaled.values) v = std::copysign(std::pow(std::abs(v), s / 2.0), v);
        auto p = kTheta0;
        p.omega *= s / 2.0;
        const auto out = filter_log_garch(p, scaled, InitPolicy::fixed(std::pow(eps2, s / 2.0), s / 2.0 * ls), 1e-300);
        for (std::size_t t = 0; t < eps.size(); ++t) {
            CHECK(out.log_sigma2[t] == doctest::Approx(s / 2.0 * base.log_sigma2[t]).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("lag polynomial roots") {
    CHECK(lag_poly_roots_outside({0.971}));
    CHECK_FALSE(lag_poly_roots_outside({1.0}));
    CHECK_FALSE(lag_poly_roots_outside({-1.0}));
    CHECK(lag_poly_roots_outside({}));
    // 1 - 0.5z - 0.49z^2 has roots 1.0067 and -2.027: both outside.
    CHECK(lag_poly_roots_outside({0.5, 0.49}));
    // 1 - 0.5z - 0.51z^2 vanishes at z = 1.
    CHECK_FALSE(lag_poly_roots_outside({0.5, 0.51}));
    CHECK_FALSE(lag_poly_roots_outside({0.5, 0.52}));
    CHECK_FALSE(lag_poly_roots_outside({1.0 - 1e-12}));
}

TEST_CASE("egarch invertibility constraint") {
    const auto good = EgarchParams::make11(-0.204, -0.012, 0.227, 0.963);
    const Series eps = noise(500, 7);
    std::vector<double> small(eps.values);
    for (auto& v : small) v *= 0.06;
    const auto ok = egarch_invertibility_constraint(good, small);
    CHECK(ok.delta_dominates);
    CHECK(ok.sum_condition);
    CHECK(ok.ok());
    const auto bad = EgarchParams::make11(-0.204, -0.3, 0.2, 0.963);
    CHECK_FALSE(egarch_invertibility_constraint(bad, small).ok());
    // Large returns break the strict contraction bound first.
    std::vector<double> big(eps.values);
    for (auto& v : big) v *= 100.0;
    const auto loose = egarch_invertibility_constraint(good, big);
    CHECK_FALSE(loose.strict_condition);
    CHECK(loose.sum == -INFINITY);  // some X_t <= beta
    CHECK(loose.sum_condition);
    // Every X_t above beta: the printed sum is finite and positive.
    const auto all_big = egarch_invertibility_constraint(good, std::vector<double>(50, 100.0));
    CHECK(std::isfinite(all_big.sum));
    CHECK_FALSE(all_big.sum_condition);
    const auto higher = EgarchParams::make(0.0, {0.5, 0.2}, {0.0}, {0.1});
    CHECK(egarch_invertibility_constraint(higher, small).heuristic);
}
