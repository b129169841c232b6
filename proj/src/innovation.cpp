#include "volalab/innovation.hpp"

#include "volalab/errors.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>
#include <vector>

namespace volalab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MomentCatalog student_catalog(double nu) {
    using std::numbers::pi;
    const double scale = std::sqrt((nu - 2.0) / nu);
    MomentCatalog c;

    // Unscaled T_nu moments.
    const double mean_abs_t = 2.0 * std::sqrt(nu) *
                              std::exp(boost::math::lgamma(0.5 * (nu + 1.0)) - boost::math::lgamma(0.5 * nu)) /
                              (std::sqrt(pi) * (nu - 1.0));
    const double mean_log_sq_t =
        std::log(nu) + boost::math::digamma(0.5) - boost::math::digamma(0.5 * nu);
    c.mean_abs = scale * mean_abs_t;
    c.mean_log_sq = mean_log_sq_t + 2.0 * std::log(scale);

    // E|eta| log eta^2 by quadrature of the standardized density.
    boost::math::students_t_distribution<double> t(nu);
    auto integrand = [&](double y) {
        if (y == 0.0) {
            return 0.0;
        }
        return 4.0 * y * std::log(y) * boost::math::pdf(t, y / scale) / scale;
    };
    boost::math::quadrature::tanh_sinh<double> near;
    boost::math::quadrature::exp_sinh<double> far;
    c.mean_abs_log_sq = near.integrate(integrand, 0.0, 1.0) + far.integrate(integrand, 1.0, kInf);

    c.kappa4 = nu > 4.0 ? 3.0 * (nu - 2.0) / (nu - 4.0) : kInf;
    c.tail_index = nu;
    return c;
}

} // namespace

Innovation Innovation::normal() {
    Innovation d;
    d.kind_ = InnovationKind::StandardNormal;
    d.name_ = "normal";
    d.catalog_ = {normal_constants::kMeanAbs, normal_constants::kMeanLogSq, normal_constants::kMeanAbsLogSq, 3.0,
                  kInf};
    return d;
}

Innovation Innovation::student_t(double nu) {
    if (!(nu > 2.0) || !std::isfinite(nu)) {
        throw InvalidInput("standardized Student-t needs 2 < nu < inf");
    }
    Innovation d;
    d.kind_ = InnovationKind::StudentT;
    d.nu_ = nu;
    d.scale_ = std::sqrt((nu - 2.0) / nu);
    d.catalog_ = student_catalog(nu);
    char buf[64];
    std::snprintf(buf, sizeof buf, "student-t(%g)", nu);
    d.name_ = buf;
    return d;
}

Innovation Innovation::two_point() {
    Innovation d;
    d.kind_ = InnovationKind::TwoPoint;
    d.name_ = "two-point";
    d.catalog_ = {1.0, 0.0, 0.0, 1.0, kInf};
    return d;
}

Innovation Innovation::custom(Sampler sampler, double sign_prob, MomentCatalog catalog, std::string name) {
    if (!sampler) {
        throw InvalidInput("custom innovation needs a sampler");
    }
    if (!(sign_prob > 0.0 && sign_prob < 1.0)) {
        throw InvalidInput("sign probability must lie in (0,1)");
    }
    Innovation d;
    d.kind_ = InnovationKind::Custom;
    d.sampler_ = std::move(sampler);
    d.sign_prob_ = sign_prob;
    d.catalog_ = catalog;
    d.name_ = std::move(name);
    return d;
}

double Innovation::draw(Rng& rng) const {
    switch (kind_) {
    case InnovationKind::StandardNormal:
        return rng.normal();
    case InnovationKind::StudentT:
        return scale_ * rng.student_t(nu_);
    case InnovationKind::TwoPoint:
        return rng.uniform() < 0.5 ? 1.0 : -1.0;
    case InnovationKind::Custom:
        return sampler_(rng);
    }
    return 0.0;
}

bool Innovation::symmetric() const noexcept {
    return kind_ != InnovationKind::Custom;
}

Innovation parse_innovation(const std::string& spec) {
    if (spec == "normal" || spec == "gaussian") {
        return Innovation::normal();
    }
    if (spec == "two-point" || spec == "twopoint") {
        return Innovation::two_point();
    }
    std::string digits;
    if (spec.rfind("student-t:", 0) == 0) {
        digits = spec.substr(10);
    } else if (spec.size() > 1 && spec[0] == 't') {
        digits = spec.substr(1);
    }
    if (!digits.empty()) {
        try {
            std::size_t used = 0;
            const double nu = std::stod(digits, &used);
            if (used == digits.size()) {
                return Innovation::student_t(nu);
            }
        } catch (const std::logic_error&) {
        }
    }
    throw InvalidInput("unknown innovation distribution '" + spec + "'");
}

CatalogCheck catalog_self_check(const Innovation& dist, std::size_t samples, std::uint64_t seed) {
    Rng rng(seed);
    // Running sums of each statistic and its square.
    std::vector<double> sum(6, 0.0), sum2(6, 0.0);
    for (std::size_t i = 0; i < samples; ++i) {
        const double e = dist.draw(rng);
        const double a = std::abs(e);
        const double l = std::log(e * e);
        const double vals[6] = {e, e * e, a, l, a * l, e > 0.0 ? 1.0 : 0.0};
        for (int k = 0; k < 6; ++k) {
            sum[k] += vals[k];
            sum2[k] += vals[k] * vals[k];
        }
    }
    const double n = static_cast<double>(samples);
    auto z = [&](int k, double target) {
        const double m = sum[k] / n;
        const double var = sum2[k] / n - m * m;
        const double se = std::sqrt(std::max(var, 0.0) / n);
        if (se == 0.0) {
            return m == target ? 0.0 : kInf;
        }
        return (m - target) / se;
    };
    const auto& c = dist.catalog();
    return {sum[0] / n,        sum[1] / n,           z(0, 0.0),
            z(1, 1.0),         z(2, c.mean_abs),     z(3, c.mean_log_sq),
            z(4, c.mean_abs_log_sq), z(5, dist.sign_prob())};
}

DurationInnovation DurationInnovation::unit_exponential() {
    DurationInnovation d;
    d.sampler_ = [](Rng& rng) { return rng.exponential(); };
    d.name_ = "exponential";
    return d;
}

DurationInnovation DurationInnovation::custom(Sampler sampler, std::string name) {
    if (!sampler) {
        throw InvalidInput("custom duration law needs a sampler");
    }
    DurationInnovation d;
    d.sampler_ = std::move(sampler);
    d.name_ = std::move(name);
    return d;
}

double DurationInnovation::draw(Rng& rng) const {
    return sampler_(rng);
}

} // namespace volalab
