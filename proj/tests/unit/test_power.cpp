#include <catch2/catch_amalgamated.hpp>

#include "trigof/errors.hpp"
#include "trigof/gof.hpp"
#include "trigof/power.hpp"
#include "trigof/scaling.hpp"

#include <cmath>
#include <functional>

using namespace trigof;
using namespace trigof::power;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

LocalAlternative gamma_alt(double lam, double beta = 1.0) { return {Case::gamma_vs_gg, EstimatorKind::ml, {lam, beta}}; }
LocalAlternative weibull_alt(double beta = 1.0, double rho = 1.0) {
    return {Case::weibull_vs_gg, EstimatorKind::ml, {beta, rho}};
}
LocalAlternative epd_alt(double lam, EstimatorKind k, double mu = 0.0, double sig = 1.0) {
    return {Case::epd_vs_apd, k, {lam, mu, sig}};
}

// Drift of the trigonometric moments per unit parameter drift, measured on
// a deterministic midpoint-quantile sample of the alternative and a refit
// of the null model.
double finite_drift(const std::function<double(double)>& alt_quantile, FamilyId null_fam, EstimatorKind kind,
                    const KnownMask& mask, bool sine) {
    const int n = 200000;
    Sample x(n);
    for (int i = 0; i < n; ++i) x[i] = alt_quantile((i + 0.5) / n);
    const auto f = fit(null_fam, kind, mask, x);
    const auto m = trig_moments(null_fam, f.theta, x);
    return sine ? m.s : m.c;
}

}  // namespace

TEST_CASE("power equals the level at zero drift", "[power]") {
    for (double alpha : {0.01, 0.05, 0.1}) {
        for (auto alt : {gamma_alt(0.5), gamma_alt(1.5), weibull_alt(), epd_alt(1.5, EstimatorKind::ml),
                         epd_alt(1.5, EstimatorKind::mm)}) {
            alt.alpha_level = alpha;
            CHECK(noncentrality(alt, 0.0, 0.0) == 0.0);
            CHECK(power_curve(alt, {0.0}, {0.0}).front().power == alpha);
            CHECK(asymptotic_power(0.0, alpha) == alpha);
        }
    }
}

TEST_CASE("power is symmetric, monotone and bounded below by the level", "[power]") {
    for (const auto& alt : {gamma_alt(1.0), weibull_alt()}) {
        std::vector<double> d;
        for (int i = 0; i <= 60; ++i) d.push_back(0.5 * i);
        const auto curve = power_curve(alt, d);
        for (std::size_t i = 1; i < curve.size(); ++i) {
            CHECK(curve[i].power >= curve[i - 1].power);
            CHECK(curve[i].ncp > 0.0);
            CHECK(curve[i].power >= alt.alpha_level - 1e-12);
        }
        CHECK(noncentrality(alt, -3.0) == noncentrality(alt, 3.0));
    }
}

TEST_CASE("closed forms agree with direct assembly", "[power]") {
    std::vector<LocalAlternative> alts{gamma_alt(0.5), gamma_alt(1.0), gamma_alt(1.5), gamma_alt(3.0), weibull_alt()};
    for (double lam : {1.2, 1.5, 2.0, 3.0})
        for (auto k : {EstimatorKind::ml, EstimatorKind::mm}) alts.push_back(epd_alt(lam, k));
    for (const auto& alt : alts) {
        const Parts a = closed_form(alt);
        const Parts b = direct(alt);
        INFO(to_string(alt.kind) << " " << to_string(alt.estimator) << " theta0[0]=" << alt.theta0[0]);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) CHECK_THAT(a.sigma(i, j), WithinAbs(b.sigma(i, j), 1e-8));
            for (int j = 0; j < a.m.cols(); ++j) CHECK_THAT(a.m(i, j), WithinAbs(b.m(i, j), 1e-8));
        }
    }
}

TEST_CASE("noncentrality does not depend on scale and location", "[power]") {
    const double d1 = 2.0, d2 = -1.5;
    for (double beta : {0.3, 2.0, 7.0})
        CHECK_THAT(noncentrality(Parts{direct(gamma_alt(1.5, beta))}, d1),
                   WithinRel(noncentrality(Parts{direct(gamma_alt(1.5))}, d1), 1e-9));
    for (double beta : {0.3, 4.0})
        for (double rho : {0.5, 2.5})
            CHECK_THAT(noncentrality(direct(weibull_alt(beta, rho)), d1),
                       WithinRel(noncentrality(direct(weibull_alt()), d1), 1e-9));
    for (auto k : {EstimatorKind::ml, EstimatorKind::mm})
        for (double mu : {-2.0, 3.0})
            for (double sig : {0.4, 5.0})
                CHECK_THAT(noncentrality(direct(epd_alt(1.5, k, mu, sig)), d1, d2),
                           WithinRel(noncentrality(direct(epd_alt(1.5, k)), d1, d2), 1e-9));
}

TEST_CASE("drift vector matches a finite-drift refit", "[power]") {
    const double eps = 1e-3;
    SECTION("gamma inside GG") {
        const double lam = 1.5;
        const Parts p = closed_form(gamma_alt(lam));
        const auto mask = KnownMask::none(FamilyId::gamma);
        for (bool sine : {false, true}) {
            auto at = [&](double e) {
                return finite_drift([&](double u) { return quantile(FamilyId::gg, {lam, 1.0, 1.0 + e}, u); }, FamilyId::gamma,
                                    EstimatorKind::ml, mask, sine);
            };
            CHECK_THAT((at(eps) - at(-eps)) / (2.0 * eps), WithinAbs(p.m(sine ? 1 : 0, 0), 2e-5));
        }
    }
    SECTION("Weibull inside GG") {
        const Parts p = closed_form(weibull_alt());
        const auto mask = KnownMask::none(FamilyId::weibull);
        for (bool sine : {false, true}) {
            auto at = [&](double e) {
                return finite_drift([&](double u) { return quantile(FamilyId::gg, {1.0 + e, 1.0, 1.0}, u); },
                                    FamilyId::weibull, EstimatorKind::ml, mask, sine);
            };
            CHECK_THAT((at(eps) - at(-eps)) / (2.0 * eps), WithinAbs(p.m(sine ? 1 : 0, 0), 2e-5));
        }
    }
    SECTION("EPD inside APD") {
        const double lam = 1.5;
        for (auto k : {EstimatorKind::ml, EstimatorKind::mm}) {
            const Parts p = closed_form(epd_alt(lam, k));
            auto mask = KnownMask::none(FamilyId::epd);
            mask.fix(0, lam);
            for (int col = 0; col < 2; ++col) {
                for (bool sine : {false, true}) {
                    auto at = [&](double e) {
                        const ApdParams q{lam, 0.5 + (col == 0 ? e : 0.0), lam + (col == 1 ? e : 0.0), 0.0, 1.0};
                        return finite_drift([&](double u) { return apd_quantile(q, u); }, FamilyId::epd, k, mask, sine);
                    };
                    INFO(to_string(k) << " column " << col << (sine ? " sin" : " cos"));
                    CHECK_THAT((at(eps) - at(-eps)) / (2.0 * eps), WithinAbs(p.m(sine ? 1 : 0, col), 2e-5));
                }
            }
        }
    }
}

TEST_CASE("gamma power curves separate and saturate", "[power]") {
    std::vector<double> d;
    for (int i = 0; i <= 30; ++i) d.push_back(i);
    std::vector<std::vector<PowerPoint>> curves;
    for (double lam : {0.5, 1.0, 1.5}) curves.push_back(power_curve(gamma_alt(lam), d));
    for (const auto& c : curves) CHECK(c.back().power >= 0.99);
    for (std::size_t a = 0; a < curves.size(); ++a)
        for (std::size_t b = a + 1; b < curves.size(); ++b) CHECK(std::abs(curves[a][5].power - curves[b][5].power) > 1e-3);
}

TEST_CASE("moment estimator is at least as powerful for EPD(1.5)", "[power]") {
    const auto ml = epd_alt(1.5, EstimatorKind::ml);
    const auto mm = epd_alt(1.5, EstimatorKind::mm);
    for (int i = -20; i <= 20; ++i) {
        for (int j = -20; j <= 20; ++j) {
            const double d1 = 0.5 * i, d2 = 0.5 * j;
            INFO("delta=(" << d1 << "," << d2 << ")");
            CHECK(noncentrality(mm, d1, d2) >= noncentrality(ml, d1, d2) - 1e-12);
        }
    }
}

TEST_CASE("invalid alternatives are rejected", "[power]") {
    auto bad = gamma_alt(1.0);
    bad.estimator = EstimatorKind::mm;
    CHECK_THROWS_AS(validate_alternative(bad), ConfigError);
    auto level = gamma_alt(1.0);
    level.alpha_level = 1.2;
    CHECK_THROWS_AS(validate_alternative(level), DomainError);
    CHECK_THROWS_AS(validate_alternative(gamma_alt(-1.0)), DomainError);
    CHECK(case_from_name("weibull") == Case::weibull_vs_gg);
    CHECK_THROWS_AS(case_from_name("cauchy"), trigof::Error);
}

TEST_CASE("empirical power is reproducible across thread counts", "[power][sim]") {
    SimOptions one{300, 200, 5, 1};
    SimOptions three{300, 200, 5, 3};
    const auto a = empirical_power(gamma_alt(1.0), 4.0, 0.0, one);
    const auto b = empirical_power(gamma_alt(1.0), 4.0, 0.0, three);
    CHECK(a.rejections == b.rejections);
    CHECK(a.failures == b.failures);
    CHECK(a.reps == 200);
    CHECK_THAT(a.std_error, WithinAbs(std::sqrt(a.rate * (1 - a.rate) / (a.reps - a.failures)), 1e-15));
}
