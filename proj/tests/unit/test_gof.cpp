#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "trigof/errors.hpp"
#include "trigof/gof.hpp"
#include "trigof/scaling.hpp"

#include <cmath>
#include <numbers>

using namespace trigof;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("trigonometric moments", "[gof]") {
    const std::vector<double> x{0.25, 0.5};
    const auto m = trig_moments(FamilyId::uniform, {0.0, 1.0}, x);
    CHECK(m.n == 2);
    CHECK_THAT(m.c, WithinAbs(-0.5, 1e-15));
    CHECK_THAT(m.s, WithinAbs(0.5, 1e-15));
    const auto big = trig_moments(FamilyId::normal, {0.0, 1.0}, sample(FamilyId::normal, {3.0, 0.1}, 500, 1));
    CHECK(std::abs(big.c) <= 1.0);
    CHECK(std::abs(big.s) <= 1.0);
    CHECK_THROWS_AS(trig_moments(FamilyId::gamma, {1.0, 1.0}, std::vector<double>{1.0, -2.0}), DomainError);
    CHECK_THROWS_AS(trig_moments(FamilyId::gamma, {1.0, 1.0}, std::vector<double>{}), DataError);
}

TEST_CASE("chi-squared(2) tail", "[gof]") {
    CHECK_THAT(chi2_2_sf(5.991464547107979), WithinAbs(0.05, 1e-9));
    CHECK(chi2_2_sf(0.0) == 1.0);
    for (double t : {0.3, 2.0, 13.0}) CHECK_THAT(chi2_2_sf(t), WithinRel(std::exp(-t / 2), 1e-12));
}

TEST_CASE("known parameters reduce to 2n(C^2 + S^2)", "[gof]") {
    for (FamilyId fam : all_families()) {
        const auto theta = oracle::theta_grid(fam).front();
        const Sample x = sample(fam, theta, 250, 17);
        const auto r = evaluate(fam, EstimatorKind::ml, KnownMask::all(fam, theta), theta, x);
        REQUIRE(r.sigma(0, 0) == 0.5);
        REQUIRE(r.sigma(1, 1) == 0.5);
        REQUIRE(r.sigma(0, 1) == 0.0);
        const double n = static_cast<double>(x.size());
        const double expect = 2.0 * n * (r.moments.c * r.moments.c + r.moments.s * r.moments.s);
        INFO(family_name(fam));
        CHECK_THAT(r.tn, WithinAbs(expect, 1e-12 * std::max(1.0, expect)));
        CHECK_THAT(r.p_chi2, WithinAbs(std::exp(-r.tn / 2), 1e-12));
        CHECK(r.estimated == 0);
    }
}

TEST_CASE("statistic and standardized components", "[gof]") {
    const Sample x = sample(FamilyId::gumbel, {1.0, 0.5}, 300, 4);
    const auto r = run_test(FamilyId::gumbel, EstimatorKind::ml, KnownMask::none(FamilyId::gumbel), x);
    const double n = 300.0;
    const auto inv = linalg::inverse_symmetric(r.sigma);
    const double c = r.moments.c, s = r.moments.s;
    const double t = n * (c * c * inv(0, 0) + 2.0 * c * s * inv(0, 1) + s * s * inv(1, 1));
    CHECK(r.tn >= 0.0);
    CHECK_THAT(r.tn, WithinRel(t, 1e-12));
    CHECK_THAT(r.zc, WithinRel(std::sqrt(n) * c / std::sqrt(r.sigma(0, 0)), 1e-14));
    CHECK_THAT(r.zs, WithinRel(std::sqrt(n) * s / std::sqrt(r.sigma(1, 1)), 1e-14));
    CHECK(r.p_chi2 > 0.0);
    CHECK(r.p_chi2 <= 1.0);
    CHECK(r.estimated == 2);
}

TEST_CASE("statistic is invariant under affine maps of the data", "[gof]") {
    std::uint64_t seed = 70;
    for (FamilyId fam : {FamilyId::normal, FamilyId::laplace, FamilyId::logistic, FamilyId::gumbel, FamilyId::exp_weibull,
                         FamilyId::epd, FamilyId::student_t}) {
        const auto theta = oracle::theta_grid(fam).front();
        const Sample x = sample(fam, theta, 400, seed++);
        Sample y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = -2.5 + 3.5 * x[i];
        const auto mask = KnownMask::none(fam);
        const auto rx = run_test(fam, EstimatorKind::ml, mask, x);
        const auto ry = run_test(fam, EstimatorKind::ml, mask, y);
        INFO(family_name(fam));
        CHECK_THAT(ry.tn, WithinAbs(rx.tn, 1e-8));
    }
    for (FamilyId fam : {FamilyId::gamma, FamilyId::weibull, FamilyId::exponential, FamilyId::lomax}) {
        const auto theta = oracle::theta_grid(fam).front();
        const Sample x = sample(fam, theta, 400, seed++);
        Sample y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = 3.5 * x[i];
        const auto mask = KnownMask::none(fam);
        INFO(family_name(fam));
        CHECK_THAT(run_test(fam, EstimatorKind::ml, mask, y).tn, WithinAbs(run_test(fam, EstimatorKind::ml, mask, x).tn, 1e-8));
    }
}

TEST_CASE("confidence ellipse", "[gof]") {
    const auto s = sigma(FamilyId::normal, EstimatorKind::ml, {0.0, 1.0}, KnownMask::none(FamilyId::normal));
    const auto e = ellipse(s, 0.95, 64);
    CHECK_THAT(e.q, WithinAbs(5.991464547107979, 1e-12));
    REQUIRE(e.boundary.size() == 64);
    const auto inv = linalg::inverse_symmetric(s);
    for (const auto& p : e.boundary)
        CHECK_THAT(p.c * p.c * inv(0, 0) + 2.0 * p.c * p.s * inv(0, 1) + p.s * p.s * inv(1, 1), WithinRel(e.q, 1e-10));
    CHECK(e.semi_major >= e.semi_minor);
    CHECK_THAT(e.c_threshold, WithinRel(1.959963984540054 * std::sqrt(s(0, 0)), 1e-12));
    CHECK_THAT(e.s_threshold, WithinRel(1.959963984540054 * std::sqrt(s(1, 1)), 1e-12));
    const auto half = ellipse(linalg::Matrix(2, 2, {0.5, 0.0, 0.0, 0.5}), 0.95);
    CHECK_THAT(half.semi_major, WithinRel(std::sqrt(0.5 * half.q), 1e-14));
    CHECK_THROWS_AS(ellipse(linalg::Matrix(2, 2, {1.0, 2.0, 2.0, 1.0}), 0.95), SingularityError);
    CHECK_THROWS_AS(ellipse(s, 1.5), trigof::Error);
}

TEST_CASE("Monte Carlo p-value does not depend on the thread count", "[gof][mc]") {
    const Sample x = sample(FamilyId::gamma, {2.5, 0.5}, 120, 9);
    const auto mask = KnownMask::none(FamilyId::gamma);
    McOptions one{400, 77, 1};
    McOptions four{400, 77, 4};
    const auto a = run_test(FamilyId::gamma, EstimatorKind::ml, mask, x, one);
    const auto b = run_test(FamilyId::gamma, EstimatorKind::ml, mask, x, four);
    REQUIRE(a.mc);
    REQUIRE(b.mc);
    CHECK(a.mc->exceed == b.mc->exceed);
    CHECK(a.mc->p_value == b.mc->p_value);
    CHECK(a.mc->completed + a.mc->failures == 400);
    CHECK_THAT(a.mc->p_value, WithinAbs((a.mc->exceed + 1.0) / (a.mc->completed + 1.0), 1e-15));
    CHECK_THAT(a.mc->raw_proportion, WithinAbs(static_cast<double>(a.mc->exceed) / a.mc->completed, 1e-15));
}

TEST_CASE("Monte Carlo and chi-squared p-values agree", "[gof][mc]") {
    struct Case {
        FamilyId fam;
        EstimatorKind kind;
        ParamVector theta;
    };
    const std::vector<Case> cases{{FamilyId::normal, EstimatorKind::ml, {0.0, 1.0}},
                                  {FamilyId::laplace, EstimatorKind::ml, {0.0, 1.0}},
                                  {FamilyId::gamma, EstimatorKind::ml, {2.0, 1.0}},
                                  {FamilyId::logistic, EstimatorKind::mm, {0.0, 1.0}}};
    std::uint64_t seed = 300;
    for (const auto& c : cases) {
        const Sample x = sample(c.fam, c.theta, 200, seed++);
        const auto r = run_test(c.fam, c.kind, KnownMask::none(c.fam), x, McOptions{4000, seed++, 0});
        INFO(family_name(c.fam) << " " << to_string(c.kind) << " p_chi2=" << r.p_chi2 << " p_mc=" << r.mc->p_value);
        CHECK(std::abs(r.mc->p_value - r.p_chi2) < 0.03);
    }
}
