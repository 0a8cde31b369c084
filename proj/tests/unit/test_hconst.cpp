#include <catch2/catch_amalgamated.hpp>

#include "trigof/errors.hpp"
#include "trigof/hconst.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

using namespace trigof;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Integral of g over (0, 1) split at 1/2.
template <class F>
double unit_integral(F g) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double u) {
        u = std::clamp(u, 1e-300, 1.0 - 1e-16);
        return g(u);
    };
    return ts.integrate(f, 0.0, 0.5, 1e-13) + ts.integrate(f, 0.5, 1.0, 1e-13);
}

}  // namespace

TEST_CASE("gamma-kernel constants agree with the PIT-scale form", "[hconst]") {
    using boost::math::gamma_p;
    using boost::math::gamma_p_inv;
    for (double a : {0.5, 1.0, 2.3}) {
        for (double b : {0.7, 1.5, 4.0}) {
            for (double c : {0.5, 1.0, 2.0}) {
                const double r6 = unit_integral([&](double u) { return std::cos(two_pi * gamma_p(a, c * gamma_p_inv(b, u))); });
                const double r7 = unit_integral([&](double u) { return std::sin(two_pi * gamma_p(a, c * gamma_p_inv(b, u))); });
                INFO("a=" << a << " b=" << b << " c=" << c);
                CHECK_THAT(hconst::h(6, {a, b, c}), WithinAbs(r6, 1e-9));
                CHECK_THAT(hconst::h(7, {a, b, c}), WithinAbs(r7, 1e-9));
            }
        }
    }
    for (double lam : {0.4, 1.0, 2.5, 7.0}) {
        const double r10 = unit_integral([&](double u) { return std::log(std::max(gamma_p_inv(lam, u), 1e-300)) * std::cos(two_pi * u); });
        const double r11 = unit_integral([&](double u) { return std::log(std::max(gamma_p_inv(lam, u), 1e-300)) * std::sin(two_pi * u); });
        INFO("lambda=" << lam);
        CHECK_THAT(hconst::h(10, {lam}), WithinAbs(r10, 1e-9));
        CHECK_THAT(hconst::h(11, {lam}), WithinAbs(r11, 1e-9));
    }
}

TEST_CASE("Student-t h14 against direct quadrature", "[hconst]") {
    // With B ~ Beta(lambda/2, 1/2) the t variable is |Y| = sqrt(lambda (1 - B) / B).
    for (double lam : {3.0, 5.0, 12.0}) {
        const double a = 0.5 * lam;
        const double ref = unit_integral([&](double u) {
            const double v = boost::math::ibeta_inv(a, 0.5, u);
            const double arg = std::numbers::pi * boost::math::ibeta(a, 0.5, v);
            return std::cos(arg) * (std::log(v) + (lam + 1.0) / lam * (1.0 - v));
        });
        INFO("lambda=" << lam);
        CHECK_THAT(hconst::h(14, {lam}), WithinAbs(ref, 1e-8));
    }
}

TEST_CASE("logistic constants", "[hconst]") {
    const auto k = hconst::logistic_constants();
    CHECK_THAT(k.c_cos, WithinAbs(0.698397593884459, 1e-10));
    CHECK_THAT(k.c_sin, WithinAbs(-1.0 / std::numbers::pi, 1e-10));
    CHECK_THAT(k.m_cos, WithinAbs(0.4909114316, 1e-8));
    CHECK_THAT(k.m_sin, WithinAbs(-0.235854187, 1e-8));
}

TEST_CASE("memoized values are bit-identical and thread-safe", "[hconst]") {
    hconst::clear_cache();
    const double first = hconst::h(6, {1.3, 2.0, 0.7});
    CHECK(hconst::cache_size() == 1);
    CHECK(hconst::h(6, {1.3, 2.0, 0.7}) == first);
    CHECK(hconst::h_uncached(6, std::vector<double>{1.3, 2.0, 0.7}) == first);
    std::vector<double> got(8);
    std::vector<std::thread> pool;
    for (int t = 0; t < 8; ++t)
        pool.emplace_back([&, t] {
            for (int k = 1; k <= 5; ++k) got[t] += hconst::h(1, {0.5 + 0.25 * k});
        });
    for (auto& th : pool) th.join();
    for (double g : got) CHECK(g == got[0]);
}

TEST_CASE("argument validation", "[hconst]") {
    CHECK(hconst::arity(6) == 3);
    CHECK(hconst::arity(1) == 1);
    CHECK_THROWS_AS(hconst::h(6, {1.0, -1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(hconst::h(0, {1.0}), trigof::Error);
    CHECK_THROWS_AS(hconst::h(38, {1.0}), trigof::Error);
    CHECK_THROWS_AS(hconst::h(6, {1.0}), trigof::Error);
}
