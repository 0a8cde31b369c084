#include "oracles.hpp"

#include "trigof/errors.hpp"
#include "trigof/scaling.hpp"
#include "trigof/specfun.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace oracle {

using namespace trigof;
using linalg::Matrix;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

bool close(double a, double b, double rel, double abs = 0.0) {
    return std::abs(a - b) <= std::max(abs, rel * std::max(std::abs(a), std::abs(b)));
}

}  // namespace

std::string describe(FamilyId fam, const ParamVector& theta) {
    std::string s(family_name(fam));
    s += "(";
    for (std::size_t i = 0; i < theta.size(); ++i) s += (i ? "," : "") + num(theta[i]);
    return s + ")";
}

std::vector<ParamVector> theta_grid(FamilyId fam) {
    using enum FamilyId;
    switch (fam) {
        case epd: return {{2.0, 0.0, 1.0}, {1.5, 0.3, 2.0}, {3.0, -1.0, 0.5}, {1.2, 0.0, 1.0}};
        case laplace: return {{0.0, 1.0}, {1.0, 2.5}};
        case normal: return {{0.0, 1.0}, {-2.0, 0.5}};
        case exp_gamma: return {{2.0, 0.0, 1.0}, {0.7, 1.0, 2.0}};
        case exp_weibull: return {{0.0, 1.0}, {1.0, 0.5}};
        case gumbel: return {{0.0, 1.0}, {1.0, 0.5}};
        case logistic: return {{0.0, 1.0}, {0.2, 1.3}};
        case student_t: return {{5.0, 0.0, 1.0}, {3.0, 1.0, 2.0}, {10.0, -1.0, 0.5}};
        case log_epd: return {{2.0, 0.0, 1.0}, {1.5, 0.5, 0.8}};
        case log_laplace: return {{0.0, 1.0}, {0.5, 0.7}};
        case log_normal: return {{0.0, 1.0}, {1.0, 0.5}};
        case half_epd: return {{2.0, 1.0}, {1.5, 2.0}, {3.0, 0.7}};
        case gg: return {{1.0, 1.0, 1.0}, {2.0, 1.5, 0.7}, {0.5, 1.0, 2.0}};
        case weibull: return {{1.0, 1.0}, {2.0, 1.5}};
        case frechet: return {{1.0, 2.0}, {2.0, 3.0}};
        case gompertz: return {{1.0, 1.0}, {0.5, 2.0}};
        case log_logistic: return {{1.0, 2.0}, {2.0, 3.0}};
        case gamma: return {{1.0, 1.0}, {2.5, 0.5}, {0.5, 2.0}};
        case inverse_gamma: return {{2.0, 1.0}, {3.5, 2.0}};
        case beta_prime: return {{2.0, 3.0}, {1.5, 4.0}};
        case lomax: return {{3.0, 1.0}, {2.0, 2.0}};
        case nakagami: return {{1.0, 1.0}, {2.5, 2.0}};
        case inverse_gaussian: return {{1.0, 1.0}, {2.0, 3.0}};
        case exponential: return {{1.0}, {2.5}};
        case half_normal: return {{1.0}, {2.0}};
        case rayleigh: return {{1.0}, {2.0}};
        case maxwell_boltzmann: return {{1.0}, {2.0}};
        case chi_squared: return {{3.0}, {1.5}};
        case pareto: return {{2.0}, {3.5}};
        case beta: return {{2.0, 3.0}, {0.7, 1.5}};
        case kumaraswamy: return {{2.0, 3.0}, {0.7, 1.5}};
        case uniform: return {{0.0, 1.0}, {-1.0, 2.0}};
    }
    return {};
}

double pit_expect(FamilyId fam, const ParamVector& theta, const std::function<double(double, double)>& g) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double u) {
        u = std::clamp(u, 1e-16, 1.0 - 1e-16);
        const double x = quantile(fam, theta, u);
        if (!in_support(fam, theta, x)) return 0.0;
        const double v = g(u, x);
        return std::isfinite(v) ? v : 0.0;
    };
    return ts.integrate(f, 0.0, 0.5) + ts.integrate(f, 0.5, 1.0);
}

RawMatrices raw_matrices(FamilyId fam, EstimatorKind kind, const ParamVector& theta) {
    const int p = arity(fam);
    const double two_pi = 2.0 * std::numbers::pi;
    RawMatrices m{Matrix(2, p), Matrix(p, p), Matrix(2, p)};
    auto trig = [&](int row, double u) { return row ? std::sin(two_pi * u) : std::cos(two_pi * u); };
    for (int j = 0; j < p; ++j) {
        for (int row = 0; row < 2; ++row) {
            m.G(row, j) = pit_expect(fam, theta, [&](double u, double x) { return trig(row, u) * score(fam, theta, x)[j]; });
            m.tau_r(row, j) = pit_expect(fam, theta, [&](double u, double x) {
                return trig(row, u) * estimating_function(fam, kind, theta, x)[j];
            });
        }
        for (int i = 0; i <= j; ++i) {
            const double v = pit_expect(fam, theta, [&](double, double x) {
                const auto r = estimating_function(fam, kind, theta, x);
                return r[i] * r[j];
            });
            m.cov_r(i, j) = v;
            m.cov_r(j, i) = v;
        }
    }
    return m;
}

MatrixDeviation compare_matrices(FamilyId fam, EstimatorKind kind, const ParamVector& theta) {
    const MatrixSet ms = matrices(fam, kind, theta);
    const RawMatrices q = raw_matrices(fam, kind, theta);
    const int p = arity(fam);
    MatrixDeviation d;
    for (int row = 0; row < 2; ++row)
        for (int j = 0; j < p; ++j) d.g = std::max(d.g, std::abs(q.G(row, j) - ms.G(row, j)));
    if (kind == EstimatorKind::ml) {
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) d.r = std::max(d.r, std::abs(q.cov_r(i, j) - ms.R(i, j)));
        for (int row = 0; row < 2; ++row)
            for (int j = 0; j < p; ++j) d.j = std::max(d.j, std::abs(q.tau_r(row, j) - ms.J(row, j)));
        return d;
    }
    std::vector<int> est;
    for (int j = 0; j < p; ++j)
        if (std::find(ms.required_known.begin(), ms.required_known.end(), j) == ms.required_known.end())
            est.push_back(j);
    const Matrix rinv = linalg::inverse_symmetric(linalg::select(ms.R, est, est));
    const auto k = static_cast<int>(est.size());
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) d.r = std::max(d.r, std::abs(q.cov_r(est[i], est[j]) - rinv(i, j)));
    for (int row = 0; row < 2; ++row) {
        for (int j = 0; j < k; ++j) {
            double jr = 0.0;
            for (int l = 0; l < k; ++l) jr += ms.J(row, est[l]) * rinv(l, j);
            d.j = std::max(d.j, std::abs(q.tau_r(row, est[j]) - jr));
        }
    }
    return d;
}

double derivative(const std::function<double(double)>& f, double x, double h) {
    return (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
}

std::vector<std::string> specfun_recurrences() {
    namespace sf = trigof::specfun;
    std::vector<std::string> bad;
    auto expect = [&](bool ok, const std::string& what) {
        if (!ok) bad.push_back(what);
    };
    // Recurrences written so that neither side suffers cancellation.
    for (int k = 0; k <= 24; ++k) {
        const double z = std::pow(10.0, -3.0 + 0.25 * k);
        expect(close(sf::ln_gamma(z), sf::ln_gamma(z + 1.0) - std::log(z), 1e-11, 1e-11),
               "lnGamma(z+1) = lnGamma(z) + ln z at z=" + num(z));
        expect(close(sf::digamma(z), sf::digamma(z + 1.0) - 1.0 / z, 1e-11, 1e-11),
               "psi(z+1) = psi(z) + 1/z at z=" + num(z));
        expect(close(sf::trigamma(z), sf::trigamma(z + 1.0) + 1.0 / (z * z), 1e-11, 1e-14),
               "psi1(z+1) = psi1(z) - 1/z^2 at z=" + num(z));
        expect(close(sf::ln_gamma(z), boost::math::lgamma(z), 1e-12, 1e-13), "lnGamma vs reference at z=" + num(z));
        expect(close(sf::digamma(z), boost::math::digamma(z), 1e-12, 1e-13), "psi vs reference at z=" + num(z));
        expect(close(sf::trigamma(z), boost::math::trigamma(z), 1e-12, 1e-14), "psi1 vs reference at z=" + num(z));
        if (z < 150.0)
            expect(close(sf::gamma_fn(z + 1.0), z * sf::gamma_fn(z), 1e-11), "Gamma(1+z) = z Gamma(z) at z=" + num(z));
    }
    for (double a : {0.1, 0.5, 1.0, 2.5, 10.0, 60.0}) {
        for (double x : {0.01, 0.3, 1.0, 2.0, 7.0, 30.0, 80.0}) {
            const double term = std::exp(a * std::log(x) - x - sf::ln_gamma(a + 1.0));
            expect(close(sf::gamma_p(a + 1.0, x), sf::gamma_p(a, x) - term, 1e-11, 1e-14),
                   "P(a+1,x) = P(a,x) - x^a e^-x / Gamma(a+1) at a=" + num(a) + ", x=" + num(x));
            expect(close(sf::gamma_p(a, x) + sf::gamma_q(a, x), 1.0, 1e-14), "P + Q = 1 at a=" + num(a) + ", x=" + num(x));
            expect(close(sf::gamma_p(a, x), boost::math::gamma_p(a, x), 1e-12, 1e-15),
                   "P vs reference at a=" + num(a) + ", x=" + num(x));
            const double p = sf::gamma_p(a, x);
            if (p > 1e-10 && p < 1.0 - 1e-10)
                expect(close(sf::gamma_p_inv(a, p), x, 1e-9), "P^{-1}(P(a,x)) = x at a=" + num(a) + ", x=" + num(x));
        }
    }
    for (double a : {0.3, 1.0, 2.5, 8.0}) {
        for (double b : {0.5, 1.0, 3.0, 12.0}) {
            for (double x : {0.001, 0.2, 0.5, 0.77, 0.999}) {
                const double lb = sf::ln_gamma(a) + sf::ln_gamma(b) - sf::ln_gamma(a + b);
                const double term = std::exp(a * std::log(x) + b * std::log1p(-x) - lb) / a;
                const std::string where = " at a=" + num(a) + ", b=" + num(b) + ", x=" + num(x);
                expect(close(sf::reg_beta_cdf(a + 1.0, b, x), sf::reg_beta_cdf(a, b, x) - term, 1e-10, 1e-14),
                       "I_x(a+1,b) = I_x(a,b) - x^a(1-x)^b/(a B(a,b))" + where);
                expect(close(sf::reg_beta_cdf(a, b, x), 1.0 - sf::reg_beta_cdf(b, a, 1.0 - x), 1e-12, 1e-14),
                       "I_x(a,b) = 1 - I_{1-x}(b,a)" + where);
                expect(close(sf::reg_beta_cdf(a, b, x), boost::math::ibeta(a, b, x), 1e-12, 1e-15),
                       "I_x vs reference" + where);
            }
        }
    }
    for (double p : {1e-12, 1e-5, 0.025, 0.3, 0.5, 0.8, 0.975, 1.0 - 1e-9}) {
        const double z = sf::std_normal_quantile(p);
        expect(close(sf::std_normal_cdf(z), p, 1e-12, 1e-15), "Phi(Phi^{-1}(p)) = p at p=" + num(p));
    }
    // df = 2 closed form and the ncp -> 0 limit.
    for (double t : {0.1, 1.0, 5.991464547107979, 20.0}) {
        expect(close(sf::noncentral_chi2_sf(2, 0.0, t), std::exp(-0.5 * t), 1e-14), "central chi2_2 tail at t=" + num(t));
        expect(close(sf::noncentral_chi2_sf(2, 1e-9, t), std::exp(-0.5 * t), 1e-8), "ncp -> 0 limit at t=" + num(t));
    }
    return bad;
}

std::vector<std::string> pdf_cdf_consistency(FamilyId fam, const ParamVector& theta) {
    std::vector<std::string> bad;
    const std::string who = describe(fam, theta);
    const double spread = quantile(fam, theta, 0.75) - quantile(fam, theta, 0.25);
    for (int k = 0; k < 20; ++k) {
        const double u = (k + 0.5) / 20.0;
        const double x = quantile(fam, theta, u);
        if (!close(cdf(fam, theta, x), u, 1e-9, 1e-12))
            bad.push_back(who + ": F(F^{-1}(u)) != u at u=" + num(u));
        // Keep the stencil well inside the support near singular endpoints.
        const auto [lo, hi] = support_bounds(fam, theta);
        double h = 1e-3 * spread;
        if (std::isfinite(lo)) h = std::min(h, 1e-2 * (x - lo));
        if (std::isfinite(hi)) h = std::min(h, 1e-2 * (hi - x));
        const double d = derivative([&](double t) { return cdf(fam, theta, t); }, x, h);
        const double f = pdf(fam, theta, x);
        if (!close(d, f, 1e-5, 1e-12)) bad.push_back(who + ": dF/dx = " + num(d) + " vs f = " + num(f) + " at u=" + num(u));
        if (!close(std::log(f), log_pdf(fam, theta, x), 1e-12, 1e-12))
            bad.push_back(who + ": log_pdf inconsistent at u=" + num(u));
    }
    return bad;
}

std::vector<std::string> score_gradient(FamilyId fam, const ParamVector& theta, double rel_tol) {
    std::vector<std::string> bad;
    const std::string who = describe(fam, theta);
    for (double u : {0.03, 0.2, 0.37, 0.61, 0.88, 0.97}) {
        const double x = quantile(fam, theta, u);
        const auto s = score(fam, theta, x);
        for (std::size_t j = 0; j < theta.size(); ++j) {
            const double h = 1e-4 * std::max(std::abs(theta[j]), 0.1);
            const double d = derivative(
                [&](double t) {
                    ParamVector th = theta;
                    th[j] = t;
                    return log_pdf(fam, th, x);
                },
                theta[j], h);
            if (!close(d, s[j], rel_tol, rel_tol))
                bad.push_back(who + ": score[" + std::to_string(j) + "] = " + num(s[j]) + " vs finite difference " +
                              num(d) + " at u=" + num(u));
        }
    }
    return bad;
}

std::vector<std::string> sigma_properties(FamilyId fam, EstimatorKind kind, const ParamVector& theta,
                                          const KnownMask& mask) {
    std::vector<std::string> bad;
    std::string who = describe(fam, theta) + " " + to_string(kind) + " known={";
    for (int i : mask.known_indices()) who += std::string(info(fam).params[i]) + " ";
    who += "}";
    Matrix s;
    try {
        s = sigma(fam, kind, theta, mask);
    } catch (const trigof::Error& e) {
        bad.push_back(who + ": " + e.what());
        return bad;
    }
    if (s(0, 1) != s(1, 0)) bad.push_back(who + ": Sigma not symmetric");
    if (!std::isfinite(s(0, 0)) || !std::isfinite(s(1, 1)) || !std::isfinite(s(0, 1))) {
        bad.push_back(who + ": Sigma not finite");
        return bad;
    }
    const auto e = linalg::eigen_symmetric_2x2(s);
    if (!(e.values[0] > 0.0)) bad.push_back(who + ": smallest eigenvalue " + num(e.values[0]) + " <= 0");
    if (kind == EstimatorKind::ml && e.values[1] > 0.5 + 1e-12) bad.push_back(who + ": largest eigenvalue " + num(e.values[1]) + " > 1/2");
    if (!linalg::is_positive_definite(s)) bad.push_back(who + ": Cholesky failed");
    return bad;
}

std::vector<std::string> sigma_grid() {
    std::vector<std::string> bad;
    for (FamilyId fam : all_families()) {
        for (const auto& theta : theta_grid(fam)) {
            for (EstimatorKind kind : {EstimatorKind::ml, EstimatorKind::mm}) {
                if (!supports(fam, kind)) continue;
                const MatrixSet ms = matrices(fam, kind, theta);
                auto base = KnownMask::none(fam);
                for (int i : ms.required_known) base.fix(i, theta[i]);
                std::vector<KnownMask> masks{base};
                for (int i = 0; i < arity(fam); ++i) {
                    if (base.is_known(i)) continue;
                    KnownMask m = base;
                    m.fix(i, theta[i]);
                    masks.push_back(m);
                }
                for (const auto& m : masks) {
                    auto v = sigma_properties(fam, kind, theta, m);
                    bad.insert(bad.end(), v.begin(), v.end());
                }
            }
        }
    }
    return bad;
}

std::vector<std::string> mm_eigen_exceedances() {
    std::vector<std::string> out;
    for (FamilyId fam : all_families()) {
        if (!supports(fam, EstimatorKind::mm)) continue;
        for (const auto& theta : theta_grid(fam)) {
            const MatrixSet ms = matrices(fam, EstimatorKind::mm, theta);
            auto mask = KnownMask::none(fam);
            for (int i : ms.required_known) mask.fix(i, theta[i]);
            const auto e = linalg::eigen_symmetric_2x2(sigma(ms, mask));
            if (e.values[1] > 0.5) out.push_back(describe(fam, theta) + ": " + num(e.values[1]));
        }
    }
    return out;
}

linalg::Matrix direct_sigma(FamilyId fam, EstimatorKind kind, const ParamVector& theta, const KnownMask& mask) {
    const double two_pi = 2.0 * std::numbers::pi;
    const std::vector<int> u = mask.unknown_indices();
    const auto k = static_cast<int>(u.size());
    Matrix g(2, std::max(k, 1));
    for (int row = 0; row < 2; ++row)
        for (int j = 0; j < k; ++j)
            g(row, j) = pit_expect(fam, theta, [&](double v, double x) {
                return (row ? std::sin(two_pi * v) : std::cos(two_pi * v)) * score(fam, theta, x)[u[j]];
            });
    // Influence function of the unknown components: I^{-1} s for ML, psi for MM.
    Matrix info_inv(std::max(k, 1), std::max(k, 1));
    if (kind == EstimatorKind::ml && k > 0) {
        Matrix fi(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                fi(i, j) = pit_expect(fam, theta, [&](double, double x) {
                    const auto s = score(fam, theta, x);
                    return s[u[i]] * s[u[j]];
                });
        info_inv = linalg::inverse_symmetric(fi);
    }
    auto influence = [&](double x) {
        std::vector<double> r(k);
        const auto e = estimating_function(fam, kind, theta, x);
        for (int i = 0; i < k; ++i) {
            if (kind == EstimatorKind::mm) {
                r[i] = e[u[i]];
            } else {
                for (int j = 0; j < k; ++j) r[i] += info_inv(i, j) * e[u[j]];
            }
        }
        return r;
    };
    auto comp = [&](int row, double v, double x) {
        double t = row ? std::sin(two_pi * v) : std::cos(two_pi * v);
        const auto r = influence(x);
        for (int j = 0; j < k; ++j) t -= g(row, j) * r[j];
        return t;
    };
    Matrix out(2, 2);
    for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b) {
            out(a, b) = pit_expect(fam, theta, [&](double v, double x) { return comp(a, v, x) * comp(b, v, x); });
            out(b, a) = out(a, b);
        }
    return out;
}

}  // namespace oracle
