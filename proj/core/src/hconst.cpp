#include "trigof/hconst.hpp"

#include "trigof/errors.hpp"
#include "trigof/quadrature.hpp"
#include "trigof/specfun.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

namespace trigof::hconst {

namespace {

using quad::Point;
using specfun::pi;

constexpr double two_pi = 2.0 * pi;

quad::Options h_options() {
    quad::Options o;
    o.abs_tol = 1e-10;
    o.rel_tol = 1e-10;
    return o;
}

void require_pos(double v, int index, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError("h" + std::to_string(index) + ": " + what + " must be finite and > 0");
    }
}

// Shared integrands of h1..h5, h17, h18, h37: the EPD kernel in v = |y|^lambda / lambda.
double epd_arg(double lambda, double v) { return pi * (1.0 + specfun::gamma_p(1.0 / lambda, v)); }

double h_epd(int index, double lambda) {
    require_pos(lambda, index, "lambda");
    const auto opt = h_options();
    const double a = 1.0 / lambda;
    switch (index) {
        case 1:
            return quad::gamma_expect([&](const Point& p) { return std::cos(epd_arg(lambda, p.v)); }, a + 1.0, 1.0, opt);
        case 2:
            return quad::gamma_expect([&](const Point& p) { return std::sin(epd_arg(lambda, p.v)); }, 1.0, 1.0, opt);
        case 3:
            return quad::gamma_expect(
                [&](const Point& p) { return std::cos(epd_arg(lambda, p.v)) * (std::log(lambda) + p.ln_v); }, a + 1.0,
                1.0, opt);
        case 4:
            return quad::gamma_expect([&](const Point& p) { return std::cos(epd_arg(lambda, p.v)); }, 3.0 * a, 1.0,
                                      opt);
        case 5:
            return quad::gamma_expect([&](const Point& p) { return std::sin(epd_arg(lambda, p.v)); }, 2.0 * a, 1.0,
                                      opt);
        case 17:
            return quad::gamma_expect(
                [&](const Point& p) {
                    return std::cos(two_pi * specfun::gamma_p(a, p.v)) * (std::log(lambda) + p.ln_v);
                },
                a + 1.0, 1.0, opt);
        case 18:
            return quad::gamma_expect(
                [&](const Point& p) {
                    return std::sin(two_pi * specfun::gamma_p(a, p.v)) * (std::log(lambda) + p.ln_v);
                },
                a + 1.0, 1.0, opt);
        case 37:
            return quad::gamma_expect([&](const Point& p) { return std::sin(epd_arg(lambda, p.v)); }, a + 1.0, 1.0,
                                      opt);
        default:
            break;
    }
    throw DomainError("h_epd: bad index");
}

double h_gamma_kernel(int index, std::span<const double> x) {
    const auto opt = h_options();
    if (index == 6 || index == 7) {
        const double a = x[0], b = x[1], c = x[2];
        require_pos(a, index, "a");
        require_pos(b, index, "b");
        require_pos(c, index, "c");
        if (index == 6) {
            return quad::gamma_expect([&](const Point& p) { return std::cos(two_pi * specfun::gamma_p(a, p.v)); }, b,
                                      c, opt);
        }
        return quad::gamma_expect([&](const Point& p) { return std::sin(two_pi * specfun::gamma_p(a, p.v)); }, b, c,
                                  opt);
    }
    const double lam = x[0];
    require_pos(lam, index, "shape");
    switch (index) {
        case 8:
            return quad::gamma_expect(
                [&](const Point& p) { return (p.v - lam) * p.ln_v * std::cos(two_pi * specfun::gamma_p(lam, p.v)); },
                lam, 1.0, opt);
        case 9:
            return quad::gamma_expect(
                [&](const Point& p) { return (p.v - lam) * p.ln_v * std::sin(two_pi * specfun::gamma_p(lam, p.v)); },
                lam, 1.0, opt);
        case 10:
            return quad::gamma_expect(
                [&](const Point& p) { return p.ln_v * std::cos(two_pi * specfun::gamma_p(lam, p.v)); }, lam, 1.0, opt);
        case 11:
            return quad::gamma_expect(
                [&](const Point& p) { return p.ln_v * std::sin(two_pi * specfun::gamma_p(lam, p.v)); }, lam, 1.0, opt);
        default:
            break;
    }
    throw DomainError("h_gamma_kernel: bad index");
}

// Student-t kernels: argument pi * (2 - I_v(lambda/2, 1/2)).
double h_student(int index, double lambda) {
    require_pos(lambda, index, "lambda");
    if (lambda < 0.2) {
        throw DomainError("h" + std::to_string(index) + ": lambda below 0.2 is outside the supported quadrature range");
    }
    if ((index == 15 || index == 16) && !(lambda > 1.0)) {
        throw DomainError("h" + std::to_string(index) + ": requires lambda > 1");
    }
    const auto opt = h_options();
    const double a = 0.5 * lambda;
    auto arg = [a](double v) { return pi * (2.0 - specfun::reg_beta_cdf(a, 0.5, v)); };
    switch (index) {
        case 12:
            return quad::beta_expect([&](const Point& p) { return std::cos(arg(p.v)); }, a, 1.5, opt);
        case 13:
            return quad::beta_expect([&](const Point& p) { return std::sin(arg(p.v)); }, 0.5 * (lambda + 1.0), 1.0, opt);
        case 14:
            return quad::beta_expect(
                [&](const Point& p) {
                    return std::cos(arg(p.v)) * (p.ln_v + (lambda + 1.0) / lambda * (1.0 - p.v));
                },
                a, 0.5, opt);
        case 15:
            return quad::beta_expect([&](const Point& p) { return std::cos(arg(p.v)); }, 0.5 * (lambda - 1.0), 1.0, opt);
        case 16:
            return quad::beta_expect([&](const Point& p) { return std::sin(arg(p.v)); }, 0.5 * (lambda - 1.0), 1.0, opt);
        default:
            break;
    }
    throw DomainError("h_student: bad index");
}

// Gompertz kernels over (1, inf).
double h_gompertz(int index, double rho) {
    require_pos(rho, index, "rho");
    const auto opt = h_options();
    auto trig_arg = [rho](double v) { return two_pi * (-std::expm1(-rho * (v - 1.0))); };
    quad::Function f;
    switch (index) {
        case 19:
            f = [rho](double v) {
                const double l = std::log(v);
                return l * l * v * std::exp(-rho * v);
            };
            break;
        case 20:
            f = [rho](double v) { return std::log(v) * v * std::exp(-rho * v); };
            break;
        case 21:
            f = [&](double v) { return std::cos(trig_arg(v)) * std::log(v) * (1.0 - rho * v) * std::exp(-rho * v); };
            break;
        case 22:
            f = [&](double v) { return std::sin(trig_arg(v)) * std::log(v) * (1.0 - rho * v) * std::exp(-rho * v); };
            break;
        case 23:
            f = [&](double v) { return std::cos(trig_arg(v)) * v * std::exp(-rho * v); };
            break;
        case 24:
            f = [&](double v) { return std::sin(trig_arg(v)) * v * std::exp(-rho * v); };
            break;
        default:
            throw DomainError("h_gompertz: bad index");
    }
    // Split at the bulk of e^{-rho v} so the mapped rule sees the decay scale.
    const double knot = 1.0 + 40.0 / rho;
    quad::Options part = opt;
    part.abs_tol = 0.5 * opt.abs_tol;
    return quad::integrate_interval(f, 1.0, knot, part).value + quad::integrate_from(f, knot, part).value;
}

double h_beta_kernel(int index, double al, double be) {
    require_pos(al, index, "alpha");
    require_pos(be, index, "beta");
    const auto opt = h_options();
    auto ang = [=](double v) { return two_pi * specfun::reg_beta_cdf(al, be, v); };
    switch (index) {
        case 25:
            return quad::beta_expect([&](const Point& p) { return p.ln_v * std::cos(ang(p.v)); }, al, be, opt);
        case 26:
            return quad::beta_expect([&](const Point& p) { return p.ln_v * std::sin(ang(p.v)); }, al, be, opt);
        case 27:
            return quad::beta_expect([&](const Point& p) { return p.ln_1mv * std::cos(ang(p.v)); }, al, be, opt);
        case 28:
            return quad::beta_expect([&](const Point& p) { return p.ln_1mv * std::sin(ang(p.v)); }, al, be, opt);
        default:
            break;
    }
    throw DomainError("h_beta_kernel: bad index");
}

double ig_pdf(double v, double mu, double lam) { return specfun::inverse_gaussian_pdf(v, mu, lam); }

double ig_cdf(double v, double mu, double lam) { return specfun::inverse_gaussian_cdf(v, mu, lam); }

double h_ig(int index, double mu, double lam) {
    require_pos(mu, index, "mu");
    require_pos(lam, index, "lambda");
    const auto opt = h_options();
    std::function<double(double)> w;
    switch (index) {
        case 29:
            w = [&](double v) { return v * std::cos(two_pi * ig_cdf(v, mu, lam)); };
            break;
        case 30:
            w = [&](double v) { return v * std::sin(two_pi * ig_cdf(v, mu, lam)); };
            break;
        case 31:
            w = [&](double v) { return (v * v + mu * mu) / v * std::cos(two_pi * ig_cdf(v, mu, lam)); };
            break;
        case 32:
            w = [&](double v) { return (v * v + mu * mu) / v * std::sin(two_pi * ig_cdf(v, mu, lam)); };
            break;
        default:
            throw DomainError("h_ig: bad index");
    }
    auto f = [&](double v) {
        const double d = ig_pdf(v, mu, lam);
        return d == 0.0 ? 0.0 : w(v) * d;
    };
    const double sd = std::sqrt(mu * mu * mu / lam);
    const double hi = mu + 40.0 * sd;
    quad::Options part = opt;
    part.abs_tol = 0.25 * opt.abs_tol;
    // Mode of the density and a few scales around it.
    const double mode = mu * (std::sqrt(1.0 + 9.0 * mu * mu / (4.0 * lam * lam)) - 1.5 * mu / lam);
    const double k1 = std::max(mode * 0.25, 1e-300);
    const double k2 = std::min(mode + 10.0 * sd, hi);
    double total = quad::integrate_interval(f, 0.0, k1, part).value;
    total += quad::integrate_interval(f, k1, k2, part).value;
    if (hi > k2) total += quad::integrate_interval(f, k2, hi, part).value;
    total += quad::integrate_from(f, hi, part).value;
    return total;
}

// Kumaraswamy kernels on (0, 1); behaviour near 1 is (1 - v)^(beta - 1).
double h_kumaraswamy(int index, double be) {
    require_pos(be, index, "beta");
    const auto opt = h_options();
    auto ang = [be](const Point& p) { return two_pi * (-std::expm1(be * p.ln_1mv)); };
    switch (index) {
        case 33:
        case 34:
            return quad::integrate_unit_powers(
                [&](const Point& p) {
                    const double t = index == 33 ? std::cos(ang(p)) : std::sin(ang(p));
                    // ln(v) (1-v)^(beta-2) (1 - beta v) divided by (1-v)^(beta-1) when beta < 1.
                    const double lead = be < 1.0 ? p.ln_v / (1.0 - p.v) : p.ln_v * std::exp((be - 2.0) * p.ln_1mv);
                    const double val = t * lead * (1.0 - be * p.v);
                    return std::isfinite(val) ? val : 0.0;
                },
                1.0, std::min(be, 1.0), opt);
        case 35:
        case 36:
            return quad::integrate_unit_powers(
                [&](const Point& p) {
                    const double t = index == 35 ? std::cos(ang(p)) : std::sin(ang(p));
                    const double lead = be < 1.0 ? p.ln_1mv : p.ln_1mv * std::exp((be - 1.0) * p.ln_1mv);
                    return t * lead;
                },
                1.0, std::min(be, 1.0), opt);
        default:
            break;
    }
    throw DomainError("h_kumaraswamy: bad index");
}

std::string cache_key(int index, std::span<const double> args) {
    std::string key = std::to_string(index);
    char buf[40];
    for (double a : args) {
        std::snprintf(buf, sizeof buf, ":%.14e", a);
        key += buf;
    }
    return key;
}

std::shared_mutex cache_mutex;
std::map<std::string, double>& cache() {
    static std::map<std::string, double> c;
    return c;
}

}  // namespace

int arity(int index) {
    if (index < 1 || index > 37) throw DomainError("h index must lie in 1..37, got " + std::to_string(index));
    if (index == 6 || index == 7) return 3;
    if ((index >= 25 && index <= 32)) return 2;
    return 1;
}

double h_uncached(int index, std::span<const double> args) {
    const int k = arity(index);
    if (static_cast<int>(args.size()) != k) {
        throw DomainError("h" + std::to_string(index) + " takes " + std::to_string(k) + " argument(s), got " +
                          std::to_string(args.size()));
    }
    switch (index) {
        case 1:
        case 2:
        case 3:
        case 4:
        case 5:
        case 17:
        case 18:
        case 37:
            return h_epd(index, args[0]);
        case 6:
        case 7:
        case 8:
        case 9:
        case 10:
        case 11:
            return h_gamma_kernel(index, args);
        case 12:
        case 13:
        case 14:
        case 15:
        case 16:
            return h_student(index, args[0]);
        case 19:
        case 20:
        case 21:
        case 22:
        case 23:
        case 24:
            return h_gompertz(index, args[0]);
        case 25:
        case 26:
        case 27:
        case 28:
            return h_beta_kernel(index, args[0], args[1]);
        case 29:
        case 30:
        case 31:
        case 32:
            return h_ig(index, args[0], args[1]);
        case 33:
        case 34:
        case 35:
        case 36:
            return h_kumaraswamy(index, args[0]);
        default:
            break;
    }
    throw DomainError("unknown h index");
}

double h(int index, std::span<const double> args) {
    arity(index);
    const std::string key = cache_key(index, args);
    {
        std::shared_lock lock(cache_mutex);
        auto it = cache().find(key);
        if (it != cache().end()) return it->second;
    }
    // Round the arguments the same way the key does, so equal keys give equal values.
    std::vector<double> rounded(args.begin(), args.end());
    for (double& a : rounded) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.14e", a);
        a = std::strtod(buf, nullptr);
    }
    const double value = h_uncached(index, rounded);
    std::unique_lock lock(cache_mutex);
    auto [it, inserted] = cache().emplace(key, value);
    return it->second;
}

double h(int index, std::initializer_list<double> args) {
    return h(index, std::span<const double>(args.begin(), args.size()));
}

void clear_cache() {
    std::unique_lock lock(cache_mutex);
    cache().clear();
}

std::size_t cache_size() {
    std::shared_lock lock(cache_mutex);
    return cache().size();
}

LogisticConstants logistic_constants() {
    quad::Options opt;
    opt.abs_tol = 1e-14;
    opt.rel_tol = 1e-13;
    // With U uniform on (0, 1), Y = ln(U / (1 - U)) is standard logistic.
    auto logit = [](double u) { return std::log(u) - std::log1p(-u); };
    const double c_cos = quad::integrate_interval(
                             [&](double u) { return std::cos(two_pi * u) * (logit(u) * (2.0 * u - 1.0) - 1.0); }, 0.0,
                             1.0, opt)
                             .value;
    const double c_sin =
        quad::integrate_interval([&](double u) { return std::sin(two_pi * u) * (2.0 * u - 1.0); }, 0.0, 1.0, opt).value;
    const double e_cos_y2 =
        quad::integrate_interval([&](double u) { const double y = logit(u); return std::cos(two_pi * u) * y * y; }, 0.0,
                                 1.0, opt)
            .value;
    const double e_sin_y =
        quad::integrate_interval([&](double u) { return std::sin(two_pi * u) * logit(u); }, 0.0, 1.0, opt).value;
    // Moment estimator: psi_mu = sigma Y, psi_sigma = (sigma / 2)(3 Y^2 / pi^2 - 1),
    // R = diag(3 / pi^2, 5 / 4) / sigma^2, J = E[tau psi^T] R.
    const double m_cos = 15.0 / (8.0 * pi * pi) * e_cos_y2;
    const double m_sin = 3.0 / (pi * pi) * e_sin_y;
    return {c_cos, c_sin, m_cos, m_sin};
}

}  // namespace trigof::hconst
