#include "trigof/quadrature.hpp"

#include "trigof/errors.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace trigof::quad {

namespace {

constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double a, b, value, error;
    int depth;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk15(const Function& f, double a, double b, int depth) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = fc * wgk[7];
    double resg = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        resk += wgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
    }
    const double value = resk * h;
    double err = std::fabs((resk - resg) * h);
    if (!std::isfinite(value) || !std::isfinite(err)) {
        throw QuadratureError("integrand is not finite on [" + std::to_string(a) + ", " + std::to_string(b) + "]",
                              value, err);
    }
    return {a, b, value, err, depth};
}

}  // namespace

Result integrate_interval(const Function& f, double a, double b, const Options& opt) {
    if (!(opt.abs_tol > 0.0) || !(opt.rel_tol > 0.0)) throw DomainError("integrate: tolerances must be positive");
    if (a == b) return {0.0, 0.0, 0};
    if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integrate_interval: endpoints must be finite");

    std::priority_queue<Piece> heap;
    std::vector<Piece> frozen;  // pieces at maximum depth
    Piece first = gk15(f, a, b, 0);
    heap.push(first);
    double total = first.value;
    double total_err = first.error;
    int count = 1;

    while (true) {
        const double tol = std::max(opt.abs_tol, opt.rel_tol * std::fabs(total));
        if (total_err <= tol) break;
        if (heap.empty() || count >= opt.max_intervals) {
            throw QuadratureError("adaptive quadrature did not reach the requested tolerance", total, total_err);
        }
        Piece worst = heap.top();
        heap.pop();
        if (worst.depth >= opt.max_depth) {
            frozen.push_back(worst);
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        Piece left = gk15(f, worst.a, mid, worst.depth + 1);
        Piece right = gk15(f, mid, worst.b, worst.depth + 1);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // Re-sum to avoid drift from incremental updates.
    double value = 0.0, error = 0.0;
    std::vector<Piece> all(frozen);
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
    for (const auto& p : all) {
        value += p.value;
        error += p.error;
    }
    return {value, error, count};
}

Result integrate(const Function& f, Domain domain, const Options& opt) {
    switch (domain) {
        case Domain::unit:
            return integrate_interval(f, 0.0, 1.0, opt);
        case Domain::positive:
            return integrate_interval(
                [&f](double t) {
                    const double s = 1.0 - t;
                    const double v = t / s;
                    if (!std::isfinite(v)) return 0.0;
                    const double fv = f(v);
                    return fv == 0.0 ? 0.0 : fv / (s * s);
                },
                0.0, 1.0, opt);
        case Domain::above_one:
            return integrate_interval(
                [&f](double t) {
                    const double s = 1.0 - t;
                    const double v = 1.0 + t / s;
                    if (!std::isfinite(v)) return 0.0;
                    const double fv = f(v);
                    return fv == 0.0 ? 0.0 : fv / (s * s);
                },
                0.0, 1.0, opt);
    }
    throw DomainError("integrate: unknown domain");
}

double integrate(const Function& f, Domain domain, double abs_tol, double rel_tol) {
    Options opt;
    opt.abs_tol = abs_tol;
    opt.rel_tol = rel_tol;
    return integrate(f, domain, opt).value;
}

Result integrate_real(const Function& f, double split, const Options& opt) {
    Options half = opt;
    half.abs_tol = 0.5 * opt.abs_tol;
    const Result up = integrate([&](double v) { return f(split + v); }, Domain::positive, half);
    const Result down = integrate([&](double v) { return f(split - v); }, Domain::positive, half);
    return {up.value + down.value, up.error + down.error, up.intervals + down.intervals};
}

Result integrate_from(const Function& f, double c, const Options& opt) {
    return integrate_interval(
        [&f, c](double t) {
            const double s = 1.0 - t;
            const double v = c + t / s;
            if (!std::isfinite(v)) return 0.0;
            const double fv = f(v);
            return fv == 0.0 ? 0.0 : fv / (s * s);
        },
        0.0, 1.0, opt);
}

double integrate_unit_powers(const PointFunction& regular, double p0, double p1, const Options& opt) {
    if (!(p0 > 0.0) || !(p1 > 0.0)) throw DomainError("integrate_unit_powers: exponents must be positive");
    Options half = opt;
    half.abs_tol = 0.5 * opt.abs_tol;
    double left, right;
    if (p0 < 1.0) {
        const double wmax = std::pow(0.5, p0);
        left = integrate_interval(
                   [&](double w) {
                       const double lv = std::log(w) / p0;
                       const double v = std::exp(lv);
                       const double l1 = std::log1p(-v);
                       return regular({v, lv, l1}) * std::exp((p1 - 1.0) * l1) / p0;
                   },
                   0.0, wmax, half)
                   .value;
    } else {
        left = integrate_interval(
                   [&](double v) {
                       const double lv = std::log(v);
                       const double l1 = std::log1p(-v);
                       return regular({v, lv, l1}) * std::exp((p0 - 1.0) * lv + (p1 - 1.0) * l1);
                   },
                   0.0, 0.5, half)
                   .value;
    }
    if (p1 < 1.0) {
        const double zmax = std::pow(0.5, p1);
        right = integrate_interval(
                    [&](double z) {
                        const double l1 = std::log(z) / p1;
                        const double omv = std::exp(l1);
                        const double lv = std::log1p(-omv);
                        return regular({1.0 - omv, lv, l1}) * std::exp((p0 - 1.0) * lv) / p1;
                    },
                    0.0, zmax, half)
                    .value;
    } else {
        right = integrate_interval(
                    [&](double v) {
                        const double lv = std::log(v);
                        const double l1 = std::log1p(-v);
                        return regular({v, lv, l1}) * std::exp((p0 - 1.0) * lv + (p1 - 1.0) * l1);
                    },
                    0.5, 1.0, half)
                    .value;
    }
    return left + right;
}

double beta_expect(const PointFunction& g, double a, double b, const Options& opt) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta_expect: shapes must be positive");
    const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double inv_beta = std::exp(-lbeta);
    return integrate_unit_powers([&](const Point& p) { return g(p) * inv_beta; }, a, b, opt);
}

double gamma_expect(const PointFunction& g, double shape, double scale, const Options& opt) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw DomainError("gamma_expect: shape and scale must be positive");
    const double lscale = std::log(scale);
    Options part = opt;
    part.abs_tol = opt.abs_tol / 3.0;
    if (shape < 1.0) {
        const double lg1 = std::lgamma(shape + 1.0);
        auto integrand = [&](double w) {
            const double lu = std::log(w) / shape;
            const double u = std::exp(lu);
            const double dens = std::exp(-u - lg1);
            if (dens == 0.0) return 0.0;
            return g({scale * u, lscale + lu, 0.0}) * dens;
        };
        return integrate_interval(integrand, 0.0, 1.0, part).value + integrate_from(integrand, 1.0, part).value;
    }
    const double lg = std::lgamma(shape);
    auto integrand = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double lu = std::log(u);
        const double dens = std::exp((shape - 1.0) * lu - u - lg);
        if (dens == 0.0) return 0.0;
        return g({scale * u, lscale + lu, 0.0}) * dens;
    };
    const double mode = shape - 1.0;
    const double sd = std::sqrt(shape);
    const double lo = std::max(0.0, mode - 12.0 * sd);
    const double hi = mode + 12.0 * sd;
    double total = 0.0;
    if (lo > 0.0) total += integrate_interval(integrand, 0.0, lo, part).value;
    total += integrate_interval(integrand, lo, hi, part).value;
    total += integrate_from(integrand, hi, part).value;
    return total;
}

}  // namespace trigof::quad
