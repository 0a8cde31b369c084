#pragma once

#include <cmath>
#include <utility>

namespace trigof::detail {

// Newton iteration kept inside a sign-change bracket [lo, hi]; falls back to
// bisection whenever the Newton step leaves the bracket or stalls.
// fg(t) returns {g(t), g'(t)} with g(lo) < 0 < g(hi).
template <class F>
double bracketed_newton(F&& fg, double lo, double hi, double t, double tol, int max_iter = 200) {
    if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
    double prev_step = hi - lo;
    for (int it = 0; it < max_iter; ++it) {
        auto [g, dg] = fg(t);
        if (g == 0.0) return t;
        if (g < 0.0) lo = t; else hi = t;
        double next;
        if (dg > 0.0 && std::isfinite(dg)) {
            next = t - g / dg;
            if (!(next > lo && next < hi) || std::fabs(next - t) > 0.5 * std::fabs(prev_step)) {
                next = 0.5 * (lo + hi);
            }
        } else {
            next = 0.5 * (lo + hi);
        }
        prev_step = next - t;
        t = next;
        if (std::fabs(prev_step) <= tol * (1.0 + std::fabs(t)) || hi - lo <= tol * (1.0 + std::fabs(t))) {
            return t;
        }
    }
    return t;
}

}  // namespace trigof::detail
