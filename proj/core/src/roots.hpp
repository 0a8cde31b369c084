#pragma once

#include "trigof/errors.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace trigof::detail {

// Bracket around a sign change of g from + (left) to - (right), found by
// geometric expansion from t0 inside [lim_lo, lim_hi] (both > 0). `capped`
// is -1 or +1 when g kept its sign up to the corresponding limit.
struct DownBracket {
    double lo;
    double hi;
    double glo;
    double ghi;
    int capped;
};

inline void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw EstimationError(std::string(what) + ": estimating equation is not finite", v);
}

template <class G>
DownBracket bracket_down(G&& g, double t0, double lim_lo, double lim_hi, int& evals, double factor = 2.0) {
    double t = std::clamp(t0, lim_lo, lim_hi);
    double gt = g(t);
    ++evals;
    require_finite(gt, "bracket search");
    if (gt == 0.0) return {t, t, 0.0, 0.0, 0};
    if (gt > 0.0) {
        while (true) {
            if (t >= lim_hi) return {lim_hi, lim_hi, gt, gt, +1};
            const double nt = std::min(t * factor, lim_hi);
            const double gn = g(nt);
            ++evals;
            require_finite(gn, "bracket search");
            if (gn <= 0.0) return {t, nt, gt, gn, 0};
            t = nt;
            gt = gn;
        }
    }
    while (true) {
        if (t <= lim_lo) return {lim_lo, lim_lo, gt, gt, -1};
        const double nt = std::max(t / factor, lim_lo);
        const double gn = g(nt);
        ++evals;
        require_finite(gn, "bracket search");
        if (gn >= 0.0) return {nt, t, gn, gt, 0};
        t = nt;
        gt = gn;
    }
}

// Root of f on [a, b] given f(a), f(b) of opposite sign (TOMS 748).
template <class F>
double toms748_root(F&& f, double a, double b, double fa, double fb, int& evals, int bits = 50) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (a == b) return a;
    std::uintmax_t it = 300;
    auto r = boost::math::tools::toms748_solve(
        [&](double t) {
            const double v = f(t);
            require_finite(v, "root search");
            return v;
        },
        a, b, fa, fb, boost::math::tools::eps_tolerance<double>(bits), it);
    evals += static_cast<int>(it);
    return 0.5 * (r.first + r.second);
}

}  // namespace trigof::detail
