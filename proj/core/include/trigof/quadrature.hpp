#pragma once

#include <functional>

namespace trigof::quad {

// Integration domains; the infinite ones are mapped onto (0, 1) by
// v = t / (1 - t) and v = 1 + t / (1 - t) respectively.
enum class Domain { unit, positive, above_one };

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_depth = 60;
    int max_intervals = 20000;
};

struct Result {
    double value;
    double error;
    int intervals;
};

using Function = std::function<double(double)>;

// Adaptive Gauss-Kronrod (G7/K15) with bisection on a finite interval.
// Throws QuadratureError when the requested bound is not met.
Result integrate_interval(const Function& f, double a, double b, const Options& opt = {});

Result integrate(const Function& f, Domain domain, const Options& opt = {});

double integrate(const Function& f, Domain domain, double abs_tol, double rel_tol);

// Whole real line, split at `split` and mapped on both halves.
Result integrate_real(const Function& f, double split = 0.0, const Options& opt = {});

// Integral over (c, inf) through v = c + t / (1 - t).
Result integrate_from(const Function& f, double c, const Options& opt = {});

// Log-aware argument for expectation integrands: ln_v and ln_1mv stay finite
// where v itself underflows to 0 or rounds to 1.
struct Point {
    double v;
    double ln_v;
    double ln_1mv;  // ln(1 - v); only meaningful on (0, 1)
};

using PointFunction = std::function<double(const Point&)>;

// E[g(V)] for V ~ gamma(shape, scale). Shapes below one are handled by the
// substitution v = scale * w^(1/shape), which removes the endpoint
// singularity; larger shapes are split around the mode.
double gamma_expect(const PointFunction& g, double shape, double scale, const Options& opt = {});

// E[g(V)] for V ~ beta(a, b), with power substitutions at both endpoints.
double beta_expect(const PointFunction& g, double a, double b, const Options& opt = {});

// Integral of g over (0, 1) where g(v) behaves like v^(p0-1) near 0 and
// (1-v)^(p1-1) near 1. `regular` receives the point and must return
// g(v) * v^(1-p0) * (1-v)^(1-p1) (the bounded part).
double integrate_unit_powers(const PointFunction& regular, double p0, double p1, const Options& opt = {});

}  // namespace trigof::quad
