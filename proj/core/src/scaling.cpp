#include "trigof/scaling.hpp"

#include "trigof/errors.hpp"
#include "trigof/hconst.hpp"
#include "trigof/specfun.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace trigof {

namespace {

using enum FamilyId;
using linalg::Matrix;
using hconst::h;
using specfun::digamma;
using specfun::euler_gamma;
using specfun::ln_gamma;
using specfun::pi;
using specfun::trigamma;

const hconst::LogisticConstants& logistic_k() {
    static const hconst::LogisticConstants k = hconst::logistic_constants();
    return k;
}

// Keep columns `cols` of a 2 x p matrix or the rows/columns of a p x p one.
Matrix cols_of(const Matrix& a, const std::vector<int>& cols) {
    std::vector<int> rows(a.rows());
    for (int i = 0; i < a.rows(); ++i) rows[i] = i;
    return linalg::select(a, rows, cols);
}

MatrixSet make(FamilyId fam, EstimatorKind kind, Matrix g, Matrix r) {
    MatrixSet ms{fam, kind, g, r, g, {}};
    return ms;
}

// ---------------------------------------------------------------- EPD block

MatrixSet epd_ml(double lam, double sig) {
    const double h1 = h(1, {lam});
    const double h2 = h(2, {lam});
    const double h3 = h(3, {lam});
    const double c1 = digamma(1.0 / lam + 1.0) + std::log(lam);
    // lambda^{1/lambda - 1} Gamma(1/lambda)
    const double k2 = std::exp((1.0 / lam - 1.0) * std::log(lam) + ln_gamma(1.0 / lam));
    Matrix g(2, 3, {(h1 - h3) / (lam * lam), 0.0, h1 / sig, 0.0, h2 / (sig * k2), 0.0});
    const double r11 = ((1.0 / lam + 1.0) * trigamma(1.0 / lam + 1.0) + c1 * c1 - 1.0) / (lam * lam * lam);
    // lambda^{2 - 2/lambda} Gamma(2 - 1/lambda) / Gamma(1/lambda); infinite for lambda <= 1/2.
    double r22 = std::numeric_limits<double>::infinity();
    if (lam > 0.5) {
        r22 = std::exp((2.0 - 2.0 / lam) * std::log(lam) + ln_gamma(2.0 - 1.0 / lam) - ln_gamma(1.0 / lam)) /
              (sig * sig);
    }
    const double r13 = -c1 / (sig * lam);
    Matrix r(3, 3, {r11, 0.0, r13, 0.0, r22, 0.0, r13, 0.0, lam / (sig * sig)});
    return make(epd, EstimatorKind::ml, g, r);
}

MatrixSet epd_mm(double lam, double sig) {
    MatrixSet ms = epd_ml(lam, sig);
    ms.kind = EstimatorKind::mm;
    const double h4 = h(4, {lam});
    const double h5 = h(5, {lam});
    const double c2 = std::exp(ln_gamma(1.0 / lam) - (2.0 / lam) * std::log(lam) - ln_gamma(3.0 / lam));
    const double c3 = 1.0 / std::expm1(ln_gamma(1.0 / lam) + ln_gamma(5.0 / lam) - 2.0 * ln_gamma(3.0 / lam));
    const double j21 = h5 * std::exp(ln_gamma(2.0 / lam) - std::log(lam) / lam - ln_gamma(3.0 / lam)) / sig;
    ms.J = Matrix(2, 3, {0.0, 0.0, 2.0 * c3 * h4 / sig, 0.0, j21, 0.0});
    ms.R = Matrix(3, 3, {1.0, 0.0, 0.0, 0.0, c2 / (sig * sig), 0.0, 0.0, 0.0, 4.0 * c3 / (sig * sig)});
    ms.required_known = {0};
    return ms;
}

// Two-parameter (mu, sigma) slice of the EPD set at a fixed lambda.
MatrixSet epd_slice(FamilyId fam, EstimatorKind kind, double lam, double sig) {
    const MatrixSet full = kind == EstimatorKind::ml ? epd_ml(lam, sig) : epd_mm(lam, sig);
    const std::vector<int> keep{1, 2};
    MatrixSet ms{fam, kind, cols_of(full.G, keep), linalg::select(full.R, keep, keep), cols_of(full.J, keep), {}};
    return ms;
}

// ---------------------------------------------------------------- Student-t

MatrixSet student_ml(double lam, double sig) {
    const double h12 = h(12, {lam});
    const double h13 = h(13, {lam});
    const double h14 = h(14, {lam});
    const double c1 = std::exp(ln_gamma(0.5 * (lam + 1.0)) - ln_gamma(0.5 * lam)) / std::sqrt(lam * pi);
    Matrix g(2, 3, {0.5 * h14, 0.0, h12 / sig, 0.0, 2.0 * c1 * h13 / sig, 0.0});
    const double r11 = 0.25 * (trigamma(0.5 * lam) - trigamma(0.5 * (lam + 1.0)) -
                               2.0 * (lam + 5.0) / (lam * (lam + 1.0) * (lam + 3.0)));
    const double r13 = -2.0 / (sig * (lam + 1.0) * (lam + 3.0));
    Matrix r(3, 3,
             {r11, 0.0, r13, 0.0, (lam + 1.0) / (sig * sig * (lam + 3.0)), 0.0, r13, 0.0,
              2.0 * lam / (sig * sig * (lam + 3.0))});
    return make(student_t, EstimatorKind::ml, g, r);
}

MatrixSet student_mm(double lam, double sig) {
    if (!(lam > 2.0)) throw DomainError("student-t: MM matrices require lambda > 2");
    MatrixSet ms = student_ml(lam, sig);
    ms.kind = EstimatorKind::mm;
    const double h15 = h(15, {lam});
    const double h16 = h(16, {lam});
    const double c2 = std::sqrt(lam) * std::exp(ln_gamma(0.5 * (lam - 1.0)) - ln_gamma(0.5 * lam)) / std::sqrt(pi);
    const double c3 = c2 / (lam / (lam - 2.0) - c2 * c2);
    ms.J = Matrix(2, 3, {0.0, 0.0, c2 * c3 * h15 / sig, 0.0, c2 * (lam - 2.0) / lam * h16 / sig, 0.0});
    ms.R = Matrix(3, 3, {1.0, 0.0, 0.0, 0.0, (lam - 2.0) / (lam * sig * sig), 0.0, 0.0, 0.0, c2 * c3 / (sig * sig)});
    ms.required_known = {0};
    return ms;
}

// ---------------------------------------------------------------- half-EPD

MatrixSet half_epd_ml(double lam, double sig) {
    const double a = 1.0 / lam;
    const double h6 = h(6, {a, a + 1.0, 1.0});
    const double h7 = h(7, {a, a + 1.0, 1.0});
    const double h17 = h(17, {lam});
    const double h18 = h(18, {lam});
    const double c1 = digamma(a + 1.0) + std::log(lam);
    Matrix g(2, 2, {(h6 - h17) / (lam * lam), h6 / sig, (h7 - h18) / (lam * lam), h7 / sig});
    const double r11 = ((a + 1.0) * trigamma(a + 1.0) + c1 * c1 - 1.0) / (lam * lam * lam);
    const double r12 = -c1 / (sig * lam);
    Matrix r(2, 2, {r11, r12, r12, lam / (sig * sig)});
    return make(half_epd, EstimatorKind::ml, g, r);
}

MatrixSet half_epd_mm(double lam, double sig) {
    MatrixSet ms = half_epd_ml(lam, sig);
    ms.kind = EstimatorKind::mm;
    const double a = 1.0 / lam;
    const double c3 = 1.0 / std::expm1(ln_gamma(a) + ln_gamma(3.0 * a) - 2.0 * ln_gamma(2.0 * a));
    ms.J = Matrix(2, 2, {0.0, c3 * h(6, {a, 2.0 * a, 1.0}) / sig, 0.0, c3 * h(7, {a, 2.0 * a, 1.0}) / sig});
    ms.R = Matrix(2, 2, {1.0, 0.0, 0.0, c3 / (sig * sig)});
    ms.required_known = {0};
    return ms;
}

// ---------------------------------------------------------------- Kumaraswamy

double kuma_r11_unit(double b) {
    const double t = digamma(b) + euler_gamma - 1.0;
    return 1.0 + b / (b - 2.0) * (t * t - trigamma(b) + pi * pi / 6.0 - 1.0);
}

double kuma_r12_unit(double b) { return (digamma(b) + euler_gamma - 1.0 + 1.0 / b) / (1.0 - b); }

// f near a removable singularity at c: linear interpolation from c +- d.
template <class F>
double removable(F f, double b, double c) {
    constexpr double d = 1e-5;
    if (std::fabs(b - c) >= d) return f(b);
    const double lo = f(c - d);
    const double hi = f(c + d);
    return lo + (hi - lo) * (b - (c - d)) / (2.0 * d);
}

}  // namespace

bool supports(FamilyId fam, EstimatorKind kind) { return has_estimator(fam, kind); }

MatrixSet matrices(FamilyId fam, EstimatorKind kind, const ParamVector& t) {
    validate(fam, t);
    if (!supports(fam, kind)) {
        throw ConfigError(std::string(family_name(fam)) + " has no " + to_string(kind) + " estimator");
    }
    const bool ml = kind == EstimatorKind::ml;
    const double g1 = euler_gamma - 1.0;
    const double gumbel_var = g1 * g1 + pi * pi / 6.0;
    switch (fam) {
        case epd:
        case log_epd: {
            MatrixSet ms = ml ? epd_ml(t[0], t[2]) : epd_mm(t[0], t[2]);
            ms.family = fam;
            return ms;
        }
        case laplace:
        case log_laplace:
        case normal:
        case log_normal: {
            const bool lap = fam == laplace || fam == log_laplace;
            const double sig = t[1];
            // Normal MM coincides with ML.
            const EstimatorKind k = (!lap || ml) ? EstimatorKind::ml : EstimatorKind::mm;
            MatrixSet ms = epd_slice(fam, k, lap ? 1.0 : 2.0, sig);
            ms.kind = kind;
            if (k == EstimatorKind::ml) {
                ms.R = lap ? Matrix(2, 2, {1.0 / (sig * sig), 0.0, 0.0, 1.0 / (sig * sig)})
                           : Matrix(2, 2, {1.0 / (sig * sig), 0.0, 0.0, 2.0 / (sig * sig)});
                ms.J = ms.G;
            }
            return ms;
        }
        case exp_gamma: {
            const double lam = t[0];
            const double sig = t[2];
            const double h6 = h(6, {lam, lam + 1.0, 1.0});
            const double h7 = h(7, {lam, lam + 1.0, 1.0});
            const double ps = digamma(lam);
            Matrix g(2, 3,
                     {h(10, {lam}), lam * h6 / sig, h(8, {lam}) / sig, h(11, {lam}), lam * h7 / sig, h(9, {lam}) / sig});
            const double s2 = sig * sig;
            Matrix r(3, 3,
                     {trigamma(lam), 1.0 / sig, ps / sig, 1.0 / sig, lam / s2, (lam * ps + 1.0) / s2, ps / sig,
                      (lam * ps + 1.0) / s2, (lam * ps * ps + 2.0 * ps + lam * trigamma(lam) + 1.0) / s2});
            return make(fam, kind, g, r);
        }
        case exp_weibull:
        case gumbel: {
            const double sig = t[1];
            const double h6 = h(6, {1.0, 2.0, 1.0});
            const double h7 = h(7, {1.0, 2.0, 1.0});
            const double h8 = h(8, {1.0});
            const double h9 = h(9, {1.0});
            const double s2 = sig * sig;
            if (fam == exp_weibull) {
                return make(fam, kind, Matrix(2, 2, {h6 / sig, h8 / sig, h7 / sig, h9 / sig}),
                            Matrix(2, 2, {1.0 / s2, -g1 / s2, -g1 / s2, gumbel_var / s2}));
            }
            return make(fam, kind, Matrix(2, 2, {-h6 / sig, h8 / sig, h7 / sig, -h9 / sig}),
                        Matrix(2, 2, {1.0 / s2, g1 / s2, g1 / s2, gumbel_var / s2}));
        }
        case logistic:
        case log_logistic: {
            const auto& k = logistic_k();
            if (fam == logistic) {
                const double sig = t[1];
                const double s2 = sig * sig;
                Matrix g(2, 2, {0.0, k.c_cos / sig, k.c_sin / sig, 0.0});
                if (ml) return make(fam, kind, g, Matrix(2, 2, {1.0 / (3.0 * s2), 0.0, 0.0, (3.0 + pi * pi) / (9.0 * s2)}));
                MatrixSet ms = make(fam, kind, g, Matrix(2, 2, {3.0 / (pi * pi * s2), 0.0, 0.0, 1.25 / s2}));
                ms.J = Matrix(2, 2, {0.0, k.m_cos / sig, k.m_sin / sig, 0.0});
                return ms;
            }
            const double b = t[0];
            const double rho = t[1];
            Matrix g(2, 2, {0.0, -k.c_cos / rho, rho * k.c_sin / b, 0.0});
            if (ml) {
                return make(fam, kind, g,
                            Matrix(2, 2, {rho * rho / (3.0 * b * b), 0.0, 0.0, (3.0 + pi * pi) / (9.0 * rho * rho)}));
            }
            MatrixSet ms =
                make(fam, kind, g, Matrix(2, 2, {3.0 * rho * rho / (b * b * pi * pi), 0.0, 0.0, 1.25 / (rho * rho)}));
            ms.J = Matrix(2, 2, {0.0, -k.m_cos / rho, rho * k.m_sin / b, 0.0});
            return ms;
        }
        case student_t:
            return ml ? student_ml(t[0], t[2]) : student_mm(t[0], t[2]);
        case half_epd:
            return ml ? half_epd_ml(t[0], t[1]) : half_epd_mm(t[0], t[1]);
        case gg: {
            const double lam = t[0];
            const double b = t[1];
            const double rho = t[2];
            const double h6 = h(6, {lam, lam + 1.0, 1.0});
            const double h7 = h(7, {lam, lam + 1.0, 1.0});
            const double ps = digamma(lam);
            Matrix g(2, 3,
                     {h(10, {lam}), rho * lam * h6 / b, -h(8, {lam}) / rho, h(11, {lam}), rho * lam * h7 / b,
                      -h(9, {lam}) / rho});
            const double r13 = -ps / rho;
            const double r23 = -(lam * ps + 1.0) / b;
            Matrix r(3, 3,
                     {trigamma(lam), rho / b, r13, rho / b, rho * rho * lam / (b * b), r23, r13, r23,
                      (lam * ps * ps + 2.0 * ps + lam * trigamma(lam) + 1.0) / (rho * rho)});
            return make(fam, kind, g, r);
        }
        case weibull:
        case frechet: {
            const double b = t[0];
            const double rho = t[1];
            const double h6 = h(6, {1.0, 2.0, 1.0});
            const double h7 = h(7, {1.0, 2.0, 1.0});
            const double h8 = h(8, {1.0});
            const double h9 = h(9, {1.0});
            const double r22 = gumbel_var / (rho * rho);
            if (fam == weibull) {
                return make(fam, kind, Matrix(2, 2, {rho * h6 / b, -h8 / rho, rho * h7 / b, -h9 / rho}),
                            Matrix(2, 2, {rho * rho / (b * b), g1 / b, g1 / b, r22}));
            }
            return make(fam, kind, Matrix(2, 2, {-rho * h6 / b, -h8 / rho, rho * h7 / b, h9 / rho}),
                        Matrix(2, 2, {rho * rho / (b * b), -g1 / b, -g1 / b, r22}));
        }
        case gompertz: {
            const double b = t[0];
            const double rho = t[1];
            const double re = rho * std::exp(rho);
            Matrix g(2, 2,
                     {re * h(21, {rho}) / b, -re * h(23, {rho}), re * h(22, {rho}) / b, -re * h(24, {rho})});
            const double r12 = re * h(20, {rho}) / b;
            Matrix r(2, 2, {(1.0 + rho * re * h(19, {rho})) / (b * b), r12, r12, 1.0 / (rho * rho)});
            return make(fam, kind, g, r);
        }
        case gamma:
        case inverse_gamma: {
            const double lam = t[0];
            const double b = t[1];
            const double h6 = h(6, {lam, lam + 1.0, 1.0});
            const double h7 = h(7, {lam, lam + 1.0, 1.0});
            const double s = fam == gamma ? 1.0 : -1.0;
            Matrix g(2, 2, {h(10, {lam}), s * lam * h6 / b, s * h(11, {lam}), lam * h7 / b});
            Matrix r(2, 2, {trigamma(lam), s / b, s / b, lam / (b * b)});
            return make(fam, kind, g, r);
        }
        case beta_prime:
        case beta: {
            const double a = t[0];
            const double b = t[1];
            Matrix g(2, 2, {h(25, {a, b}), h(27, {a, b}), h(26, {a, b}), h(28, {a, b})});
            const double tab = trigamma(a + b);
            Matrix r(2, 2, {trigamma(a) - tab, -tab, -tab, trigamma(b) - tab});
            return make(fam, kind, g, r);
        }
        case lomax: {
            const double a = t[0];
            const double sig = t[1];
            const double q = a / (a + 1.0);
            Matrix g(2, 2,
                     {-h(6, {1.0, 2.0, 1.0}) / a, -a * h(6, {1.0, 1.0, q}) / sig, -h(7, {1.0, 2.0, 1.0}) / a,
                      -a * h(7, {1.0, 1.0, q}) / sig});
            const double r12 = -1.0 / ((a + 1.0) * sig);
            Matrix r(2, 2, {1.0 / (a * a), r12, r12, a / ((a + 2.0) * sig * sig)});
            return make(fam, kind, g, r);
        }
        case nakagami: {
            const double lam = t[0];
            const double w = t[1];
            const double h6 = h(6, {lam, lam + 1.0, 1.0});
            const double h7 = h(7, {lam, lam + 1.0, 1.0});
            Matrix g(2, 2, {h(10, {lam}) - h6, lam * h6 / w, h(11, {lam}) - h7, lam * h7 / w});
            Matrix r(2, 2, {trigamma(lam) - 1.0 / lam, 0.0, 0.0, lam / (w * w)});
            return make(fam, kind, g, r);
        }
        case inverse_gaussian: {
            const double mu = t[0];
            const double lam = t[1];
            const double mu3 = mu * mu * mu;
            Matrix g(2, 2,
                     {lam * h(29, {mu, lam}) / mu3, -h(31, {mu, lam}) / (2.0 * mu * mu), lam * h(30, {mu, lam}) / mu3,
                      -h(32, {mu, lam}) / (2.0 * mu * mu)});
            Matrix r(2, 2, {lam / mu3, 0.0, 0.0, 0.5 / (lam * lam)});
            return make(fam, kind, g, r);
        }
        case exponential: {
            const double b = t[0];
            return make(fam, kind, Matrix(2, 1, {h(6, {1.0, 2.0, 1.0}) / b, h(7, {1.0, 2.0, 1.0}) / b}),
                        Matrix(1, 1, {1.0 / (b * b)}));
        }
        case half_normal:
        case rayleigh:
        case maxwell_boltzmann: {
            const double d = t[0];
            // Shape of the gamma law of X^2 / (2 delta^2) and the ML weight.
            const double a = fam == half_normal ? 0.5 : (fam == rayleigh ? 1.0 : 1.5);
            const double c = 2.0 * a;
            Matrix g(2, 1, {c * h(6, {a, a + 1.0, 1.0}) / d, c * h(7, {a, a + 1.0, 1.0}) / d});
            if (ml) return make(fam, kind, g, Matrix(1, 1, {2.0 * c / (d * d)}));
            const double v = fam == half_normal ? pi / 2.0 - 1.0 : (fam == rayleigh ? 4.0 / pi - 1.0 : 3.0 * pi / 8.0 - 1.0);
            MatrixSet ms = make(fam, kind, g, Matrix(1, 1, {1.0 / (v * d * d)}));
            ms.J = Matrix(2, 1, {h(6, {a, a + 0.5, 1.0}) / (v * d), h(7, {a, a + 0.5, 1.0}) / (v * d)});
            return ms;
        }
        case chi_squared: {
            const double k = t[0];
            const double a = 0.5 * k;
            Matrix g(2, 1, {0.5 * h(10, {a}), 0.5 * h(11, {a})});
            if (ml) return make(fam, kind, g, Matrix(1, 1, {0.25 * trigamma(a)}));
            MatrixSet ms = make(fam, kind, g, Matrix(1, 1, {1.0 / (2.0 * k)}));
            ms.J = Matrix(2, 1, {0.5 * h(6, {a, a + 1.0, 1.0}), 0.5 * h(7, {a, a + 1.0, 1.0})});
            return ms;
        }
        case pareto: {
            const double a = t[0];
            return make(fam, kind, Matrix(2, 1, {-h(6, {1.0, 2.0, 1.0}) / a, -h(7, {1.0, 2.0, 1.0}) / a}),
                        Matrix(1, 1, {1.0 / (a * a)}));
        }
        case kumaraswamy: {
            const double a = t[0];
            const double b = t[1];
            Matrix g(2, 2, {b * h(33, {b}) / a, b * h(35, {b}), b * h(34, {b}) / a, b * h(36, {b})});
            const double r11 = removable(kuma_r11_unit, b, 2.0) / (a * a);
            const double r12 = removable(kuma_r12_unit, b, 1.0) / a;
            Matrix r(2, 2, {r11, r12, r12, 1.0 / (b * b)});
            return make(fam, kind, g, r);
        }
        case uniform:
            // Non-regular: the order-statistic estimators converge at rate n,
            // so estimation leaves Sigma at I/2.
            return make(fam, kind, Matrix(2, 2), Matrix::identity(2));
        default:
            break;
    }
    throw ConfigError("matrices: unhandled family");
}

Matrix sigma(const MatrixSet& ms, const KnownMask& mask) {
    const int p = ms.R.rows();
    if (mask.size() != p) throw ConfigError("known-parameter mask does not match the family arity");
    for (int j : ms.required_known) {
        if (!mask.is_known(j)) {
            throw ConfigError(std::string(family_name(ms.family)) + ": the " + to_string(ms.kind) +
                              " estimator requires parameter '" + std::string(info(ms.family).params[j]) +
                              "' to be known");
        }
    }
    const auto u = mask.unknown_indices();
    Matrix half = 0.5 * Matrix::identity(2);
    if (u.empty()) return half;
    const Matrix g = cols_of(ms.G, u);
    const Matrix j = cols_of(ms.J, u);
    const Matrix r = linalg::select(ms.R, u, u);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < static_cast<int>(u.size()); ++b)
            if (!std::isfinite(g(a, b)) || !std::isfinite(j(a, b))) throw DomainError("non-finite G or J entry");
    for (int a = 0; a < r.rows(); ++a)
        for (int b = 0; b < r.cols(); ++b)
            if (!std::isfinite(r(a, b))) {
                throw SingularityError("R is not finite at this parameter (information does not exist)",
                                       std::numeric_limits<double>::infinity());
            }
    const Matrix rinv = linalg::inverse_symmetric(r);
    const Matrix grg = g * rinv * linalg::transpose(g);
    Matrix s;
    if (ms.kind == EstimatorKind::ml) {
        s = half - grg;
    } else {
        const Matrix grj = g * rinv * linalg::transpose(j);
        s = half - grj - linalg::transpose(grj) + grg;
    }
    return linalg::symmetrize(s);
}

Matrix sigma(FamilyId fam, EstimatorKind kind, const ParamVector& theta, const KnownMask& mask) {
    return sigma(matrices(fam, kind, theta), mask);
}

Matrix sigma_inverse_sqrt(const Matrix& s) { return linalg::inverse_sqrt_2x2(s); }

}  // namespace trigof
