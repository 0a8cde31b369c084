#include "trigof/specfun.hpp"

#include "trigof/detail/newton.hpp"
#include "trigof/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace trigof::specfun {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr double tiny = 1e-300;
constexpr int max_cf_iter = 100000;

void require_pos(double z, const char* fn) {
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw DomainError(std::string(fn) + ": argument must be finite and > 0, got " + std::to_string(z));
    }
}

// Series for P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < max_cf_iter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * eps * 0.5) break;
    }
    return sum * std::exp(-x + a * std::log(x) - ln_gamma(a));
}

// Continued fraction (modified Lentz) for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < max_cf_iter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return std::exp(-x + a * std::log(x) - ln_gamma(a)) * h;
}

// Continued fraction for the incomplete beta function.
double beta_cf(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < max_cf_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

double clamp01(double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }

}  // namespace

double ln_gamma(double z) {
    require_pos(z, "ln_gamma");
    return std::lgamma(z);
}

double gamma_fn(double z) {
    require_pos(z, "gamma_fn");
    return std::tgamma(z);
}

double digamma(double z) {
    require_pos(z, "digamma");
    double acc = 0.0;
    while (z < 10.0) {
        acc -= 1.0 / z;
        z += 1.0;
    }
    const double r = 1.0 / (z * z);
    const double series =
        r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760))))));
    return acc + std::log(z) - 0.5 / z - series;
}

double trigamma(double z) {
    require_pos(z, "trigamma");
    double acc = 0.0;
    while (z < 10.0) {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    const double r = 1.0 / (z * z);
    const double series =
        1.0 / 6 - r * (1.0 / 30 - r * (1.0 / 42 - r * (1.0 / 30 - r * (5.0 / 66 - r * (691.0 / 2730)))));
    return acc + 1.0 / z + 0.5 * r + series * r / z;
}

double gamma_p(double a, double x) {
    require_pos(a, "gamma_p");
    if (std::isnan(x) || x < 0.0) throw DomainError("gamma_p: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return clamp01(gamma_p_series(a, x));
    return clamp01(1.0 - gamma_q_cf(a, x));
}

double gamma_q(double a, double x) {
    require_pos(a, "gamma_q");
    if (std::isnan(x) || x < 0.0) throw DomainError("gamma_q: x must be >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return clamp01(1.0 - gamma_p_series(a, x));
    return clamp01(gamma_q_cf(a, x));
}

double reg_gamma_cdf(double a, double b, double x) {
    require_pos(a, "reg_gamma_cdf");
    require_pos(b, "reg_gamma_cdf");
    if (std::isnan(x) || x < 0.0) throw DomainError("reg_gamma_cdf: x must be >= 0");
    return gamma_p(a, x / b);
}

double gamma_p_inv(double a, double p) {
    require_pos(a, "gamma_p_inv");
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("gamma_p_inv: p must lie in [0, 1)");
    if (p == 0.0) return 0.0;
    const double gln = ln_gamma(a);
    // Initial guess (Wilson-Hilferty for a > 1, power/exponential tails otherwise).
    double x;
    if (a > 1.0) {
        const double pp = p < 0.5 ? p : 1.0 - p;
        const double t = std::sqrt(-2.0 * std::log(pp));
        double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if (p < 0.5) z = -z;
        x = std::max(1e-3, a * std::pow(1.0 - 1.0 / (9.0 * a) - z / (3.0 * std::sqrt(a)), 3));
    } else {
        const double t = 1.0 - a * (0.253 + a * 0.12);
        x = p < t ? std::exp((std::log(p) - std::log(t)) / a) : 1.0 - std::log(1.0 - (p - t) / (1.0 - t));
    }
    if (!(x > 0.0) || !std::isfinite(x)) x = a;
    const bool upper = p > 0.5;
    const double q = 1.0 - p;
    // Root in t = ln x; g is increasing in t.
    auto fg = [&](double t) -> std::pair<double, double> {
        const double xv = std::exp(t);
        const double g = upper ? q - gamma_q(a, xv) : gamma_p(a, xv) - p;
        const double dg = std::exp(a * t - xv - gln);
        return {g, dg};
    };
    double t0 = std::log(x);
    double lo = t0 - 1.0, hi = t0 + 1.0;
    for (int k = 0; fg(lo).first > 0.0; ++k) {
        lo -= std::ldexp(1.0, k + 1);
        if (lo < -745.0) {
            lo = -745.0;
            break;
        }
    }
    for (int k = 0; fg(hi).first < 0.0; ++k) {
        hi += std::ldexp(1.0, k + 1);
        if (hi > 710.0) throw DomainError("gamma_p_inv: failed to bracket quantile");
    }
    return std::exp(detail::bracketed_newton(fg, lo, hi, t0, 1e-15));
}

double reg_beta_cdf(double a, double b, double x) {
    require_pos(a, "reg_beta_cdf");
    require_pos(b, "reg_beta_cdf");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("reg_beta_cdf: x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double lbt = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(lbt);
    if (x < (a + 1.0) / (a + b + 2.0)) return clamp01(bt * beta_cf(a, b, x) / a);
    return clamp01(1.0 - bt * beta_cf(b, a, 1.0 - x) / b);
}

double beta_inv(double a, double b, double p) {
    require_pos(a, "beta_inv");
    require_pos(b, "beta_inv");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("beta_inv: p must lie in [0, 1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    double x;
    if (a >= 1.0 && b >= 1.0) {
        const double pp = p < 0.5 ? p : 1.0 - p;
        const double t = std::sqrt(-2.0 * std::log(pp));
        double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if (p < 0.5) z = -z;
        const double al = (z * z - 3.0) / 6.0;
        const double h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
        const double w = z * std::sqrt(al + h) / h -
                         (1.0 / (2.0 * b - 1) - 1.0 / (2.0 * a - 1.0)) * (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
        x = a / (a + b * std::exp(2.0 * w));
    } else {
        const double lna = std::log(a / (a + b)), lnb = std::log(b / (a + b));
        const double t = std::exp(a * lna) / a;
        const double u = std::exp(b * lnb) / b;
        const double w = t + u;
        x = p < t / w ? std::pow(a * w * p, 1.0 / a) : 1.0 - std::pow(b * w * (1.0 - p), 1.0 / b);
    }
    if (!(x > 0.0 && x < 1.0)) x = 0.5;
    const double lbeta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    // Root in logit space.
    auto fg = [&](double t) -> std::pair<double, double> {
        const double xv = 1.0 / (1.0 + std::exp(-t));
        if (xv <= 0.0) return {-p, 0.0};
        if (xv >= 1.0) return {1.0 - p, 0.0};
        const double g = reg_beta_cdf(a, b, xv) - p;
        const double lx = t > 0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
        const double l1mx = lx - t;
        const double dg = std::exp(a * lx + b * l1mx - lbeta);
        return {g, dg};
    };
    const double t0 = std::log(x) - std::log1p(-x);
    double lo = t0 - 1.0, hi = t0 + 1.0;
    for (int k = 0; fg(lo).first > 0.0; ++k) {
        lo -= std::ldexp(1.0, k + 1);
        if (lo < -745.0) {
            lo = -745.0;
            break;
        }
    }
    for (int k = 0; fg(hi).first < 0.0; ++k) {
        hi += std::ldexp(1.0, k + 1);
        if (hi > 745.0) {
            hi = 745.0;
            break;
        }
    }
    const double t = detail::bracketed_newton(fg, lo, hi, t0, 1e-15);
    return 1.0 / (1.0 + std::exp(-t));
}

double gamma_pdf(double x, double shape, double scale) {
    require_pos(shape, "gamma_pdf");
    require_pos(scale, "gamma_pdf");
    if (!(x > 0.0)) return (x == 0.0 && shape == 1.0) ? 1.0 / scale : 0.0;
    if (std::isinf(x)) return 0.0;
    const double z = x / scale;
    return std::exp((shape - 1.0) * std::log(z) - z - ln_gamma(shape)) / scale;
}

double beta_pdf(double x, double a, double b) {
    require_pos(a, "beta_pdf");
    require_pos(b, "beta_pdf");
    if (!(x > 0.0 && x < 1.0)) return 0.0;
    return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - ln_gamma(a) - ln_gamma(b) +
                    ln_gamma(a + b));
}

double std_normal_pdf(double x) {
    if (!std::isfinite(x)) {
        if (std::isinf(x)) return 0.0;
        throw DomainError("std_normal_pdf: NaN argument");
    }
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi);
}

double std_normal_cdf(double x) {
    if (!std::isfinite(x)) throw DomainError("std_normal_cdf: argument must be finite");
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("std_normal_quantile: p must lie in (0, 1)");
    // Acklam's rational approximation followed by Halley refinement.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01,  -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    for (int i = 0; i < 2; ++i) {
        const double e = x < 0.0 ? 0.5 * std::erfc(-x / std::sqrt(2.0)) - p
                                 : (1.0 - p) - 0.5 * std::erfc(x / std::sqrt(2.0));
        const double u = e * std::sqrt(2.0 * pi) * std::exp(0.5 * x * x);
        x = x - u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double inverse_gaussian_pdf(double x, double mu, double lambda) {
    require_pos(mu, "inverse_gaussian_pdf");
    require_pos(lambda, "inverse_gaussian_pdf");
    if (!(x > 0.0) || std::isinf(x)) return 0.0;
    const double d = x - mu;
    return std::sqrt(lambda / (2.0 * pi * x * x * x)) * std::exp(-lambda * d * d / (2.0 * mu * mu * x));
}

double inverse_gaussian_cdf(double x, double mu, double lambda) {
    require_pos(mu, "inverse_gaussian_cdf");
    require_pos(lambda, "inverse_gaussian_cdf");
    if (std::isnan(x)) throw DomainError("inverse_gaussian_cdf: NaN argument");
    if (!(x > 0.0)) return 0.0;
    if (std::isinf(x)) return 1.0;
    const double r = std::sqrt(lambda / x);
    const double first = 0.5 * std::erfc(-r * (x / mu - 1.0) / std::sqrt(2.0));
    // e^{2 lambda / mu} Phi(-r (x / mu + 1)) in log space; Mills ratio in the far tail.
    const double z = r * (x / mu + 1.0);
    double lphi;
    if (z < 37.0) {
        lphi = std::log(0.5 * std::erfc(z / std::sqrt(2.0)));
    } else {
        const double z2 = z * z;
        lphi = -0.5 * z2 - std::log(z) - 0.5 * std::log(2.0 * pi) + std::log1p(-1.0 / z2 + 3.0 / (z2 * z2));
    }
    return clamp01(first + std::exp(2.0 * lambda / mu + lphi));
}

double noncentral_chi2_sf(int df, double ncp, double t) {
    if (df <= 0) throw DomainError("noncentral_chi2_sf: df must be positive");
    if (!(ncp >= 0.0) || !std::isfinite(ncp)) throw DomainError("noncentral_chi2_sf: ncp must be finite and >= 0");
    if (!(t >= 0.0) || std::isnan(t)) throw DomainError("noncentral_chi2_sf: t must be >= 0");
    if (t == 0.0) return 1.0;
    if (std::isinf(t)) return 0.0;
    const double half_df = 0.5 * df;
    const double x = 0.5 * t;
    if (ncp == 0.0) return gamma_q(half_df, x);
    const double lam = 0.5 * ncp;
    const long mode = static_cast<long>(std::floor(lam));
    auto log_weight = [&](long j) { return -lam + j * std::log(lam) - std::lgamma(j + 1.0); };

    double sum = 0.0;
    double mass = 0.0;
    // Upward from the modal Poisson index.
    for (long j = mode;; ++j) {
        const double w = std::exp(log_weight(j));
        const double term = w * gamma_q(half_df + j, x);
        sum += term;
        mass += w;
        if (j > mode && (term <= 1e-16 * sum || w <= 1e-17 * mass) && (j - mode) > 2) break;
        if (j - mode > 100000) break;
    }
    // Downward.
    for (long j = mode - 1; j >= 0; --j) {
        const double w = std::exp(log_weight(j));
        const double term = w * gamma_q(half_df + j, x);
        sum += term;
        mass += w;
        if (w * (j + 1.0) <= 1e-16 * sum) break;
    }
    return clamp01(sum);
}

double zeta3() { return 1.2020569031595942854; }

}  // namespace trigof::specfun
