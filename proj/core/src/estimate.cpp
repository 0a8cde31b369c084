#include "trigof/estimate.hpp"

#include "roots.hpp"
#include "trigof/detail/newton.hpp"
#include "trigof/errors.hpp"
#include "trigof/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace trigof {

const char* to_string(EstimatorKind kind) noexcept { return kind == EstimatorKind::ml ? "ml" : "mm"; }

EstimatorKind estimator_from_name(std::string_view name) {
    if (name == "ml" || name == "ML") return EstimatorKind::ml;
    if (name == "mm" || name == "MM") return EstimatorKind::mm;
    throw ConfigError("unknown estimator '" + std::string(name) + "' (expected ml or mm)");
}

KnownMask KnownMask::none(FamilyId fam) {
    KnownMask m;
    const int p = arity(fam);
    m.known_.assign(p, false);
    m.values_.assign(p, std::numeric_limits<double>::quiet_NaN());
    return m;
}

KnownMask KnownMask::all(FamilyId fam, const ParamVector& theta) {
    if (static_cast<int>(theta.size()) != arity(fam)) throw DomainError("parameter vector has the wrong length");
    KnownMask m;
    m.known_.assign(theta.size(), true);
    m.values_ = theta;
    return m;
}

KnownMask& KnownMask::fix(int index, double value) {
    if (index < 0 || index >= size()) throw ConfigError("known-parameter index out of range");
    if (!std::isfinite(value)) throw ConfigError("known-parameter value must be finite");
    known_[index] = true;
    values_[index] = value;
    return *this;
}

KnownMask& KnownMask::fix(FamilyId fam, std::string_view name, double value) {
    const int j = param_index(fam, name);
    if (j < 0) {
        throw ConfigError("family " + std::string(family_name(fam)) + " has no parameter '" + std::string(name) + "'");
    }
    if (size() != arity(fam)) *this = none(fam);
    return fix(j, value);
}

int KnownMask::unknown_count() const noexcept {
    return static_cast<int>(std::count(known_.begin(), known_.end(), false));
}

std::vector<int> KnownMask::unknown_indices() const {
    std::vector<int> out;
    for (int j = 0; j < size(); ++j)
        if (!known_[j]) out.push_back(j);
    return out;
}

std::vector<int> KnownMask::known_indices() const {
    std::vector<int> out;
    for (int j = 0; j < size(); ++j)
        if (known_[j]) out.push_back(j);
    return out;
}

ParamVector KnownMask::apply(ParamVector theta) const {
    if (static_cast<int>(theta.size()) != size()) throw DomainError("parameter vector has the wrong length");
    for (int j = 0; j < size(); ++j)
        if (known_[j]) theta[j] = values_[j];
    return theta;
}

double median(std::span<const double> x) {
    if (x.empty()) throw DegenerateSampleError("median of an empty sample");
    std::vector<double> v(x.begin(), x.end());
    const std::size_t n = v.size();
    const std::size_t m = n / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    const double hi = v[m];
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + m);
    return 0.5 * (lo + hi);
}

namespace {

using enum FamilyId;
using specfun::digamma;
using specfun::ln_gamma;
using specfun::trigamma;
constexpr double pi = specfun::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// Mean of (x - c)^2.
double msd(std::span<const double> x, double c) {
    double s = 0.0;
    for (double v : x) s += (v - c) * (v - c);
    return s / static_cast<double>(x.size());
}

double sd_of(std::span<const double> x) { return std::sqrt(msd(x, mean_of(x))); }

std::vector<double> mapped(std::span<const double> x, double (*f)(double)) {
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), f);
    return out;
}

bool is_log_family(FamilyId fam) { return fam == log_epd || fam == log_laplace || fam == log_normal; }

FamilyId log_base(FamilyId fam) {
    switch (fam) {
        case log_epd: return epd;
        case log_laplace: return laplace;
        case log_normal: return normal;
        default: return fam;
    }
}

// Real-valued (location-type) components; all others are positive.
bool real_param(FamilyId fam, int j) {
    switch (fam) {
        case epd:
        case exp_gamma:
        case student_t:
        case log_epd: return j == 1;
        case laplace:
        case normal:
        case exp_weibull:
        case gumbel:
        case logistic:
        case log_laplace:
        case log_normal: return j == 0;
        case uniform: return true;
        default: return false;
    }
}

// Scale used to normalize the estimating equation of component j.
double param_scale(FamilyId fam, const ParamVector& t, int j) {
    if (!real_param(fam, j)) return std::fabs(t[j]);
    switch (fam) {
        case epd:
        case exp_gamma:
        case student_t:
        case log_epd: return t[2];
        case uniform: return t[1] - t[0];
        default: return t[1];
    }
}

// Shape component that MM rows take as known, or -1.
int mm_shape_index(FamilyId fam) {
    switch (fam) {
        case epd:
        case log_epd:
        case student_t:
        case half_epd: return 0;
        default: return -1;
    }
}

// ---------------------------------------------------------------- scores

// EPD-type score components for a = |y|, lambda, sigma.
void epd_like_score(double lam, double sigma, double y, double* s_lam, double* s_mu, double* s_sigma) {
    const double a = std::fabs(y);
    const double c1 = digamma(1.0 / lam + 1.0) + std::log(lam);
    double al = 0.0;
    double al_log = 0.0;
    if (a > 0.0) {
        const double l = lam * std::log(a);
        al = std::exp(l);
        al_log = al * l;
    }
    if (s_lam) *s_lam = (c1 - 1.0 + al - al_log) / (lam * lam);
    if (s_mu) {
        const double sg = y > 0.0 ? 1.0 : (y < 0.0 ? -1.0 : 0.0);
        *s_mu = a > 0.0 ? sg * std::pow(a, lam - 1.0) / sigma : 0.0;
    }
    if (s_sigma) *s_sigma = (al - 1.0) / sigma;
}

void score_into(FamilyId fam, const ParamVector& t, double x, double* s) {
    if (is_log_family(fam)) {
        score_into(log_base(fam), t, std::log(x), s);
        return;
    }
    switch (fam) {
        case epd: {
            const double y = (x - t[1]) / t[2];
            epd_like_score(t[0], t[2], y, &s[0], &s[1], &s[2]);
            return;
        }
        case laplace: {
            const double y = (x - t[0]) / t[1];
            s[0] = (y > 0.0 ? 1.0 : (y < 0.0 ? -1.0 : 0.0)) / t[1];
            s[1] = (std::fabs(y) - 1.0) / t[1];
            return;
        }
        case normal: {
            const double y = (x - t[0]) / t[1];
            s[0] = y / t[1];
            s[1] = (y * y - 1.0) / t[1];
            return;
        }
        case exp_gamma: {
            const double y = (x - t[1]) / t[2];
            const double ey = std::exp(y);
            s[0] = y - digamma(t[0]);
            s[1] = (ey - t[0]) / t[2];
            s[2] = (-1.0 - t[0] * y + y * ey) / t[2];
            return;
        }
        case exp_weibull: {
            const double y = (x - t[0]) / t[1];
            const double ey = std::exp(y);
            s[0] = (ey - 1.0) / t[1];
            s[1] = (-1.0 - y + y * ey) / t[1];
            return;
        }
        case gumbel: {
            const double y = (x - t[0]) / t[1];
            const double ey = std::exp(-y);
            s[0] = (1.0 - ey) / t[1];
            s[1] = (-1.0 + y - y * ey) / t[1];
            return;
        }
        case logistic: {
            const double y = (x - t[0]) / t[1];
            const double th = std::tanh(0.5 * y);
            s[0] = th / t[1];
            s[1] = (-1.0 + y * th) / t[1];
            return;
        }
        case student_t: {
            const double lam = t[0];
            const double y = (x - t[1]) / t[2];
            const double y2 = y * y;
            s[0] = 0.5 * digamma(0.5 * (lam + 1.0)) - 0.5 / lam - 0.5 * digamma(0.5 * lam) -
                   0.5 * std::log1p(y2 / lam) + (lam + 1.0) * y2 / (2.0 * lam * (lam + y2));
            s[1] = (lam + 1.0) * y / (t[2] * (lam + y2));
            s[2] = -1.0 / t[2] + (lam + 1.0) * y2 / (t[2] * (lam + y2));
            return;
        }
        case half_epd:
            epd_like_score(t[0], t[1], x / t[1], &s[0], nullptr, &s[1]);
            return;
        case gg: {
            const double lz = std::log(x / t[1]);
            const double zr = std::exp(t[2] * lz);
            s[0] = -digamma(t[0]) + t[2] * lz;
            s[1] = t[2] * (zr - t[0]) / t[1];
            s[2] = 1.0 / t[2] + t[0] * lz - zr * lz;
            return;
        }
        case weibull: {
            const double lz = std::log(x / t[0]);
            const double zr = std::exp(t[1] * lz);
            s[0] = t[1] * (zr - 1.0) / t[0];
            s[1] = 1.0 / t[1] + lz - zr * lz;
            return;
        }
        case frechet: {
            const double lz = std::log(x / t[0]);
            const double zr = std::exp(-t[1] * lz);
            s[0] = t[1] * (1.0 - zr) / t[0];
            s[1] = 1.0 / t[1] - lz + zr * lz;
            return;
        }
        case gompertz: {
            const double e = std::exp(t[0] * x);
            s[0] = 1.0 / t[0] + x - t[1] * x * e;
            s[1] = 1.0 / t[1] + 1.0 - e;
            return;
        }
        case log_logistic: {
            const double lz = std::log(x / t[0]);
            const double q = std::tanh(-0.5 * t[1] * lz);  // (1 - w) / (1 + w)
            s[0] = -(t[1] / t[0]) * q;
            s[1] = 1.0 / t[1] + lz * q;
            return;
        }
        case gamma:
            s[0] = std::log(x) - std::log(t[1]) - digamma(t[0]);
            s[1] = x / (t[1] * t[1]) - t[0] / t[1];
            return;
        case inverse_gamma:
            s[0] = std::log(t[1]) - digamma(t[0]) - std::log(x);
            s[1] = t[0] / t[1] - 1.0 / x;
            return;
        case beta_prime: {
            const double d = digamma(t[0] + t[1]);
            s[0] = std::log(x) - std::log1p(x) - digamma(t[0]) + d;
            s[1] = -std::log1p(x) - digamma(t[1]) + d;
            return;
        }
        case lomax:
            s[0] = 1.0 / t[0] - std::log1p(x / t[1]);
            s[1] = -1.0 / t[1] + (t[0] + 1.0) * x / (t[1] * (t[1] + x));
            return;
        case nakagami: {
            const double x2 = x * x;
            s[0] = -digamma(t[0]) + std::log(t[0]) + 1.0 - std::log(t[1]) + 2.0 * std::log(x) - x2 / t[1];
            s[1] = -t[0] / t[1] + t[0] * x2 / (t[1] * t[1]);
            return;
        }
        case inverse_gaussian: {
            const double d = x - t[0];
            s[0] = t[1] * d / (t[0] * t[0] * t[0]);
            s[1] = 0.5 / t[1] - d * d / (2.0 * t[0] * t[0] * x);
            return;
        }
        case exponential:
            s[0] = -1.0 / t[0] + x / (t[0] * t[0]);
            return;
        case half_normal:
        case rayleigh:
        case maxwell_boltzmann: {
            const double c = fam == half_normal ? 1.0 : (fam == rayleigh ? 2.0 : 3.0);
            s[0] = -c / t[0] + x * x / (t[0] * t[0] * t[0]);
            return;
        }
        case chi_squared:
            s[0] = 0.5 * (std::log(x) - std::log(2.0) - digamma(0.5 * t[0]));
            return;
        case pareto:
            s[0] = 1.0 / t[0] - std::log(x);
            return;
        case beta: {
            const double d = digamma(t[0] + t[1]);
            s[0] = std::log(x) - digamma(t[0]) + d;
            s[1] = std::log1p(-x) - digamma(t[1]) + d;
            return;
        }
        case kumaraswamy: {
            const double lx = std::log(x);
            const double xa = std::exp(t[0] * lx);
            const double one_m = -std::expm1(t[0] * lx);
            s[0] = 1.0 / t[0] + lx - (t[1] - 1.0) * xa * lx / one_m;
            s[1] = 1.0 / t[1] + std::log(one_m);
            return;
        }
        case uniform:
            s[0] = 1.0 / (t[1] - t[0]);
            s[1] = -1.0 / (t[1] - t[0]);
            return;
        default:
            break;
    }
    throw DomainError("score: unhandled family");
}

// Scaling constants of the MM rows.
double epd_mm_c2(double lam) { return std::exp(ln_gamma(1.0 / lam) - (2.0 / lam) * std::log(lam) - ln_gamma(3.0 / lam)); }

double student_mm_c2(double lam) {
    return std::sqrt(lam) * std::exp(ln_gamma(0.5 * (lam - 1.0)) - ln_gamma(0.5 * lam)) / std::sqrt(pi);
}

double half_epd_mm_c2(double lam) { return std::exp(ln_gamma(1.0 / lam) - std::log(lam) / lam - ln_gamma(2.0 / lam)); }

// Squared-deviation constant C with sigma^2 = C * E(X - mu)^2 for the
// location-scale MM rows.
double mm_var_constant(FamilyId fam, const ParamVector& t) {
    switch (fam) {
        case epd:
        case log_epd: return epd_mm_c2(t[0]);
        case laplace:
        case log_laplace: return 0.5;
        case normal:
        case log_normal: return 1.0;
        case logistic: return 3.0 / (pi * pi);
        default: return 1.0;
    }
}

void influence_into(FamilyId fam, const ParamVector& t, double x, double* s) {
    switch (fam) {
        case epd:
        case log_epd:
        case laplace:
        case log_laplace:
        case normal:
        case log_normal:
        case logistic: {
            const double z = is_log_family(fam) ? std::log(x) : x;
            const int off = (fam == epd || fam == log_epd) ? 1 : 0;
            if (off) s[0] = 0.0;
            const double mu = t[off];
            const double sigma = t[off + 1];
            const double c = mm_var_constant(fam, t);
            s[off] = z - mu;
            s[off + 1] = (c * (z - mu) * (z - mu) - sigma * sigma) / (2.0 * sigma);
            return;
        }
        case student_t:
            s[0] = 0.0;
            s[1] = x - t[1];
            s[2] = std::fabs(x - t[1]) / student_mm_c2(t[0]) - t[2];
            return;
        case half_epd:
            s[0] = 0.0;
            s[1] = half_epd_mm_c2(t[0]) * x - t[1];
            return;
        case log_logistic: {
            const double d = std::log(x) - std::log(t[0]);
            const double v = pi * pi / (3.0 * t[1] * t[1]);
            s[0] = t[0] * d;
            s[1] = -t[1] / (2.0 * v) * (d * d - v);
            return;
        }
        case exponential: s[0] = x - t[0]; return;
        case half_normal: s[0] = std::sqrt(pi / 2.0) * x - t[0]; return;
        case rayleigh: s[0] = std::sqrt(2.0 / pi) * x - t[0]; return;
        case maxwell_boltzmann: s[0] = std::sqrt(pi / 8.0) * x - t[0]; return;
        case chi_squared: s[0] = x - t[0]; return;
        default: break;
    }
    throw ConfigError(std::string(family_name(fam)) + " has no MM estimator");
}

void estimating_into(FamilyId fam, EstimatorKind kind, const ParamVector& t, double x, double* s) {
    if (kind == EstimatorKind::ml) {
        score_into(fam, t, x, s);
    } else {
        influence_into(fam, t, x, s);
    }
}

// ---------------------------------------------------------------- support

void check_data(FamilyId fam, const KnownMask& mask, std::span<const double> x) {
    const Support sup = info(fam).support;
    for (double v : x) {
        bool ok = std::isfinite(v);
        switch (sup) {
            case Support::real_line: break;
            case Support::positive: ok = ok && v > 0.0; break;
            case Support::above_one: ok = ok && v >= 1.0; break;
            case Support::unit: ok = ok && v > 0.0 && v < 1.0; break;
            case Support::interval:
                if (mask.is_known(0)) ok = ok && v >= mask.value(0);
                if (mask.is_known(1)) ok = ok && v <= mask.value(1);
                break;
        }
        if (!ok) {
            throw DomainError(std::string(family_name(fam)) + ": observation " + std::to_string(v) +
                              " lies outside the support");
        }
    }
}

// ---------------------------------------------------------------- shared fits

struct Partial {
    ParamVector theta;
    int iterations = 0;
    int capped = 0;
    std::string note;
};

struct Ctx {
    FamilyId fam;
    EstimatorKind kind;
    const KnownMask& mask;
    std::span<const double> x;
    const FitOptions& opts;
};

struct GammaFit {
    double shape;
    double scale;
    int capped = 0;
    int evals = 0;
};

// Gamma ML on v with optional known shape or scale.
GammaFit gamma_fit(std::span<const double> v, std::optional<double> shape, std::optional<double> scale,
                   const FitOptions& opts) {
    GammaFit out{};
    const double vbar = mean_of(v);
    double mlog = 0.0;
    for (double e : v) mlog += std::log(e);
    mlog /= static_cast<double>(v.size());
    if (shape && scale) {
        out.shape = *shape;
        out.scale = *scale;
        return out;
    }
    if (shape) {
        out.shape = *shape;
        out.scale = vbar / *shape;
        return out;
    }
    const double tlo = std::log(opts.shape_lo);
    const double thi = std::log(opts.shape_hi);
    if (scale) {
        // psi(lambda) = mean ln v - ln scale, increasing in lambda.
        const double c = mlog - std::log(*scale);
        auto fg = [&](double t) {
            const double lam = std::exp(t);
            ++out.evals;
            return std::pair{digamma(lam) - c, lam * trigamma(lam)};
        };
        out.scale = *scale;
        if (fg(tlo).first >= 0.0) {
            out.shape = opts.shape_lo;
            out.capped = -1;
        } else if (fg(thi).first <= 0.0) {
            out.shape = opts.shape_hi;
            out.capped = +1;
        } else {
            out.shape = std::exp(detail::bracketed_newton(fg, tlo, thi, 0.0, 1e-15));
        }
        return out;
    }
    // ln lambda - psi(lambda) = s, left side decreasing in lambda.
    const double s = std::log(vbar) - mlog;
    auto fg = [&](double t) {
        const double lam = std::exp(t);
        ++out.evals;
        // Increasing form: s - (ln lambda - psi(lambda)).
        return std::pair{s - (t - digamma(lam)), -(1.0 - lam * trigamma(lam))};
    };
    if (!(s > 0.0) || fg(thi).first <= 0.0) {
        out.shape = opts.shape_hi;
        out.capped = +1;
    } else if (fg(tlo).first >= 0.0) {
        out.shape = opts.shape_lo;
        out.capped = -1;
    } else {
        const double guess = std::log((3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s));
        out.shape = std::exp(detail::bracketed_newton(fg, tlo, thi, guess, 1e-15));
    }
    out.scale = vbar / out.shape;
    return out;
}

// EPD ML by profiling: sigma closed form, mu by a monotone root (lambda > 1)
// or a search over data points (lambda <= 1), lambda by an outer root.
class EpdProfile {
public:
    EpdProfile(std::span<const double> z, std::optional<double> mu, std::optional<double> sigma)
        : z_(z.begin(), z.end()), mu_known_(mu), sigma_known_(sigma) {
        std::sort(z_.begin(), z_.end());
        range_ = z_.back() - z_.front();
        if (!(range_ > 0.0)) range_ = 1.0;
    }

    int evals = 0;

    double mu_hat(double lam) {
        if (mu_known_) return *mu_known_;
        if (lam == 1.0) return median(z_);
        if (lam < 1.0) {
            double best = z_.front();
            double best_v = inf;
            for (double c : z_) {
                double v = 0.0;
                for (double e : z_) v += std::pow(std::fabs(e - c) / range_, lam);
                if (v < best_v) {
                    best_v = v;
                    best = c;
                }
            }
            evals += static_cast<int>(z_.size());
            return best;
        }
        auto h = [&](double m) {
            double s = 0.0;
            for (double e : z_) {
                const double d = (e - m) / range_;
                if (d > 0.0) s += std::pow(d, lam - 1.0);
                else if (d < 0.0) s -= std::pow(-d, lam - 1.0);
            }
            return s;
        };
        const double lo = z_.front();
        const double hi = z_.back();
        return detail::toms748_root(h, lo, hi, h(lo), h(hi), evals, 52);
    }

    struct Eval {
        double g;  // lambda^2 * mean lambda-score
        double mu;
        double sigma;
    };

    Eval eval(double lam) {
        const double mu = mu_hat(lam);
        const double n = static_cast<double>(z_.size());
        double lse_max = -inf;
        thread_local std::vector<double> ls;
        ls.assign(z_.size(), -inf);
        for (std::size_t i = 0; i < z_.size(); ++i) {
            const double d = std::fabs(z_[i] - mu);
            if (d > 0.0) {
                ls[i] = lam * std::log(sigma_known_ ? d / *sigma_known_ : d);
                lse_max = std::max(lse_max, ls[i]);
            }
        }
        if (!std::isfinite(lse_max)) throw DegenerateSampleError("epd: all observations equal the location");
        const double c1 = digamma(1.0 / lam + 1.0) + std::log(lam);
        double shift = 0.0;
        double sigma = 0.0;
        if (sigma_known_) {
            sigma = *sigma_known_;
        } else {
            double acc = 0.0;
            for (double l : ls)
                if (l > -inf) acc += std::exp(l - lse_max);
            shift = lse_max + std::log(acc / n);  // ln mean d^lambda
            sigma = std::exp(shift / lam);
        }
        double m1 = 0.0;
        double m2 = 0.0;
        for (double l : ls) {
            if (l == -inf) continue;
            const double q = l - shift;
            const double e = std::exp(q);
            m1 += e;
            m2 += e * q;
        }
        m1 /= n;
        m2 /= n;
        return {c1 - 1.0 + m1 - m2, mu, sigma};
    }

private:
    std::vector<double> z_;
    std::optional<double> mu_known_;
    std::optional<double> sigma_known_;
    double range_;
};

Partial epd_fit(std::span<const double> z, std::optional<double> lam, std::optional<double> mu,
                std::optional<double> sigma, const FitOptions& opts) {
    EpdProfile prof(z, mu, sigma);
    Partial out;
    double lam_hat;
    if (lam) {
        lam_hat = *lam;
    } else {
        auto g = [&](double l) { return prof.eval(l).g; };
        const auto br = detail::bracket_down(g, 2.0, opts.shape_lo, opts.shape_hi, out.iterations);
        if (br.capped) {
            lam_hat = br.lo;
            out.capped = br.capped;
            out.note = "lambda capped at bracket edge";
        } else {
            lam_hat = detail::toms748_root(g, br.lo, br.hi, br.glo, br.ghi, out.iterations);
        }
    }
    const auto e = prof.eval(lam_hat);
    out.iterations += prof.evals;
    out.theta = {lam_hat, e.mu, e.sigma};
    return out;
}

// exp-Weibull ML; with sigma known mu is closed form.
Partial exp_weibull_fit(std::span<const double> x, std::optional<double> sigma, int& evals) {
    const double xmax = *std::max_element(x.begin(), x.end());
    const double xbar = mean_of(x);
    auto mu_of = [&](double s) {
        double acc = 0.0;
        for (double v : x) acc += std::exp((v - xmax) / s);
        return xmax + s * std::log(acc / static_cast<double>(x.size()));
    };
    Partial out;
    double s;
    if (sigma) {
        s = *sigma;
    } else {
        auto h = [&](double sg) {
            double sw = 0.0;
            double sxw = 0.0;
            for (double v : x) {
                const double w = std::exp((v - xmax) / sg);
                sw += w;
                sxw += (v - xbar) * w;
            }
            return sxw / sw - sg;
        };
        const double sd = sd_of(x);
        const auto br = detail::bracket_down(h, sd * std::sqrt(6.0) / pi, sd * 1e-8, sd * 1e8, evals);
        if (br.capped) throw EstimationError("exp-weibull: no root for the scale equation", br.glo);
        s = detail::toms748_root(h, br.lo, br.hi, br.glo, br.ghi, evals);
    }
    out.theta = {mu_of(s), s};
    return out;
}

// Logistic ML; mu root for a given sigma, sigma by an outer root.
Partial logistic_fit(std::span<const double> x, std::optional<double> sigma, int& evals) {
    const double lo = *std::min_element(x.begin(), x.end());
    const double hi = *std::max_element(x.begin(), x.end());
    auto mu_of = [&](double s) {
        auto h = [&](double m) {
            double acc = 0.0;
            for (double v : x) acc += std::tanh(0.5 * (v - m) / s);
            return acc;
        };
        return detail::toms748_root(h, lo, hi, h(lo), h(hi), evals, 52);
    };
    Partial out;
    double s;
    if (sigma) {
        s = *sigma;
    } else {
        auto g = [&](double sg) {
            const double m = mu_of(sg);
            double acc = 0.0;
            for (double v : x) {
                const double y = (v - m) / sg;
                acc += y * std::tanh(0.5 * y);
            }
            return acc / static_cast<double>(x.size()) - 1.0;
        };
        const double sd = sd_of(x);
        const auto br = detail::bracket_down(g, sd * std::sqrt(3.0) / pi, sd * 1e-8, sd * 1e8, evals);
        if (br.capped) throw EstimationError("logistic: no root for the scale equation", br.glo);
        s = detail::toms748_root(g, br.lo, br.hi, br.glo, br.ghi, evals);
    }
    out.theta = {mu_of(s), s};
    return out;
}

// Student-t (mu, sigma) for fixed lambda by ECM iterations.
struct StudentInner {
    double mu;
    double sigma;
};

StudentInner student_em(std::span<const double> x, double lam, std::optional<double> mu0, std::optional<double> sigma0,
                        StudentInner start, int& evals) {
    double mu = mu0 ? *mu0 : start.mu;
    double sigma = sigma0 ? *sigma0 : start.sigma;
    const double n = static_cast<double>(x.size());
    for (int it = 0; it < 20000; ++it) {
        double sw = 0.0;
        double swx = 0.0;
        for (double v : x) {
            const double y = (v - mu) / sigma;
            const double w = (lam + 1.0) / (lam + y * y);
            sw += w;
            swx += w * v;
        }
        const double mu_new = mu0 ? mu : swx / sw;
        double s2 = 0.0;
        if (!sigma0) {
            for (double v : x) {
                const double y = (v - mu_new) / sigma;
                const double w = (lam + 1.0) / (lam + y * y);
                s2 += w * (v - mu_new) * (v - mu_new);
            }
        }
        const double sigma_new = sigma0 ? sigma : std::sqrt(s2 / n);
        ++evals;
        const double dm = std::fabs(mu_new - mu) / sigma;
        const double ds = std::fabs(sigma_new - sigma) / sigma;
        mu = mu_new;
        sigma = sigma_new;
        if (dm < 1e-14 && ds < 1e-14) break;
    }
    return {mu, sigma};
}

Partial student_fit(std::span<const double> x, std::optional<double> lam, std::optional<double> mu,
                    std::optional<double> sigma, const FitOptions& opts) {
    Partial out;
    const double med = median(x);
    double mad = 0.0;
    {
        std::vector<double> d(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) d[i] = std::fabs(x[i] - med);
        mad = median(d);
        if (!(mad > 0.0)) mad = sd_of(x);
    }
    StudentInner cur{med, mad * 1.4826};
    auto inner = [&](double l) {
        cur = student_em(x, l, mu, sigma, cur, out.iterations);
        return cur;
    };
    double lam_hat;
    if (lam) {
        lam_hat = *lam;
    } else {
        auto g = [&](double l) {
            const auto in = inner(l);
            double acc = 0.0;
            std::array<double, 3> s{};
            const ParamVector t{l, in.mu, in.sigma};
            for (double v : x) {
                score_into(student_t, t, v, s.data());
                acc += s[0];
            }
            return acc / static_cast<double>(x.size()) * l;
        };
        const auto br = detail::bracket_down(g, 5.0, std::max(opts.shape_lo, 0.05), opts.shape_hi, out.iterations);
        if (br.capped) {
            lam_hat = br.lo;
            out.capped = br.capped;
            out.note = "lambda capped at bracket edge";
        } else {
            lam_hat = detail::toms748_root(g, br.lo, br.hi, br.glo, br.ghi, out.iterations);
        }
    }
    const auto in = inner(lam_hat);
    out.theta = {lam_hat, in.mu, in.sigma};
    return out;
}

// Generalized gamma: gamma fit on (x / g)^rho for given rho, outer rho root.
Partial gg_fit(std::span<const double> x, std::optional<double> lam, std::optional<double> beta,
               std::optional<double> rho, const FitOptions& opts) {
    Partial out;
    double lg = 0.0;
    for (double v : x) lg += std::log(v);
    const double gscale = std::exp(lg / static_cast<double>(x.size()));
    std::vector<double> v(x.size());
    auto inner = [&](double r) {
        for (std::size_t i = 0; i < x.size(); ++i) v[i] = std::pow(x[i] / gscale, r);
        std::optional<double> sc;
        if (beta) sc = std::pow(*beta / gscale, r);
        const auto gf = gamma_fit(v, lam, sc, opts);
        out.iterations += gf.evals;
        if (gf.capped) out.capped = gf.capped;
        return std::pair{gf.shape, gscale * std::pow(gf.scale, 1.0 / r)};
    };
    double r_hat;
    if (rho) {
        r_hat = *rho;
    } else {
        auto g = [&](double r) {
            out.capped = 0;
            const auto [l, b] = inner(r);
            double acc = 0.0;
            for (double e : x) {
                const double lz = std::log(e / b);
                acc += 1.0 / r + l * lz - std::exp(r * lz) * lz;
            }
            return acc / static_cast<double>(x.size()) * r;
        };
        const auto br = detail::bracket_down(g, 1.0, opts.shape_lo, opts.shape_hi, out.iterations);
        if (br.capped) {
            r_hat = br.lo;
            out.capped = br.capped;
        } else {
            r_hat = detail::toms748_root(g, br.lo, br.hi, br.glo, br.ghi, out.iterations);
        }
    }
    out.capped = 0;
    const auto [l, b] = inner(r_hat);
    if (out.capped) out.note = "shape capped at bracket edge";
    out.theta = {l, b, r_hat};
    return out;
}

// ---------------------------------------------------------------- generic solver

// Small dense solve by Gaussian elimination with partial pivoting.
bool solve_small(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
    const int k = static_cast<int>(b.size());
    for (int c = 0; c < k; ++c) {
        int piv = c;
        for (int r = c + 1; r < k; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        if (!(std::fabs(a[piv][c]) > 1e-300)) return false;
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (int r = c + 1; r < k; ++r) {
            const double f = a[r][c] / a[c][c];
            for (int j = c; j < k; ++j) a[r][j] -= f * a[c][j];
            b[r] -= f * b[c];
        }
    }
    x.assign(k, 0.0);
    for (int r = k - 1; r >= 0; --r) {
        double s = b[r];
        for (int j = r + 1; j < k; ++j) s -= a[r][j] * x[j];
        x[r] = s / a[r][r];
    }
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

// Normalized mean estimating equations over the unknown components.
std::vector<double> normalized_equations(FamilyId fam, EstimatorKind kind, const ParamVector& t,
                                         std::span<const double> x, const std::vector<int>& u) {
    std::array<double, 3> s{};
    std::array<double, 3> acc{};
    for (double v : x) {
        estimating_into(fam, kind, t, v, s.data());
        for (int j = 0; j < static_cast<int>(t.size()); ++j) acc[j] += s[j];
    }
    std::vector<double> out;
    const double n = static_cast<double>(x.size());
    for (int j : u) {
        const double w = param_scale(fam, t, j);
        out.push_back(kind == EstimatorKind::ml ? acc[j] / n * w : acc[j] / n / w);
    }
    return out;
}

bool theta_valid(FamilyId fam, const ParamVector& t) {
    try {
        validate(fam, t);
        return true;
    } catch (const DomainError&) {
        return false;
    }
}

// Damped Newton on the normalized equations in (log-)transformed coordinates,
// with a log-likelihood (ML) or squared-residual (MM) merit.
Partial solve_generic(const Ctx& c, ParamVector start) {
    const auto u = c.mask.unknown_indices();
    const int k = static_cast<int>(u.size());
    ParamVector t = c.mask.apply(std::move(start));
    Partial out;
    auto to_theta = [&](const std::vector<double>& phi) {
        ParamVector r = t;
        for (int i = 0; i < k; ++i) r[u[i]] = real_param(c.fam, u[i]) ? phi[i] : std::exp(phi[i]);
        return r;
    };
    std::vector<double> phi(k);
    for (int i = 0; i < k; ++i) {
        const double v = t[u[i]];
        phi[i] = real_param(c.fam, u[i]) ? v : std::log(v > 0.0 ? v : 1.0);
    }
    auto merit = [&](const ParamVector& th, const std::vector<double>& f) {
        if (c.kind == EstimatorKind::ml) return log_likelihood(c.fam, th, c.x) / static_cast<double>(c.x.size());
        double s = 0.0;
        for (double v : f) s += v * v;
        return -s;
    };
    auto eqs = [&](const ParamVector& th) { return normalized_equations(c.fam, c.kind, th, c.x, u); };
    auto max_abs = [](const std::vector<double>& f) {
        double m = 0.0;
        for (double v : f) m = std::max(m, std::fabs(v));
        return m;
    };
    ParamVector th = to_theta(phi);
    if (!theta_valid(c.fam, th)) throw EstimationError("invalid starting point", inf);
    std::vector<double> f = eqs(th);
    double m = merit(th, f);
    for (int it = 0; it < c.opts.max_iter; ++it) {
        ++out.iterations;
        if (max_abs(f) <= 1e-2 * c.opts.residual_tol) break;
        // Numerical Jacobian of the normalized equations in phi.
        std::vector<std::vector<double>> jac(k, std::vector<double>(k));
        bool jac_ok = true;
        for (int j = 0; j < k; ++j) {
            const double h = 1e-6 * (1.0 + std::fabs(phi[j]));
            auto pp = phi;
            auto pm = phi;
            pp[j] += h;
            pm[j] -= h;
            const ParamVector tp = to_theta(pp);
            const ParamVector tm = to_theta(pm);
            if (!theta_valid(c.fam, tp) || !theta_valid(c.fam, tm)) {
                jac_ok = false;
                break;
            }
            const auto fp = eqs(tp);
            const auto fm = eqs(tm);
            for (int i = 0; i < k; ++i) jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
        std::vector<double> step;
        std::vector<double> neg(k);
        for (int i = 0; i < k; ++i) neg[i] = -f[i];
        if (!jac_ok || !solve_small(jac, neg, step)) step = f;
        if (c.kind == EstimatorKind::ml) {
            // Gradient of the mean log-likelihood in phi equals the normalized
            // equations up to the positive scale for location components.
            double dir = 0.0;
            for (int i = 0; i < k; ++i) dir += step[i] * f[i];
            if (!(dir > 0.0)) step = f;
        }
        double alpha = 1.0;
        bool accepted = false;
        std::vector<double> phi_new;
        for (int ls = 0; ls < 60; ++ls) {
            phi_new = phi;
            for (int i = 0; i < k; ++i) phi_new[i] += alpha * step[i];
            const ParamVector tn = to_theta(phi_new);
            if (theta_valid(c.fam, tn)) {
                const auto fn = eqs(tn);
                bool finite = true;
                for (double v : fn) finite = finite && std::isfinite(v);
                const double mn = finite ? merit(tn, fn) : -inf;
                if (std::isfinite(mn) &&
                    (mn > m || (mn >= m - 1e-14 * (1.0 + std::fabs(m)) && max_abs(fn) < max_abs(f)))) {
                    th = tn;
                    f = fn;
                    m = mn;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
        double move = 0.0;
        for (int i = 0; i < k; ++i) move = std::max(move, std::fabs(phi_new[i] - phi[i]) / (1.0 + std::fabs(phi[i])));
        phi = phi_new;
        if (move <= c.opts.step_tol && max_abs(f) <= c.opts.residual_tol) break;
    }
    out.theta = th;
    return out;
}

// ---------------------------------------------------------------- family dispatch

std::optional<double> known(const KnownMask& m, int j) {
    if (m.is_known(j)) return m.value(j);
    return std::nullopt;
}

Partial fit_mm(const Ctx& c) {
    const auto& m = c.mask;
    const FamilyId fam = c.fam;
    Partial out;
    const int shape = mm_shape_index(fam);
    if (shape >= 0 && !m.is_known(shape)) {
        throw ConfigError(std::string(family_name(fam)) + ": MM estimation requires the shape parameter '" +
                          std::string(info(fam).params[shape]) + "' to be known");
    }
    switch (fam) {
        case epd:
        case log_epd:
        case laplace:
        case log_laplace:
        case normal:
        case log_normal:
        case logistic:
        case student_t: {
            std::vector<double> z;
            std::span<const double> zs = c.x;
            if (is_log_family(fam)) {
                z = mapped(c.x, [](double v) { return std::log(v); });
                zs = z;
            }
            const int off = (fam == epd || fam == log_epd || fam == student_t) ? 1 : 0;
            ParamVector t(arity(fam), 0.0);
            if (off) t[0] = m.value(0);
            const double mu = m.is_known(off) ? m.value(off) : mean_of(zs);
            double sigma;
            if (m.is_known(off + 1)) {
                sigma = m.value(off + 1);
            } else if (fam == student_t) {
                double acc = 0.0;
                for (double v : zs) acc += std::fabs(v - mu);
                sigma = acc / static_cast<double>(zs.size()) / student_mm_c2(t[0]);
            } else {
                sigma = std::sqrt(mm_var_constant(fam, t) * msd(zs, mu));
            }
            t[off] = mu;
            t[off + 1] = sigma;
            out.theta = t;
            return out;
        }
        case half_epd:
            out.theta = {m.value(0), m.is_known(1) ? m.value(1) : half_epd_mm_c2(m.value(0)) * mean_of(c.x)};
            return out;
        case log_logistic: {
            const auto z = mapped(c.x, [](double v) { return std::log(v); });
            const double lb = m.is_known(0) ? std::log(m.value(0)) : mean_of(z);
            const double rho = m.is_known(1) ? m.value(1) : std::sqrt(pi * pi / (3.0 * msd(z, lb)));
            out.theta = {std::exp(lb), rho};
            return out;
        }
        case exponential: out.theta = {mean_of(c.x)}; return out;
        case half_normal: out.theta = {std::sqrt(pi / 2.0) * mean_of(c.x)}; return out;
        case rayleigh: out.theta = {std::sqrt(2.0 / pi) * mean_of(c.x)}; return out;
        case maxwell_boltzmann: out.theta = {std::sqrt(pi / 8.0) * mean_of(c.x)}; return out;
        case chi_squared: out.theta = {mean_of(c.x)}; return out;
        default: break;
    }
    throw ConfigError(std::string(family_name(fam)) + " has no MM estimator");
}

ParamVector heuristic_start(FamilyId fam, std::span<const double> x) {
    const double xbar = mean_of(x);
    const double var = msd(x, xbar);
    switch (fam) {
        case beta:
        case kumaraswamy: {
            const double common = std::max(xbar * (1.0 - xbar) / var - 1.0, 1e-2);
            return {std::max(xbar * common, 1e-2), std::max((1.0 - xbar) * common, 1e-2)};
        }
        case beta_prime: {
            const double v = xbar * (1.0 + xbar) / std::max(var, 1e-12);
            return {std::max(xbar * (v + 1.0), 0.1), std::max(v + 2.0, 0.1)};
        }
        case lomax: return {2.0, xbar};
        case gompertz: return {1.0 / xbar, 1.0};
        default: break;
    }
    ParamVector t(arity(fam), 1.0);
    return t;
}

// Native ML fits; std::nullopt means the mask needs the generic solver.
std::optional<Partial> fit_ml_native(const Ctx& c) {
    const auto& m = c.mask;
    const FamilyId fam = c.fam;
    const auto x = c.x;
    Partial out;
    switch (fam) {
        case normal:
        case log_normal:
        case laplace:
        case log_laplace: {
            std::vector<double> z;
            std::span<const double> zs = x;
            if (is_log_family(fam)) {
                z = mapped(x, [](double v) { return std::log(v); });
                zs = z;
            }
            const bool lap = log_base(fam) == laplace;
            const double mu = m.is_known(0) ? m.value(0) : (lap ? median(zs) : mean_of(zs));
            double sigma;
            if (m.is_known(1)) {
                sigma = m.value(1);
            } else if (lap) {
                double acc = 0.0;
                for (double v : zs) acc += std::fabs(v - mu);
                sigma = acc / static_cast<double>(zs.size());
            } else {
                sigma = std::sqrt(msd(zs, mu));
            }
            out.theta = {mu, sigma};
            return out;
        }
        case epd:
        case log_epd: {
            std::vector<double> z;
            std::span<const double> zs = x;
            if (fam == log_epd) {
                z = mapped(x, [](double v) { return std::log(v); });
                zs = z;
            }
            return epd_fit(zs, known(m, 0), known(m, 1), known(m, 2), c.opts);
        }
        case half_epd: {
            auto r = epd_fit(x, known(m, 0), 0.0, known(m, 1), c.opts);
            r.theta = {r.theta[0], r.theta[2]};
            return r;
        }
        case exp_gamma: {
            if (!m.none_known()) return std::nullopt;
            const double xmax = *std::max_element(x.begin(), x.end());
            std::vector<double> v(x.size());
            int capped = 0;
            auto inner = [&](double s) {
                for (std::size_t i = 0; i < x.size(); ++i) v[i] = std::exp((x[i] - xmax) / s);
                const auto gf = gamma_fit(v, std::nullopt, std::nullopt, c.opts);
                out.iterations += gf.evals;
                capped = gf.capped;
                return ParamVector{gf.shape, xmax + s * std::log(gf.scale), s};
            };
            auto h = [&](double s) {
                const ParamVector t = inner(s);
                double acc = 0.0;
                for (double e : x) {
                    const double y = (e - t[1]) / s;
                    acc += -1.0 - t[0] * y + y * std::exp(y);
                }
                return acc / static_cast<double>(x.size());
            };
            const double sd = sd_of(x);
            const auto br = detail::bracket_down(h, sd * std::sqrt(6.0) / pi, sd * 1e-6, sd * 1e6, out.iterations);
            double s_hat;
            if (br.capped) {
                s_hat = br.lo;
                out.capped = br.capped;
            } else {
                s_hat = detail::toms748_root(h, br.lo, br.hi, br.glo, br.ghi, out.iterations);
            }
            out.theta = inner(s_hat);
            if (capped) out.capped = capped;
            if (out.capped) out.note = "lambda capped at bracket edge (ML estimate diverges)";
            return out;
        }
        case exp_weibull:
        case gumbel:
        case weibull:
        case frechet: {
            // All reduce to exp-Weibull(mu, sigma) on a transformed sample.
            if (m.is_known(0) && !m.is_known(1)) return std::nullopt;
            std::vector<double> z(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                switch (fam) {
                    case exp_weibull: z[i] = x[i]; break;
                    case gumbel: z[i] = -x[i]; break;
                    case weibull: z[i] = std::log(x[i]); break;
                    default: z[i] = -std::log(x[i]); break;
                }
            }
            std::optional<double> sig;
            if (m.is_known(1)) sig = (fam == weibull || fam == frechet) ? 1.0 / m.value(1) : m.value(1);
            auto r = exp_weibull_fit(z, sig, out.iterations);
            const double mu = r.theta[0];
            const double s = r.theta[1];
            switch (fam) {
                case exp_weibull: out.theta = {m.is_known(0) ? m.value(0) : mu, s}; break;
                case gumbel: out.theta = {m.is_known(0) ? m.value(0) : -mu, s}; break;
                case weibull: out.theta = {m.is_known(0) ? m.value(0) : std::exp(mu), 1.0 / s}; break;
                default: out.theta = {m.is_known(0) ? m.value(0) : std::exp(-mu), 1.0 / s}; break;
            }
            if (m.is_known(1)) out.theta[1] = m.value(1);
            return out;
        }
        case logistic:
        case log_logistic: {
            if (m.is_known(0) && !m.is_known(1)) return std::nullopt;
            std::vector<double> z;
            std::span<const double> zs = x;
            if (fam == log_logistic) {
                z = mapped(x, [](double v) { return std::log(v); });
                zs = z;
            }
            std::optional<double> sig;
            if (m.is_known(1)) sig = fam == log_logistic ? 1.0 / m.value(1) : m.value(1);
            auto r = logistic_fit(zs, sig, out.iterations);
            if (fam == logistic) {
                out.theta = {r.theta[0], m.is_known(1) ? m.value(1) : r.theta[1]};
            } else {
                out.theta = {std::exp(r.theta[0]), m.is_known(1) ? m.value(1) : 1.0 / r.theta[1]};
            }
            return out;
        }
        case student_t:
            return student_fit(x, known(m, 0), known(m, 1), known(m, 2), c.opts);
        case gg:
            return gg_fit(x, known(m, 0), known(m, 1), known(m, 2), c.opts);
        case gompertz: {
            if (m.is_known(1) && !m.is_known(0)) return std::nullopt;
            auto rho_of = [&](double b) {
                double acc = 0.0;
                for (double v : x) acc += std::expm1(b * v);
                return static_cast<double>(x.size()) / acc;
            };
            double b;
            if (m.is_known(0)) {
                b = m.value(0);
            } else {
                const double xbar = mean_of(x);
                auto h = [&](double bb) {
                    const double r = rho_of(bb);
                    double acc = 0.0;
                    for (double v : x) acc += v * std::exp(bb * v);
                    return (1.0 / bb + xbar - r * acc / static_cast<double>(x.size())) * bb;
                };
                const auto br = detail::bracket_down(h, 1.0 / xbar, 1e-8 / xbar, 1e4 / xbar, out.iterations);
                if (br.capped) throw EstimationError("gompertz: no root for the beta equation", br.glo);
                b = detail::toms748_root(h, br.lo, br.hi, br.glo, br.ghi, out.iterations);
            }
            out.theta = {b, m.is_known(1) ? m.value(1) : rho_of(b)};
            return out;
        }
        case gamma:
        case inverse_gamma:
        case nakagami: {
            if (fam == nakagami && m.is_known(1) && !m.is_known(0)) return std::nullopt;
            std::vector<double> v(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                v[i] = fam == gamma ? x[i] : (fam == inverse_gamma ? 1.0 / x[i] : x[i] * x[i]);
            }
            std::optional<double> sc;
            if (m.is_known(1) && fam != nakagami) sc = fam == gamma ? m.value(1) : 1.0 / m.value(1);
            const auto gf = gamma_fit(v, known(m, 0), sc, c.opts);
            out.iterations = gf.evals;
            out.capped = gf.capped;
            if (gf.capped) out.note = "shape capped at bracket edge";
            if (fam == gamma) out.theta = {gf.shape, gf.scale};
            else if (fam == inverse_gamma) out.theta = {gf.shape, 1.0 / gf.scale};
            else out.theta = {gf.shape, mean_of(v)};
            out.theta = m.apply(out.theta);
            return out;
        }
        case lomax: {
            if (m.is_known(0) && !m.is_known(1)) return std::nullopt;
            auto alpha_of = [&](double s) {
                double acc = 0.0;
                for (double v : x) acc += std::log1p(v / s);
                return static_cast<double>(x.size()) / acc;
            };
            double s;
            if (m.is_known(1)) {
                s = m.value(1);
            } else {
                const double xbar = mean_of(x);
                auto h = [&](double sg) {
                    const double a = alpha_of(sg);
                    double acc = 0.0;
                    for (double v : x) acc += v / (sg + v);
                    return -1.0 + (a + 1.0) * acc / static_cast<double>(x.size());
                };
                const auto br = detail::bracket_down(h, xbar, xbar * 1e-6, xbar * 1e6, out.iterations);
                if (br.capped) {
                    s = br.lo;
                    out.capped = br.capped;
                    out.note = "sigma capped at bracket edge (no interior ML estimate)";
                } else {
                    s = detail::toms748_root(h, br.lo, br.hi, br.glo, br.ghi, out.iterations);
                }
            }
            out.theta = {m.is_known(0) ? m.value(0) : alpha_of(s), s};
            return out;
        }
        case inverse_gaussian: {
            const double mu = m.is_known(0) ? m.value(0) : mean_of(x);
            double lam;
            if (m.is_known(1)) {
                lam = m.value(1);
            } else {
                double acc = 0.0;
                for (double v : x) acc += (v - mu) * (v - mu) / (mu * mu * v);
                lam = static_cast<double>(x.size()) / acc;
            }
            out.theta = {mu, lam};
            return out;
        }
        case exponential: out.theta = {mean_of(x)}; return out;
        case half_normal:
        case rayleigh:
        case maxwell_boltzmann: {
            const double c2 = fam == half_normal ? 1.0 : (fam == rayleigh ? 2.0 : 3.0);
            double acc = 0.0;
            for (double v : x) acc += v * v;
            out.theta = {std::sqrt(acc / static_cast<double>(x.size()) / c2)};
            return out;
        }
        case chi_squared: {
            double ml = 0.0;
            for (double v : x) ml += std::log(0.5 * v);
            ml /= static_cast<double>(x.size());
            auto fg = [&](double t) {
                const double k = std::exp(t);
                return std::pair{digamma(0.5 * k) - ml, 0.5 * k * trigamma(0.5 * k)};
            };
            const double tlo = std::log(c.opts.shape_lo);
            const double thi = std::log(c.opts.shape_hi);
            if (fg(thi).first <= 0.0 || fg(tlo).first >= 0.0) throw EstimationError("chi-squared: k outside bracket", ml);
            out.theta = {std::exp(detail::bracketed_newton(fg, tlo, thi, std::log(mean_of(x)), 1e-15))};
            return out;
        }
        case pareto: {
            double acc = 0.0;
            for (double v : x) acc += std::log(v);
            out.theta = {static_cast<double>(x.size()) / acc};
            return out;
        }
        case beta_prime: {
            if (!m.none_known()) return std::nullopt;
            const auto v = mapped(x, [](double e) { return e / (1.0 + e); });
            const KnownMask nm = KnownMask::none(beta);
            const FitOptions& o = c.opts;
            const Ctx bc{beta, EstimatorKind::ml, nm, v, o};
            return solve_generic(bc, heuristic_start(beta, v));
        }
        case kumaraswamy: {
            if (m.is_known(1) && !m.is_known(0)) return std::nullopt;
            auto beta_of = [&](double a) {
                double acc = 0.0;
                for (double v : x) acc += std::log(-std::expm1(a * std::log(v)));
                return -static_cast<double>(x.size()) / acc;
            };
            double a;
            if (m.is_known(0)) {
                a = m.value(0);
            } else {
                double ml = 0.0;
                for (double v : x) ml += std::log(v);
                ml /= static_cast<double>(x.size());
                auto h = [&](double aa) {
                    const double b = beta_of(aa);
                    double acc = 0.0;
                    for (double v : x) {
                        const double lx = std::log(v);
                        acc += std::exp(aa * lx) * lx / (-std::expm1(aa * lx));
                    }
                    return (1.0 / aa + ml - (b - 1.0) * acc / static_cast<double>(x.size())) * aa;
                };
                const auto br = detail::bracket_down(h, 1.0, c.opts.shape_lo, c.opts.shape_hi, out.iterations);
                if (br.capped) throw EstimationError("kumaraswamy: no root for the alpha equation", br.glo);
                a = detail::toms748_root(h, br.lo, br.hi, br.glo, br.ghi, out.iterations);
            }
            out.theta = {a, m.is_known(1) ? m.value(1) : beta_of(a)};
            return out;
        }
        case uniform: {
            const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
            out.theta = {m.is_known(0) ? m.value(0) : *lo, m.is_known(1) ? m.value(1) : *hi};
            return out;
        }
        default: break;
    }
    return std::nullopt;
}

// Components excluded from the residual: non-differentiable scores at the
// estimate (sample medians and order statistics).
bool nonsmooth(FamilyId fam, EstimatorKind kind, const ParamVector& t, int j) {
    if (kind != EstimatorKind::ml) return false;
    switch (fam) {
        case laplace:
        case log_laplace: return j == 0;
        case epd:
        case log_epd: return j == 1 && t[0] <= 1.0;
        case uniform: return true;
        default: return false;
    }
}

double residual_of(const Ctx& c, const ParamVector& t) {
    std::vector<int> u;
    for (int j : c.mask.unknown_indices())
        if (!nonsmooth(c.fam, c.kind, t, j)) u.push_back(j);
    if (u.empty()) return 0.0;
    const auto f = normalized_equations(c.fam, c.kind, t, c.x, u);
    double r = 0.0;
    for (double v : f) r = std::max(r, std::isfinite(v) ? std::fabs(v) : inf);
    return r;
}

}  // namespace

bool has_estimator(FamilyId fam, EstimatorKind kind) { return kind == EstimatorKind::ml || info(fam).has_mm; }

bool supports_mask(FamilyId fam, EstimatorKind kind, const KnownMask& mask) {
    if (mask.size() != arity(fam)) return false;
    if (!has_estimator(fam, kind)) return false;
    if (kind == EstimatorKind::mm) {
        const int shape = mm_shape_index(fam);
        if (shape >= 0 && !mask.is_known(shape)) return false;
        if (fam == student_t && !(mask.value(0) > 2.0)) return false;
    }
    return true;
}

std::vector<double> score(FamilyId fam, const ParamVector& theta, double x) {
    validate(fam, theta);
    if (!in_support(fam, theta, x)) throw DomainError("score: observation outside the support");
    std::vector<double> s(theta.size());
    score_into(fam, theta, x, s.data());
    return s;
}

std::vector<double> estimating_function(FamilyId fam, EstimatorKind kind, const ParamVector& theta, double x) {
    validate(fam, theta);
    if (!has_estimator(fam, kind)) throw ConfigError(std::string(family_name(fam)) + " has no MM estimator");
    if (!in_support(fam, theta, x)) throw DomainError("estimating function: observation outside the support");
    std::vector<double> s(theta.size());
    estimating_into(fam, kind, theta, x, s.data());
    return s;
}

double log_likelihood(FamilyId fam, const ParamVector& theta, std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += trigof::log_pdf(fam, theta, v);
    return s;
}

FitResult fit(FamilyId fam, EstimatorKind kind, const KnownMask& mask, std::span<const double> x,
              const FitOptions& opts) {
    if (mask.size() != arity(fam)) throw ConfigError("known-parameter mask does not match the family arity");
    if (!has_estimator(fam, kind)) {
        throw ConfigError(std::string(family_name(fam)) + " has no MM estimator");
    }
    check_data(fam, mask, x);
    FitResult res;
    if (mask.all_known()) {
        res.theta = mask.apply(ParamVector(arity(fam), 0.0));
        validate(fam, res.theta);
        res.converged = true;
        return res;
    }
    const int p_unknown = mask.unknown_count();
    if (static_cast<int>(x.size()) < p_unknown + 1) {
        throw DegenerateSampleError("need at least " + std::to_string(p_unknown + 1) + " observations");
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) {
        throw DegenerateSampleError("all observations are equal");
    }
    if (kind == EstimatorKind::mm && fam == student_t && mask.is_known(0) && !(mask.value(0) > 2.0)) {
        throw ConfigError("student-t: MM estimation requires lambda > 2");
    }

    const Ctx c{fam, kind, mask, x, opts};
    Partial p;
    if (kind == EstimatorKind::mm) {
        p = fit_mm(c);
    } else if (auto native = fit_ml_native(c)) {
        p = std::move(*native);
    } else {
        ParamVector start;
        try {
            const auto full = fit_ml_native(Ctx{fam, kind, KnownMask::none(fam), x, opts});
            if (full) start = full->theta;
        } catch (const Error&) {
        }
        if (start.empty() || !theta_valid(fam, mask.apply(start))) start = heuristic_start(fam, x);
        p = solve_generic(c, start);
    }
    p.theta = mask.apply(p.theta);
    validate(fam, p.theta);

    double r = residual_of(c, p.theta);
    if (!(r <= opts.residual_tol) && !p.capped) {
        // Polish with the generic solver from the nested estimate.
        Partial q = solve_generic(c, p.theta);
        q.theta = mask.apply(q.theta);
        const double rq = residual_of(c, q.theta);
        if (rq < r) {
            q.iterations += p.iterations;
            p = std::move(q);
            r = rq;
        }
    }
    res.theta = p.theta;
    res.iterations = p.iterations;
    res.residual = r;
    res.note = p.note;
    if (p.capped) {
        res.converged = false;
        return res;
    }
    res.converged = r <= opts.residual_tol;
    if (!res.converged) {
        throw EstimationError(std::string(family_name(fam)) + ": estimating equations not solved (residual " +
                                  std::to_string(r) + ")",
                              r);
    }
    return res;
}

}  // namespace trigof
