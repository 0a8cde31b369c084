#include "trigof/families.hpp"

#include "trigof/detail/newton.hpp"
#include "trigof/errors.hpp"
#include "trigof/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace trigof {

namespace {

using specfun::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

using enum FamilyId;

const std::array<FamilyInfo, family_count>& registry() {
    static const std::array<FamilyInfo, family_count> table = {{
        {epd, "epd", {"lambda", "mu", "sigma"}, Support::real_line, true, 1, 2},
        {laplace, "laplace", {"mu", "sigma"}, Support::real_line, true, 0, 1},
        {normal, "normal", {"mu", "sigma"}, Support::real_line, true, 0, 1},
        {exp_gamma, "exp-gamma", {"lambda", "mu", "sigma"}, Support::real_line, false, 1, 2},
        {exp_weibull, "exp-weibull", {"mu", "sigma"}, Support::real_line, false, 0, 1},
        {gumbel, "gumbel", {"mu", "sigma"}, Support::real_line, false, 0, 1},
        {logistic, "logistic", {"mu", "sigma"}, Support::real_line, true, 0, 1},
        {student_t, "student-t", {"lambda", "mu", "sigma"}, Support::real_line, true, 1, 2},
        {log_epd, "log-epd", {"lambda", "mu", "sigma"}, Support::positive, true, -1, -1},
        {log_laplace, "log-laplace", {"mu", "sigma"}, Support::positive, true, -1, -1},
        {log_normal, "log-normal", {"mu", "sigma"}, Support::positive, true, -1, -1},
        {half_epd, "half-epd", {"lambda", "sigma"}, Support::positive, true, -1, 1},
        {gg, "gg", {"lambda", "beta", "rho"}, Support::positive, false, -1, 1},
        {weibull, "weibull", {"beta", "rho"}, Support::positive, false, -1, 0},
        {frechet, "frechet", {"beta", "rho"}, Support::positive, false, -1, 0},
        {gompertz, "gompertz", {"beta", "rho"}, Support::positive, false, -1, -1},
        {log_logistic, "log-logistic", {"beta", "rho"}, Support::positive, true, -1, 0},
        {gamma, "gamma", {"lambda", "beta"}, Support::positive, false, -1, 1},
        {inverse_gamma, "inverse-gamma", {"lambda", "beta"}, Support::positive, false, -1, 1},
        {beta_prime, "beta-prime", {"alpha", "beta"}, Support::positive, false, -1, -1},
        {lomax, "lomax", {"alpha", "sigma"}, Support::positive, false, -1, 1},
        {nakagami, "nakagami", {"lambda", "omega"}, Support::positive, false, -1, -1},
        {inverse_gaussian, "inverse-gaussian", {"mu", "lambda"}, Support::positive, false, -1, -1},
        {exponential, "exponential", {"beta"}, Support::positive, true, -1, 0},
        {half_normal, "half-normal", {"delta"}, Support::positive, true, -1, 0},
        {rayleigh, "rayleigh", {"delta"}, Support::positive, true, -1, 0},
        {maxwell_boltzmann, "maxwell-boltzmann", {"delta"}, Support::positive, true, -1, 0},
        {chi_squared, "chi-squared", {"k"}, Support::positive, true, -1, -1},
        {pareto, "pareto", {"alpha"}, Support::above_one, false, -1, -1},
        {beta, "beta", {"alpha", "beta"}, Support::unit, false, -1, -1},
        {kumaraswamy, "kumaraswamy", {"alpha", "beta"}, Support::unit, false, -1, -1},
        {uniform, "uniform", {"a", "b"}, Support::interval, false, -1, -1},
    }};
    return table;
}

const std::array<FamilyId, family_count>& id_list() {
    static const std::array<FamilyId, family_count> ids = [] {
        std::array<FamilyId, family_count> out{};
        for (int i = 0; i < family_count; ++i) out[i] = registry()[i].id;
        return out;
    }();
    return ids;
}

void need_pos(FamilyId fam, const ParamVector& t, int i) {
    if (!(t[i] > 0.0) || !std::isfinite(t[i])) {
        throw DomainError(std::string(family_name(fam)) + ": parameter '" + std::string(info(fam).params[i]) +
                          "' must be finite and > 0");
    }
}

void need_finite(FamilyId fam, const ParamVector& t, int i) {
    if (!std::isfinite(t[i])) {
        throw DomainError(std::string(family_name(fam)) + ": parameter '" + std::string(info(fam).params[i]) +
                          "' must be finite");
    }
}

// Base family for the log-transformed ones.
FamilyId log_base(FamilyId fam) {
    switch (fam) {
        case log_epd: return epd;
        case log_laplace: return laplace;
        case log_normal: return normal;
        default: return fam;
    }
}

bool is_log_family(FamilyId fam) { return fam == log_epd || fam == log_laplace || fam == log_normal; }

double clamp01(double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }

// ln of the EPD normalizing constant 2 lambda^{1/lambda - 1} Gamma(1/lambda).
double epd_log_norm(double lambda) {
    return std::log(2.0) + (1.0 / lambda - 1.0) * std::log(lambda) + specfun::ln_gamma(1.0 / lambda);
}

double log_pdf_unchecked(FamilyId fam, const ParamVector& t, double x) {
    if (is_log_family(fam)) {
        if (!(x > 0.0)) return -inf;
        const double lx = std::log(x);
        return log_pdf_unchecked(log_base(fam), t, lx) - lx;
    }
    const auto [lo, hi] = support_bounds(fam, t);
    if (!(x >= lo && x <= hi) || std::isnan(x)) return -inf;
    switch (fam) {
        case epd: {
            const double y = std::fabs(x - t[1]) / t[2];
            return -std::log(t[2]) - epd_log_norm(t[0]) - std::pow(y, t[0]) / t[0];
        }
        case laplace:
            return -std::log(2.0 * t[1]) - std::fabs(x - t[0]) / t[1];
        case normal: {
            const double y = (x - t[0]) / t[1];
            return -std::log(t[1]) - 0.5 * std::log(2.0 * pi) - 0.5 * y * y;
        }
        case exp_gamma: {
            const double y = (x - t[1]) / t[2];
            return -std::log(t[2]) - specfun::ln_gamma(t[0]) + t[0] * y - std::exp(y);
        }
        case exp_weibull: {
            const double y = (x - t[0]) / t[1];
            return -std::log(t[1]) + y - std::exp(y);
        }
        case gumbel: {
            const double y = (x - t[0]) / t[1];
            return -std::log(t[1]) - y - std::exp(-y);
        }
        case logistic: {
            const double y = std::fabs(x - t[0]) / t[1];
            return -std::log(t[1]) - y - 2.0 * std::log1p(std::exp(-y));
        }
        case student_t: {
            const double lam = t[0];
            const double y = (x - t[1]) / t[2];
            const double lc = specfun::ln_gamma(0.5 * (lam + 1.0)) - 0.5 * std::log(lam * pi) -
                              specfun::ln_gamma(0.5 * lam);
            return -std::log(t[2]) + lc - 0.5 * (lam + 1.0) * std::log1p(y * y / lam);
        }
        case half_epd: {
            if (x <= 0.0) return -inf;
            const double y = x / t[1];
            return -std::log(t[1]) - epd_log_norm(t[0]) + std::log(2.0) - std::pow(y, t[0]) / t[0];
        }
        case gg: {
            if (x <= 0.0) return -inf;
            const double lz = std::log(x / t[1]);
            return std::log(t[2]) - std::log(x) - specfun::ln_gamma(t[0]) + t[0] * t[2] * lz - std::exp(t[2] * lz);
        }
        case weibull: {
            if (x <= 0.0) return -inf;
            const double lz = std::log(x / t[0]);
            return std::log(t[1]) - std::log(x) + t[1] * lz - std::exp(t[1] * lz);
        }
        case frechet: {
            if (x <= 0.0) return -inf;
            const double lz = std::log(x / t[0]);
            return std::log(t[1]) - std::log(x) - t[1] * lz - std::exp(-t[1] * lz);
        }
        case gompertz: {
            if (x < 0.0) return -inf;
            return std::log(t[0]) + std::log(t[1]) + t[1] + t[0] * x - t[1] * std::exp(t[0] * x);
        }
        case log_logistic: {
            if (x <= 0.0) return -inf;
            const double lz = t[1] * std::log(x / t[0]);
            const double soft = lz > 0.0 ? lz + std::log1p(std::exp(-lz)) : std::log1p(std::exp(lz));
            return std::log(t[1]) - std::log(x) + lz - 2.0 * soft;
        }
        case gamma: {
            if (x <= 0.0) return -inf;
            return (t[0] - 1.0) * std::log(x) - x / t[1] - t[0] * std::log(t[1]) - specfun::ln_gamma(t[0]);
        }
        case inverse_gamma: {
            if (x <= 0.0) return -inf;
            return t[0] * std::log(t[1]) - specfun::ln_gamma(t[0]) - (t[0] + 1.0) * std::log(x) - t[1] / x;
        }
        case beta_prime: {
            if (x <= 0.0) return -inf;
            const double lb = specfun::ln_gamma(t[0]) + specfun::ln_gamma(t[1]) - specfun::ln_gamma(t[0] + t[1]);
            return (t[0] - 1.0) * std::log(x) - (t[0] + t[1]) * std::log1p(x) - lb;
        }
        case lomax: {
            if (x < 0.0) return -inf;
            return std::log(t[0] / t[1]) - (t[0] + 1.0) * std::log1p(x / t[1]);
        }
        case nakagami: {
            if (x <= 0.0) return -inf;
            const double r = t[0] / t[1];
            return std::log(2.0) - specfun::ln_gamma(t[0]) + t[0] * std::log(r) + (2.0 * t[0] - 1.0) * std::log(x) -
                   r * x * x;
        }
        case inverse_gaussian: {
            if (x <= 0.0) return -inf;
            const double d = x - t[0];
            return 0.5 * std::log(t[1] / (2.0 * pi * x * x * x)) - t[1] * d * d / (2.0 * t[0] * t[0] * x);
        }
        case exponential:
            if (x < 0.0) return -inf;
            return -std::log(t[0]) - x / t[0];
        case half_normal: {
            if (x < 0.0) return -inf;
            const double y = x / t[0];
            return 0.5 * std::log(2.0 / pi) - std::log(t[0]) - 0.5 * y * y;
        }
        case rayleigh: {
            if (x < 0.0) return -inf;
            const double y = x / t[0];
            return std::log(x) - 2.0 * std::log(t[0]) - 0.5 * y * y;
        }
        case maxwell_boltzmann: {
            if (x < 0.0) return -inf;
            const double y = x / t[0];
            return 2.0 * std::log(x) - 3.0 * std::log(t[0]) + 0.5 * std::log(2.0 / pi) - 0.5 * y * y;
        }
        case chi_squared: {
            if (x <= 0.0) return -inf;
            const double h = 0.5 * t[0];
            return -specfun::ln_gamma(h) - h * std::log(2.0) + (h - 1.0) * std::log(x) - 0.5 * x;
        }
        case pareto:
            if (x < 1.0) return -inf;
            return std::log(t[0]) - (t[0] + 1.0) * std::log(x);
        case beta: {
            if (x <= 0.0 || x >= 1.0) return -inf;
            const double lb = specfun::ln_gamma(t[0]) + specfun::ln_gamma(t[1]) - specfun::ln_gamma(t[0] + t[1]);
            return (t[0] - 1.0) * std::log(x) + (t[1] - 1.0) * std::log1p(-x) - lb;
        }
        case kumaraswamy: {
            if (x <= 0.0 || x >= 1.0) return -inf;
            return std::log(t[0] * t[1]) + (t[0] - 1.0) * std::log(x) + (t[1] - 1.0) * std::log1p(-std::pow(x, t[0]));
        }
        case uniform:
            return -std::log(t[1] - t[0]);
        default:
            break;
    }
    throw DomainError("log_pdf: unhandled family");
}

double cdf_unchecked(FamilyId fam, const ParamVector& t, double x) {
    if (is_log_family(fam)) {
        if (!(x > 0.0)) return 0.0;
        if (std::isinf(x)) return 1.0;
        return cdf_unchecked(log_base(fam), t, std::log(x));
    }
    const auto [lo, hi] = support_bounds(fam, t);
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    switch (fam) {
        case epd: {
            const double d = x - t[1];
            const double v = std::pow(std::fabs(d) / t[2], t[0]) / t[0];
            return d < 0.0 ? 0.5 * specfun::gamma_q(1.0 / t[0], v) : 0.5 + 0.5 * specfun::gamma_p(1.0 / t[0], v);
        }
        case laplace: {
            const double y = (x - t[0]) / t[1];
            return y < 0.0 ? 0.5 * std::exp(y) : 1.0 - 0.5 * std::exp(-y);
        }
        case normal:
            return specfun::std_normal_cdf((x - t[0]) / t[1]);
        case exp_gamma:
            return specfun::gamma_p(t[0], std::exp((x - t[1]) / t[2]));
        case exp_weibull:
            return -std::expm1(-std::exp((x - t[0]) / t[1]));
        case gumbel:
            return std::exp(-std::exp(-(x - t[0]) / t[1]));
        case logistic: {
            const double y = (x - t[0]) / t[1];
            return y >= 0.0 ? 1.0 / (1.0 + std::exp(-y)) : std::exp(y) / (1.0 + std::exp(y));
        }
        case student_t: {
            const double lam = t[0];
            const double y = (x - t[1]) / t[2];
            const double w = lam / (lam + y * y);
            const double ib = specfun::reg_beta_cdf(0.5 * lam, 0.5, w);
            return y < 0.0 ? 0.5 * ib : 1.0 - 0.5 * ib;
        }
        case half_epd:
            return specfun::gamma_p(1.0 / t[0], std::pow(x / t[1], t[0]) / t[0]);
        case gg:
            return specfun::gamma_p(t[0], std::pow(x / t[1], t[2]));
        case weibull:
            return -std::expm1(-std::pow(x / t[0], t[1]));
        case frechet:
            return std::exp(-std::pow(x / t[0], -t[1]));
        case gompertz:
            return -std::expm1(-t[1] * std::expm1(t[0] * x));
        case log_logistic:
            return 1.0 / (1.0 + std::pow(x / t[0], -t[1]));
        case gamma:
            return specfun::gamma_p(t[0], x / t[1]);
        case inverse_gamma:
            return specfun::gamma_q(t[0], t[1] / x);
        case beta_prime:
            return specfun::reg_beta_cdf(t[0], t[1], x / (1.0 + x));
        case lomax:
            return -std::expm1(-t[0] * std::log1p(x / t[1]));
        case nakagami:
            return specfun::gamma_p(t[0], t[0] / t[1] * x * x);
        case inverse_gaussian:
            return specfun::inverse_gaussian_cdf(x, t[0], t[1]);
        case exponential:
            return -std::expm1(-x / t[0]);
        case half_normal:
            return std::erf(x / (t[0] * std::sqrt(2.0)));
        case rayleigh: {
            const double y = x / t[0];
            return -std::expm1(-0.5 * y * y);
        }
        case maxwell_boltzmann: {
            const double y = x / t[0];
            return specfun::gamma_p(1.5, 0.5 * y * y);
        }
        case chi_squared:
            return specfun::gamma_p(0.5 * t[0], 0.5 * x);
        case pareto:
            return -std::expm1(-t[0] * std::log(x));
        case beta:
            return specfun::reg_beta_cdf(t[0], t[1], x);
        case kumaraswamy:
            return -std::expm1(t[1] * std::log1p(-std::pow(x, t[0])));
        case uniform:
            return (x - t[0]) / (t[1] - t[0]);
        default:
            break;
    }
    throw DomainError("cdf: unhandled family");
}

// Bracketed inversion of the CDF: [support_lo + eps, hi] with hi doubled
// until cdf(hi) > u, then safeguarded Newton with the density.
double numeric_quantile(FamilyId fam, const ParamVector& t, double u) {
    const auto [slo, shi] = support_bounds(fam, t);
    double lo = std::isfinite(slo) ? slo + 1e-300 : -1.0;
    double hi = std::isfinite(slo) ? slo + 1.0 : 1.0;
    if (!std::isfinite(slo)) {
        for (int k = 0; cdf_unchecked(fam, t, lo) > u; ++k) {
            lo *= 2.0;
            if (k > 2000) throw SamplingError("numeric quantile: lower bracket search failed");
        }
    }
    for (int k = 0; cdf_unchecked(fam, t, hi) < u; ++k) {
        const double width = hi - (std::isfinite(slo) ? slo : 0.0);
        hi = (std::isfinite(slo) ? slo : 0.0) + 2.0 * std::fabs(width);
        if (hi > shi) hi = shi;
        if (k > 2000 || !std::isfinite(hi)) throw SamplingError("numeric quantile: upper bracket search failed");
    }
    auto fg = [&](double x) -> std::pair<double, double> {
        return {cdf_unchecked(fam, t, x) - u, std::exp(log_pdf_unchecked(fam, t, x))};
    };
    const double x = detail::bracketed_newton(fg, lo, hi, 0.5 * (lo + hi), 1e-13, 400);
    if (!std::isfinite(x)) throw SamplingError("numeric quantile: inversion failed");
    return x;
}

double quantile_unchecked(FamilyId fam, const ParamVector& t, double u) {
    if (is_log_family(fam)) return std::exp(quantile_unchecked(log_base(fam), t, u));
    switch (fam) {
        case epd: {
            const double a = 1.0 / t[0];
            const double p = std::fabs(2.0 * u - 1.0);
            const double y = std::pow(t[0] * specfun::gamma_p_inv(a, p), a);
            return u < 0.5 ? t[1] - t[2] * y : t[1] + t[2] * y;
        }
        case laplace:
            return u < 0.5 ? t[0] + t[1] * std::log(2.0 * u) : t[0] - t[1] * std::log(2.0 * (1.0 - u));
        case normal:
            return t[0] + t[1] * specfun::std_normal_quantile(u);
        case exp_gamma:
            return t[1] + t[2] * std::log(specfun::gamma_p_inv(t[0], u));
        case exp_weibull:
            return t[0] + t[1] * std::log(-std::log1p(-u));
        case gumbel:
            return t[0] - t[1] * std::log(-std::log(u));
        case logistic:
            return t[0] + t[1] * (std::log(u) - std::log1p(-u));
        case student_t: {
            const double lam = t[0];
            const double tail = u < 0.5 ? 2.0 * u : 2.0 * (1.0 - u);
            const double w = specfun::beta_inv(0.5 * lam, 0.5, tail);
            const double y = std::sqrt(lam * (1.0 / w - 1.0));
            return u < 0.5 ? t[1] - t[2] * y : t[1] + t[2] * y;
        }
        case half_epd:
            return t[1] * std::pow(t[0] * specfun::gamma_p_inv(1.0 / t[0], u), 1.0 / t[0]);
        case gg:
            return t[1] * std::pow(specfun::gamma_p_inv(t[0], u), 1.0 / t[2]);
        case weibull:
            return t[0] * std::pow(-std::log1p(-u), 1.0 / t[1]);
        case frechet:
            return t[0] * std::pow(-std::log(u), -1.0 / t[1]);
        case gompertz:
            return std::log1p(-std::log1p(-u) / t[1]) / t[0];
        case log_logistic:
            return t[0] * std::pow(u / (1.0 - u), 1.0 / t[1]);
        case gamma:
            return t[1] * specfun::gamma_p_inv(t[0], u);
        case inverse_gamma:
            return t[1] / specfun::gamma_p_inv(t[0], 1.0 - u);
        case beta_prime: {
            const double v = specfun::beta_inv(t[0], t[1], u);
            return v / (1.0 - v);
        }
        case lomax:
            return t[1] * std::expm1(-std::log1p(-u) / t[0]);
        case nakagami:
            return std::sqrt(t[1] * specfun::gamma_p_inv(t[0], u) / t[0]);
        case inverse_gaussian:
            return numeric_quantile(fam, t, u);
        case exponential:
            return -t[0] * std::log1p(-u);
        case half_normal:
            return -t[0] * specfun::std_normal_quantile(0.5 * (1.0 - u));
        case rayleigh:
            return t[0] * std::sqrt(-2.0 * std::log1p(-u));
        case maxwell_boltzmann:
            return t[0] * std::sqrt(2.0 * specfun::gamma_p_inv(1.5, u));
        case chi_squared:
            return 2.0 * specfun::gamma_p_inv(0.5 * t[0], u);
        case pareto:
            return std::exp(-std::log1p(-u) / t[0]);
        case beta:
            return specfun::beta_inv(t[0], t[1], u);
        case kumaraswamy:
            return std::pow(-std::expm1(std::log1p(-u) / t[1]), 1.0 / t[0]);
        case uniform:
            return t[0] + (t[1] - t[0]) * u;
        default:
            break;
    }
    throw DomainError("quantile: unhandled family");
}

}  // namespace

const FamilyInfo& info(FamilyId fam) {
    const int i = static_cast<int>(fam);
    if (i < 0 || i >= family_count) throw DomainError("unknown family id");
    return registry()[i];
}

std::span<const FamilyId> all_families() { return id_list(); }

std::string_view family_name(FamilyId fam) { return info(fam).name; }

FamilyId family_from_name(std::string_view name) {
    for (const auto& f : registry()) {
        if (f.name == name) return f.id;
    }
    throw ConfigError("unknown family '" + std::string(name) + "'");
}

int arity(FamilyId fam) { return static_cast<int>(info(fam).params.size()); }

int param_index(FamilyId fam, std::string_view name) {
    const auto& ps = info(fam).params;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (ps[i] == name) return static_cast<int>(i);
    }
    throw ConfigError("family '" + std::string(family_name(fam)) + "' has no parameter '" + std::string(name) + "'");
}

void validate(FamilyId fam, const ParamVector& t) {
    const int p = arity(fam);
    if (static_cast<int>(t.size()) != p) {
        throw DomainError(std::string(family_name(fam)) + ": expected " + std::to_string(p) + " parameter(s), got " +
                          std::to_string(t.size()));
    }
    switch (fam) {
        case epd:
        case exp_gamma:
        case student_t:
        case log_epd:
            need_pos(fam, t, 0);
            need_finite(fam, t, 1);
            need_pos(fam, t, 2);
            break;
        case laplace:
        case normal:
        case exp_weibull:
        case gumbel:
        case logistic:
        case log_laplace:
        case log_normal:
            need_finite(fam, t, 0);
            need_pos(fam, t, 1);
            break;
        case uniform:
            need_finite(fam, t, 0);
            need_finite(fam, t, 1);
            if (!(t[0] < t[1])) throw DomainError("uniform: requires a < b");
            break;
        default:
            for (int i = 0; i < p; ++i) need_pos(fam, t, i);
            break;
    }
}

std::pair<double, double> support_bounds(FamilyId fam, const ParamVector& t) {
    switch (info(fam).support) {
        case Support::real_line: return {-inf, inf};
        case Support::positive: return {0.0, inf};
        case Support::above_one: return {1.0, inf};
        case Support::unit: return {0.0, 1.0};
        case Support::interval: return {t[0], t[1]};
    }
    return {-inf, inf};
}

bool in_support(FamilyId fam, const ParamVector& t, double x) {
    if (!std::isfinite(x)) return false;
    const auto [lo, hi] = support_bounds(fam, t);
    switch (info(fam).support) {
        case Support::real_line: return true;
        case Support::positive: return x > 0.0;
        case Support::above_one: return x > 1.0;
        case Support::unit: return x > 0.0 && x < 1.0;
        case Support::interval: return x >= lo && x <= hi;
    }
    return false;
}

double log_pdf(FamilyId fam, const ParamVector& t, double x) {
    validate(fam, t);
    if (std::isnan(x)) throw DomainError("log_pdf: NaN argument");
    return log_pdf_unchecked(fam, t, x);
}

double pdf(FamilyId fam, const ParamVector& t, double x) { return std::exp(log_pdf(fam, t, x)); }

double cdf(FamilyId fam, const ParamVector& t, double x) {
    validate(fam, t);
    if (std::isnan(x)) throw DomainError("cdf: NaN argument");
    return clamp01(cdf_unchecked(fam, t, x));
}

double quantile(FamilyId fam, const ParamVector& t, double u) {
    validate(fam, t);
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must lie in (0, 1)");
    return quantile_unchecked(fam, t, u);
}

void sample_into(FamilyId fam, const ParamVector& t, rng::Stream& stream, std::span<double> out) {
    validate(fam, t);
    for (double& x : out) {
        const double u = stream.uniform();
        double v;
        try {
            v = quantile_unchecked(fam, t, u);
        } catch (const DomainError& e) {
            throw SamplingError(std::string("sampling ") + std::string(family_name(fam)) + ": " + e.what());
        }
        if (!std::isfinite(v)) {
            throw SamplingError(std::string("sampling ") + std::string(family_name(fam)) + ": non-finite draw");
        }
        x = v;
    }
}

Sample sample(FamilyId fam, const ParamVector& t, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw DomainError("sample: n must be >= 1");
    Sample out(n);
    rng::Stream stream = rng::Stream::substream(seed, 0, 0);
    sample_into(fam, t, stream, out);
    return out;
}

// APD ------------------------------------------------------------------------

namespace {

struct ApdShape {
    double delta;     // delta_{alpha, rho}
    double c_left;    // rate on y < 0: delta / (lambda alpha^rho)
    double c_right;   // rate on y > 0: delta / (lambda (1 - alpha)^rho)
    double log_norm;  // ln of rho (delta / lambda)^{1/rho} / Gamma(1/rho)
};

ApdShape apd_shape(const ApdParams& p) {
    const double ar = std::pow(p.alpha, p.rho);
    const double br = std::pow(1.0 - p.alpha, p.rho);
    const double delta = 2.0 * ar * br / (ar + br);
    return {delta, delta / (p.lambda * ar), delta / (p.lambda * br),
            std::log(p.rho) + std::log(delta / p.lambda) / p.rho - specfun::ln_gamma(1.0 / p.rho)};
}

}  // namespace

void validate(const ApdParams& p) {
    if (!(p.lambda > 0.0) || !std::isfinite(p.lambda)) throw DomainError("apd: lambda must be > 0");
    if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw DomainError("apd: alpha must lie in (0, 1)");
    if (!(p.rho > 0.0) || !std::isfinite(p.rho)) throw DomainError("apd: rho must be > 0");
    if (!std::isfinite(p.mu)) throw DomainError("apd: mu must be finite");
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) throw DomainError("apd: sigma must be > 0");
}

double apd_pdf(const ApdParams& p, double x) {
    validate(p);
    const ApdShape s = apd_shape(p);
    const double y = (x - p.mu) / p.sigma;
    const double c = y < 0.0 ? s.c_left : s.c_right;
    return std::exp(s.log_norm - c * std::pow(std::fabs(y), p.rho)) / p.sigma;
}

// The left half carries mass alpha; each half is a scaled gamma(1/rho) in |y|^rho.
double apd_cdf(const ApdParams& p, double x) {
    validate(p);
    const ApdShape s = apd_shape(p);
    const double y = (x - p.mu) / p.sigma;
    const double a = 1.0 / p.rho;
    if (y < 0.0) return p.alpha * specfun::gamma_q(a, s.c_left * std::pow(-y, p.rho));
    return p.alpha + (1.0 - p.alpha) * specfun::gamma_p(a, s.c_right * std::pow(y, p.rho));
}

double apd_quantile(const ApdParams& p, double u) {
    validate(p);
    if (!(u > 0.0 && u < 1.0)) throw DomainError("apd_quantile: u must lie in (0, 1)");
    const ApdShape s = apd_shape(p);
    const double a = 1.0 / p.rho;
    if (u < p.alpha) {
        const double g = specfun::gamma_p_inv(a, 1.0 - u / p.alpha);
        return p.mu - p.sigma * std::pow(g / s.c_left, a);
    }
    const double g = specfun::gamma_p_inv(a, (u - p.alpha) / (1.0 - p.alpha));
    return p.mu + p.sigma * std::pow(g / s.c_right, a);
}

void sample_apd_into(const ApdParams& p, rng::Stream& stream, std::span<double> out) {
    validate(p);
    for (double& x : out) {
        const double v = apd_quantile(p, stream.uniform());
        if (!std::isfinite(v)) throw SamplingError("sampling apd: non-finite draw");
        x = v;
    }
}

Sample sample_apd(const ApdParams& p, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw DomainError("sample_apd: n must be >= 1");
    Sample out(n);
    rng::Stream stream = rng::Stream::substream(seed, 0, 0);
    sample_apd_into(p, stream, out);
    return out;
}

}  // namespace trigof
