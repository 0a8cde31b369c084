#include "trigof/power.hpp"

#include "trigof/errors.hpp"
#include "trigof/families.hpp"
#include "trigof/gof.hpp"
#include "trigof/hconst.hpp"
#include "trigof/quadrature.hpp"
#include "trigof/rng.hpp"
#include "trigof/scaling.hpp"
#include "trigof/specfun.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

namespace trigof::power {

namespace {

using linalg::Matrix;
using hconst::h;
using specfun::digamma;
using specfun::euler_gamma;
using specfun::ln_gamma;
using specfun::pi;
using specfun::trigamma;

}  // namespace

void validate_alternative(const LocalAlternative& alt) {
    switch (alt.kind) {
        case Case::gamma_vs_gg:
            validate(FamilyId::gamma, alt.theta0);
            break;
        case Case::weibull_vs_gg:
            validate(FamilyId::weibull, alt.theta0);
            break;
        case Case::epd_vs_apd:
            validate(FamilyId::epd, alt.theta0);
            break;
    }
    if (alt.kind != Case::epd_vs_apd && alt.estimator != EstimatorKind::ml)
        throw ConfigError(std::string(to_string(alt.kind)) + ": only the ML estimator is defined");
    if (!(alt.alpha_level > 0.0 && alt.alpha_level < 1.0)) throw DomainError("power: alpha level must lie in (0, 1)");
}

namespace {

Parts gamma_closed(double lam) {
    const double h6 = h(6, {lam, lam + 1.0, 1.0});
    const double h7 = h(7, {lam, lam + 1.0, 1.0});
    const double h8 = h(8, {lam});
    const double h9 = h(9, {lam});
    const double h10 = h(10, {lam});
    const double h11 = h(11, {lam});
    const double lp1 = lam * trigamma(lam);
    const double d = lp1 - 1.0;
    const double k = lam / d;
    const double s11 = 0.5 - k * (lp1 * h6 * h6 + h10 * h10 - 2.0 * h6 * h10);
    const double s12 = k * (h6 * (h11 - lp1 * h7) + h10 * (h7 - h11));
    const double s22 = 0.5 - k * (lp1 * h7 * h7 + h11 * h11 - 2.0 * h7 * h11);
    const double lps = lam * digamma(lam);
    const double w = lps - lp1 * (lps + 1.0);
    return {Matrix(2, 2, {s11, s12, s12, s22}),
            Matrix(2, 1, {-h8 - (h10 + h6 * w) / d, -h9 - (h11 + h7 * w) / d})};
}

Parts weibull_closed() {
    const double h6 = h(6, {1.0, 2.0, 1.0});
    const double h7 = h(7, {1.0, 2.0, 1.0});
    const double h8 = h(8, {1.0});
    const double h9 = h(9, {1.0});
    const double h10 = h(10, {1.0});
    const double h11 = h(11, {1.0});
    const double k = 6.0 / (pi * pi);
    const double a = (euler_gamma - 1.0) * h6 + h8;
    const double b = (euler_gamma - 1.0) * h7 + h9;
    const double s12 = -h6 * h7 - k * a * b;
    const double c = 1.0 - euler_gamma + pi * pi / 6.0;
    return {Matrix(2, 2, {0.5 - h6 * h6 - k * a * a, s12, s12, 0.5 - h7 * h7 - k * b * b}),
            Matrix(2, 1, {h10 - k * (c * h6 - h8), h11 - k * (c * h7 - h9)})};
}

Parts epd_closed(double lam, EstimatorKind kind) {
    const double h1 = h(1, {lam});
    const double h2 = h(2, {lam});
    const double h3 = h(3, {lam});
    const double h37 = h(37, {lam});
    const double g1 = std::exp(ln_gamma(1.0 / lam));
    if (kind == EstimatorKind::ml) {
        const double c1 = digamma(1.0 / lam + 1.0) + std::log(lam);
        const double gg = g1 * std::exp(ln_gamma(2.0 - 1.0 / lam));
        return {Matrix(2, 2, {0.5 - h1 * h1 / lam, 0.0, 0.0, 0.5 - h2 * h2 / gg}),
                Matrix(2, 2, {0.0, (-h3 + h1 * (c1 + 1.0)) / (lam * lam), -2.0 * h37 + 2.0 * lam * h2 / gg, 0.0})};
    }
    const double h4 = h(4, {lam});
    const double h5 = h(5, {lam});
    const double c2 = std::exp(ln_gamma(1.0 / lam) - (2.0 / lam) * std::log(lam) - ln_gamma(3.0 / lam));
    const double c3 = 1.0 / std::expm1(ln_gamma(1.0 / lam) + ln_gamma(5.0 / lam) - 2.0 * ln_gamma(3.0 / lam));
    const double d = h2 / (std::pow(lam, 1.0 / lam - 1.0) * g1);
    const double g2 = std::exp(ln_gamma(2.0 / lam));
    const double s22 =
        0.5 - d / c2 * (2.0 * h5 * g2 / (std::pow(lam, 1.0 / lam) * std::exp(ln_gamma(3.0 / lam))) - d);
    const double m12 = -h3 / (lam * lam) +
                       h1 * (2.0 * std::log(lam) + 3.0 * digamma(3.0 / lam) - digamma(1.0 / lam)) / (2.0 * lam * lam);
    const double m21 = -2.0 * h37 + 4.0 * lam * h2 * g2 / (g1 * g1);
    return {Matrix(2, 2, {0.5 - h1 * h4 + h1 * h1 / (4.0 * c3), 0.0, 0.0, s22}),
            Matrix(2, 2, {0.0, m12, m21, 0.0})};
}

// GG matrices at the null point: sigma from the null columns, M from the
// drifting column.
Parts gg_direct(const ParamVector& gg_theta, int drift) {
    const MatrixSet ms = matrices(FamilyId::gg, EstimatorKind::ml, gg_theta);
    std::vector<int> keep;
    for (int j = 0; j < 3; ++j)
        if (j != drift) keep.push_back(j);
    const Matrix g = linalg::select(ms.G, {0, 1}, keep);
    const Matrix r = linalg::select(ms.R, keep, keep);
    const Matrix gk = linalg::select(ms.G, {0, 1}, {drift});
    const Matrix s = linalg::select(ms.R, {drift}, keep);
    const Matrix rinv = linalg::inverse_symmetric(r);
    const Matrix sigma = linalg::symmetrize(0.5 * Matrix::identity(2) - g * rinv * transpose(g));
    return {sigma, gk - g * rinv * transpose(s)};
}

// APD score in (alpha, rho) at alpha = 1/2, rho = lambda, for y = (x - mu) / sigma.
std::array<double, 2> apd_score(double lam, double y) {
    const double ay = std::abs(y);
    const double yl = std::pow(ay, lam);
    const double sign = y > 0.0 ? 1.0 : (y < 0.0 ? -1.0 : 0.0);
    const double s_alpha = -2.0 * sign * yl;
    const double log_term = ay > 0.0 ? yl * std::log(ay) : 0.0;
    const double s_rho = 1.0 / lam + (std::log(lam) + digamma(1.0 / lam)) / (lam * lam) - log_term / lam;
    return {s_alpha, s_rho};
}

// Quadrature assembly for the EPD case. The integrals run over
// t = |y|^lambda / lambda ~ gamma(1/lambda, 1), both signs of y at once.
Parts epd_direct(const ParamVector& theta0, EstimatorKind kind) {
    const double lam = theta0[0];
    const double mu = theta0[1];
    const double sig = theta0[2];
    const KnownMask mask = KnownMask::none(FamilyId::epd).fix(0, lam);
    const MatrixSet ms = matrices(FamilyId::epd, kind, theta0);
    const Matrix g = linalg::select(ms.G, {0, 1}, {1, 2});
    const Matrix sigma = trigof::sigma(ms, mask);

    // Entries: G_K (4: cos/sin x alpha/rho), E[r s_K^T] (4: mu/sigma x alpha/rho).
    auto integrand = [&](const quad::Point& p, int which) {
        const double y = std::exp((std::log(lam) + p.ln_v) / lam);
        const double pg = specfun::gamma_p(1.0 / lam, p.v);
        double total = 0.0;
        for (double sgn : {1.0, -1.0}) {
            const double ys = sgn * y;
            const auto sk = apd_score(lam, ys);
            const double f = sgn > 0 ? 0.5 + 0.5 * pg : 0.5 - 0.5 * pg;
            double a;
            if (which < 4) {
                const double ang = 2.0 * pi * f;
                a = (which / 2 == 0 ? std::cos(ang) : std::sin(ang));
            } else {
                const auto r = estimating_function(FamilyId::epd, kind, theta0, mu + sig * ys);
                a = r[1 + (which - 4) / 2];
            }
            total += a * sk[which % 2];
        }
        return 0.5 * total;
    };
    std::array<double, 8> e{};
    quad::Options opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-11;
    for (int k = 0; k < 8; ++k)
        e[k] = quad::gamma_expect([&](const quad::Point& p) { return integrand(p, k); }, 1.0 / lam, 1.0, opt);

    const Matrix gk(2, 2, {e[0], e[1], e[2], e[3]});
    Matrix er(2, 2, {e[4], e[5], e[6], e[7]});  // E[r s_K^T], rows (mu, sigma)
    Matrix shift;
    if (kind == EstimatorKind::ml) {
        const Matrix r = linalg::select(ms.R, {1, 2}, {1, 2});
        shift = g * linalg::inverse_symmetric(r) * er;
    } else {
        // estimating_function returns the influence psi = R^{-1} r directly.
        shift = g * er;
    }
    return {sigma, gk - shift};
}

}  // namespace

const char* to_string(Case c) noexcept {
    switch (c) {
        case Case::gamma_vs_gg: return "gamma";
        case Case::weibull_vs_gg: return "weibull";
        case Case::epd_vs_apd: return "epd";
    }
    return "?";
}

Case case_from_name(std::string_view name) {
    if (name == "gamma") return Case::gamma_vs_gg;
    if (name == "weibull") return Case::weibull_vs_gg;
    if (name == "epd") return Case::epd_vs_apd;
    throw ConfigError("unknown power case '" + std::string(name) + "' (expected gamma, weibull or epd)");
}

Parts closed_form(const LocalAlternative& alt) {
    validate_alternative(alt);
    switch (alt.kind) {
        case Case::gamma_vs_gg: return gamma_closed(alt.theta0[0]);
        case Case::weibull_vs_gg: return weibull_closed();
        case Case::epd_vs_apd: return epd_closed(alt.theta0[0], alt.estimator);
    }
    throw ConfigError("closed_form: unknown case");
}

Parts direct(const LocalAlternative& alt) {
    validate_alternative(alt);
    switch (alt.kind) {
        case Case::gamma_vs_gg: return gg_direct({alt.theta0[0], alt.theta0[1], 1.0}, 2);
        case Case::weibull_vs_gg: return gg_direct({1.0, alt.theta0[0], alt.theta0[1]}, 0);
        case Case::epd_vs_apd: return epd_direct(alt.theta0, alt.estimator);
    }
    throw ConfigError("direct: unknown case");
}

double noncentrality(const Parts& parts, double delta1, double delta2) {
    const Matrix& m = parts.m;
    double v0;
    double v1;
    if (m.cols() == 1) {
        v0 = m(0, 0) * delta1;
        v1 = m(1, 0) * delta1;
    } else {
        v0 = m(0, 0) * delta1 + m(0, 1) * delta2;
        v1 = m(1, 0) * delta1 + m(1, 1) * delta2;
    }
    if (v0 == 0.0 && v1 == 0.0) return 0.0;
    const Matrix inv = linalg::inverse_symmetric(parts.sigma);
    const double q = v0 * (inv(0, 0) * v0 + inv(0, 1) * v1) + v1 * (inv(1, 0) * v0 + inv(1, 1) * v1);
    return std::max(0.0, q);
}

double noncentrality(const LocalAlternative& alt, double delta1, double delta2) {
    return noncentrality(closed_form(alt), delta1, delta2);
}

double asymptotic_power(double ncp, double alpha_level) {
    if (ncp == 0.0) return alpha_level;
    return specfun::noncentral_chi2_sf(2, ncp, -2.0 * std::log(alpha_level));
}

std::vector<PowerPoint> power_curve(const LocalAlternative& alt, const std::vector<double>& delta1,
                                    const std::vector<double>& delta2) {
    if (delta1.size() != delta2.size()) throw ConfigError("power_curve: delta grids differ in length");
    const Parts parts = closed_form(alt);
    std::vector<PowerPoint> out;
    out.reserve(delta1.size());
    for (std::size_t i = 0; i < delta1.size(); ++i) {
        if (!std::isfinite(delta1[i]) || !std::isfinite(delta2[i])) throw DomainError("power_curve: non-finite delta");
        const double ncp = noncentrality(parts, delta1[i], delta2[i]);
        out.push_back({delta1[i], delta2[i], ncp, asymptotic_power(ncp, alt.alpha_level)});
    }
    return out;
}

std::vector<PowerPoint> power_curve(const LocalAlternative& alt, const std::vector<double>& delta) {
    return power_curve(alt, delta, std::vector<double>(delta.size(), 0.0));
}

EmpiricalPower empirical_power(const LocalAlternative& alt, double delta1, double delta2, const SimOptions& opts) {
    validate_alternative(alt);
    if (opts.reps == 0 || opts.n < 4) throw ConfigError("empirical_power: need reps > 0 and n >= 4");
    const double rn = std::sqrt(static_cast<double>(opts.n));
    const double crit = -2.0 * std::log(alt.alpha_level);

    FamilyId null_fam;
    KnownMask mask;
    const ParamVector& t0 = alt.theta0;
    switch (alt.kind) {
        case Case::gamma_vs_gg:
            null_fam = FamilyId::gamma;
            mask = KnownMask::none(null_fam);
            break;
        case Case::weibull_vs_gg:
            null_fam = FamilyId::weibull;
            mask = KnownMask::none(null_fam);
            break;
        case Case::epd_vs_apd:
            null_fam = FamilyId::epd;
            mask = KnownMask::none(null_fam).fix(0, t0[0]);
            break;
    }

    ApdParams apd{};
    ParamVector gg_theta;
    if (alt.kind == Case::gamma_vs_gg) gg_theta = {t0[0], t0[1], 1.0 + delta1 / rn};
    if (alt.kind == Case::weibull_vs_gg) gg_theta = {1.0 + delta1 / rn, t0[0], t0[1]};
    if (alt.kind == Case::epd_vs_apd) {
        apd = {t0[0], 0.5 + delta1 / rn, t0[0] + delta2 / rn, t0[1], t0[2]};
        validate(apd);
    } else {
        validate(FamilyId::gg, gg_theta);
    }

    std::vector<signed char> outcome(opts.reps, 0);  // 1 reject, 0 accept, -1 failed
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        Sample x(opts.n);
        while (true) {
            const std::size_t rep = next.fetch_add(1);
            if (rep >= opts.reps) break;
            auto stream = rng::Stream::substream(opts.seed, 1, rep);
            try {
                if (alt.kind == Case::epd_vs_apd)
                    sample_apd_into(apd, stream, x);
                else
                    sample_into(FamilyId::gg, gg_theta, stream, x);
                const FitResult f = fit(null_fam, alt.estimator, mask, x);
                if (!f.converged) throw EstimationError("empirical_power: fit did not converge", f.residual);
                const TestResult r = evaluate(null_fam, alt.estimator, mask, f.theta, x);
                outcome[rep] = r.tn > crit ? 1 : 0;
            } catch (const Error&) {
                outcome[rep] = -1;
            }
        }
    };
    unsigned nt = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    if (nt <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < nt; ++i) pool.emplace_back(work);
    }

    EmpiricalPower ep;
    ep.reps = opts.reps;
    for (signed char o : outcome) {
        if (o < 0) ++ep.failures;
        if (o > 0) ++ep.rejections;
    }
    const std::size_t done = ep.reps - ep.failures;
    if (done == 0) throw EstimationError("empirical_power: every replication failed", 0.0);
    ep.rate = static_cast<double>(ep.rejections) / static_cast<double>(done);
    ep.std_error = std::sqrt(ep.rate * (1.0 - ep.rate) / static_cast<double>(done));
    return ep;
}

}  // namespace trigof::power
