#include "trigof/gof.hpp"

#include "trigof/errors.hpp"
#include "trigof/rng.hpp"
#include "trigof/scaling.hpp"
#include "trigof/specfun.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace trigof {

using linalg::Matrix;

TrigMoments trig_moments(FamilyId fam, const ParamVector& theta, std::span<const double> x) {
    validate(fam, theta);
    if (x.empty()) throw DataError("trig_moments: empty sample");
    const double two_pi = 2.0 * std::numbers::pi;
    double c = 0.0;
    double s = 0.0;
    for (double xi : x) {
        if (!in_support(fam, theta, xi)) throw DomainError("trig_moments: observation outside the support");
        const double a = two_pi * cdf(fam, theta, xi);
        c += std::cos(a);
        s += std::sin(a);
    }
    const double n = static_cast<double>(x.size());
    return {c / n, s / n, x.size()};
}

double quadratic_statistic(const TrigMoments& m, const Matrix& sigma) {
    const Matrix inv = linalg::inverse_symmetric(sigma);
    const double q = m.c * (inv(0, 0) * m.c + inv(0, 1) * m.s) + m.s * (inv(1, 0) * m.c + inv(1, 1) * m.s);
    return std::max(0.0, static_cast<double>(m.n) * q);
}

double chi2_2_sf(double t) {
    if (t <= 0.0) return 1.0;
    return std::exp(-0.5 * t);
}

TestResult evaluate(FamilyId fam, EstimatorKind kind, const KnownMask& mask, const ParamVector& theta,
                    std::span<const double> x) {
    TestResult r{fam, kind, {}, mask.unknown_count(), {}, {}, 0.0, 1.0, 0.0, 0.0, std::nullopt};
    r.fit.theta = mask.apply(theta);
    r.fit.converged = true;
    r.moments = trig_moments(fam, r.fit.theta, x);
    r.sigma = sigma(fam, kind, r.fit.theta, mask);
    r.tn = quadratic_statistic(r.moments, r.sigma);
    r.p_chi2 = chi2_2_sf(r.tn);
    const double rn = std::sqrt(static_cast<double>(r.moments.n));
    r.zc = rn * r.moments.c / std::sqrt(r.sigma(0, 0));
    r.zs = rn * r.moments.s / std::sqrt(r.sigma(1, 1));
    return r;
}

TestResult run_test(FamilyId fam, EstimatorKind kind, const KnownMask& mask, std::span<const double> x,
                    const std::optional<McOptions>& mc, const FitOptions& fit_opts) {
    FitResult f = fit(fam, kind, mask, x, fit_opts);
    TestResult r = evaluate(fam, kind, mask, f.theta, x);
    r.fit = std::move(f);
    if (mc) r.mc = monte_carlo_pvalue(fam, kind, mask, r.fit.theta, x.size(), r.tn, *mc, fit_opts);
    return r;
}

namespace {

unsigned worker_count(unsigned requested, std::size_t jobs) {
    unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (jobs < t) t = static_cast<unsigned>(std::max<std::size_t>(1, jobs));
    return t;
}

}  // namespace

McResult monte_carlo_pvalue(FamilyId fam, EstimatorKind kind, const KnownMask& mask, const ParamVector& theta_hat,
                            std::size_t n, double t_observed, const McOptions& opts, const FitOptions& fit_opts) {
    if (opts.reps == 0) throw ConfigError("monte carlo: reps must be positive");
    const auto max_fail = static_cast<std::size_t>(std::floor(opts.max_failure_fraction * static_cast<double>(opts.reps)));

    // Replication statistics, NaN for failed refits.
    std::vector<double> stats(opts.reps, 0.0);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> failures{0};
    std::atomic<bool> abort{false};

    auto work = [&] {
        Sample buf(n);
        while (!abort.load(std::memory_order_relaxed)) {
            const std::size_t rep = next.fetch_add(1);
            if (rep >= opts.reps) break;
            auto stream = rng::Stream::substream(opts.seed, 0, rep);
            try {
                sample_into(fam, theta_hat, stream, buf);
                const FitResult f = fit(fam, kind, mask, buf, fit_opts);
                if (!f.converged) throw EstimationError("monte carlo: refit did not converge", f.residual);
                const TrigMoments m = trig_moments(fam, f.theta, buf);
                stats[rep] = quadratic_statistic(m, sigma(fam, kind, f.theta, mask));
            } catch (const Error&) {
                stats[rep] = std::nan("");
                if (failures.fetch_add(1) + 1 > max_fail) abort.store(true);
            }
        }
    };

    const unsigned nt = worker_count(opts.threads, opts.reps);
    if (nt == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < nt; ++i) pool.emplace_back(work);
    }

    McResult out;
    out.reps = opts.reps;
    out.failures = failures.load();
    if (abort.load() || out.failures > max_fail)
        throw EstimationError("monte carlo: too many refits failed (" + std::to_string(out.failures) + " of " +
                                  std::to_string(opts.reps) + ")",
                              static_cast<double>(out.failures));
    for (double t : stats) {
        if (std::isnan(t)) continue;
        ++out.completed;
        if (t >= t_observed) ++out.exceed;
    }
    out.p_value = static_cast<double>(out.exceed + 1) / static_cast<double>(out.completed + 1);
    out.raw_proportion = out.completed ? static_cast<double>(out.exceed) / static_cast<double>(out.completed) : 0.0;
    return out;
}

Ellipse ellipse(const Matrix& sigma, double level, int points) {
    if (!(level > 0.0 && level < 1.0)) throw DomainError("ellipse: level must lie in (0, 1)");
    if (points < 3) throw DomainError("ellipse: need at least 3 boundary points");
    if (sigma.rows() != 2 || sigma.cols() != 2 || !linalg::is_positive_definite(sigma))
        throw SingularityError("ellipse: Sigma is not positive definite", linalg::equilibrated_condition(sigma));

    Ellipse e;
    e.level = level;
    e.q = -2.0 * std::log1p(-level);
    const auto eig = linalg::eigen_symmetric_2x2(sigma);
    const auto& minor = eig.vectors[0];
    const auto& major = eig.vectors[1];
    e.semi_major = std::sqrt(e.q * eig.values[1]);
    e.semi_minor = std::sqrt(e.q * eig.values[0]);
    e.rotation = std::atan2(major[1], major[0]);

    e.boundary.reserve(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        const double t = 2.0 * std::numbers::pi * k / points;
        const double a = e.semi_major * std::cos(t);
        const double b = e.semi_minor * std::sin(t);
        e.boundary.push_back({a * major[0] + b * minor[0], a * major[1] + b * minor[1]});
    }
    const double z = specfun::std_normal_quantile(0.5 * (1.0 + level));
    e.c_threshold = z * std::sqrt(sigma(0, 0));
    e.s_threshold = z * std::sqrt(sigma(1, 1));
    return e;
}

}  // namespace trigof
