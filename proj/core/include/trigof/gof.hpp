#pragma once

#include "trigof/estimate.hpp"
#include "trigof/families.hpp"
#include "trigof/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace trigof {

struct TrigMoments {
    double c = 0.0;
    double s = 0.0;
    std::size_t n = 0;
};

// Means of cos(2 pi F(x_i)) and sin(2 pi F(x_i)).
TrigMoments trig_moments(FamilyId fam, const ParamVector& theta, std::span<const double> x);

// n [C, S] Sigma^{-1} [C, S]^T.
double quadratic_statistic(const TrigMoments& m, const linalg::Matrix& sigma);

// Survival function of chi-squared with 2 degrees of freedom.
double chi2_2_sf(double t);

struct McOptions {
    std::size_t reps = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0: hardware concurrency
    // Abort when more than this fraction of refits fail.
    double max_failure_fraction = 0.01;
};

struct McResult {
    std::size_t reps = 0;       // requested
    std::size_t completed = 0;  // reps - failures
    std::size_t failures = 0;
    std::size_t exceed = 0;     // replications with T >= observed
    double p_value = 1.0;       // (exceed + 1) / (completed + 1)
    double raw_proportion = 0.0;
};

struct TestResult {
    FamilyId family;
    EstimatorKind kind;
    FitResult fit;
    int estimated = 0;
    TrigMoments moments;
    linalg::Matrix sigma;
    double tn = 0.0;
    double p_chi2 = 1.0;
    double zc = 0.0;
    double zs = 0.0;
    std::optional<McResult> mc;
};

// Statistic at a given theta; skips estimation (the fit field carries theta).
TestResult evaluate(FamilyId fam, EstimatorKind kind, const KnownMask& mask, const ParamVector& theta,
                    std::span<const double> x);

TestResult run_test(FamilyId fam, EstimatorKind kind, const KnownMask& mask, std::span<const double> x,
                    const std::optional<McOptions>& mc = std::nullopt, const FitOptions& fit_opts = {});

// Parametric bootstrap of T under the fitted model. Each replication draws
// from its own substream (seed, 0, rep), so results do not depend on the
// number of threads.
McResult monte_carlo_pvalue(FamilyId fam, EstimatorKind kind, const KnownMask& mask, const ParamVector& theta_hat,
                            std::size_t n, double t_observed, const McOptions& opts,
                            const FitOptions& fit_opts = {});

struct EllipsePoint {
    double c;
    double s;
};

struct Ellipse {
    double level = 0.0;
    double q = 0.0;  // chi-squared(2) quantile
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double rotation = 0.0;  // angle of the major axis, radians
    std::vector<EllipsePoint> boundary;
    // Univariate thresholds z * sqrt(Sigma_kk) for the cos and sin components.
    double c_threshold = 0.0;
    double s_threshold = 0.0;
};

// Region {v : v^T Sigma^{-1} v <= q} for sqrt(n) [C, S].
Ellipse ellipse(const linalg::Matrix& sigma, double level, int points = 256);

}  // namespace trigof
