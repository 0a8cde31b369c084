#pragma once

#include "trigof/estimate.hpp"
#include "trigof/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace trigof::power {

// Null family and the larger family it is embedded in.
//   gamma_vs_gg:   gamma(lambda, beta) = GG(lambda, beta, 1), drift in rho
//   weibull_vs_gg: Weibull(beta, rho) = GG(1, beta, rho), drift in lambda
//   epd_vs_apd:    EPD(lambda, mu, sigma) = APD(lambda, 1/2, lambda, mu, sigma),
//                  lambda known, drift in (alpha, rho)
enum class Case { gamma_vs_gg, weibull_vs_gg, epd_vs_apd };

const char* to_string(Case c) noexcept;
Case case_from_name(std::string_view name);

struct LocalAlternative {
    Case kind = Case::gamma_vs_gg;
    EstimatorKind estimator = EstimatorKind::ml;  // MM only for epd_vs_apd
    // Null parameters in the null family's order: (lambda, beta) for gamma,
    // (beta, rho) for Weibull, (lambda, mu, sigma) for EPD.
    ParamVector theta0;
    double alpha_level = 0.05;
};

// Sigma (2x2) and M (2x1, or 2x2 for the EPD case with columns alpha, rho).
struct Parts {
    linalg::Matrix sigma;
    linalg::Matrix m;
};

// Throws DomainError/ConfigError for an invalid null point, estimator or level.
void validate_alternative(const LocalAlternative& alt);

// Closed-form Sigma and M in terms of the h constants.
Parts closed_form(const LocalAlternative& alt);

// Same quantities assembled from the embedding family's matrices (GG) or
// from quadrature of the APD score (EPD). Independent of closed_form().
Parts direct(const LocalAlternative& alt);

// delta^2 M^T Sigma^{-1} M for the scalar cases; for the EPD case
// delta = (delta1, delta2) and the quadratic form delta^T M^T Sigma^{-1} M delta.
double noncentrality(const Parts& parts, double delta1, double delta2 = 0.0);
double noncentrality(const LocalAlternative& alt, double delta1, double delta2 = 0.0);

struct PowerPoint {
    double delta1;
    double delta2;
    double ncp;
    double power;
};

// Asymptotic power P(chi2_2(ncp) > -2 ln alpha) along a grid of (delta1, delta2).
std::vector<PowerPoint> power_curve(const LocalAlternative& alt, const std::vector<double>& delta1,
                                    const std::vector<double>& delta2);

// Scalar cases: one point per delta.
std::vector<PowerPoint> power_curve(const LocalAlternative& alt, const std::vector<double>& delta);

double asymptotic_power(double ncp, double alpha_level);

struct EmpiricalPower {
    std::size_t reps = 0;
    std::size_t rejections = 0;
    std::size_t failures = 0;
    double rate = 0.0;  // rejections / (reps - failures)
    double std_error = 0.0;
};

struct SimOptions {
    std::size_t n = 2000;
    std::size_t reps = 4000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

// Rejection rate at alt.alpha_level with data drawn from the local
// alternative at the exact drift delta / sqrt(n).
EmpiricalPower empirical_power(const LocalAlternative& alt, double delta1, double delta2, const SimOptions& opts);

}  // namespace trigof::power
