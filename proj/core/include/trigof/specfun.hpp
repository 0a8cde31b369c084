#pragma once

// Special functions. All routines throw DomainError on invalid input
// instead of returning NaN.

namespace trigof::specfun {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double euler_gamma = 0.57721566490153286061;

double ln_gamma(double z);
double gamma_fn(double z);
double digamma(double z);
double trigamma(double z);

// Regularized lower incomplete gamma P(a, x) and its complement Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// CDF of a gamma distribution with shape a and scale b, i.e. P(a, x / b).
double reg_gamma_cdf(double a, double b, double x);

// Inverse of P(a, .) at probability p in [0, 1).
double gamma_p_inv(double a, double p);

// Regularized incomplete beta I_x(a, b).
double reg_beta_cdf(double a, double b, double x);
double beta_inv(double a, double b, double p);

double gamma_pdf(double x, double shape, double scale);
double beta_pdf(double x, double a, double b);

double std_normal_pdf(double x);
double std_normal_cdf(double x);
double std_normal_quantile(double p);

// Inverse-Gaussian(mu, lambda) density and CDF.
double inverse_gaussian_pdf(double x, double mu, double lambda);
double inverse_gaussian_cdf(double x, double mu, double lambda);

// P(chi2_df(ncp) > t) by a Poisson mixture of central chi-square tails.
double noncentral_chi2_sf(int df, double ncp, double t);

double zeta3();

}  // namespace trigof::specfun
