#pragma once

#include "trigof/rng.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trigof {

enum class FamilyId {
    epd,
    laplace,
    normal,
    exp_gamma,
    exp_weibull,
    gumbel,
    logistic,
    student_t,
    log_epd,
    log_laplace,
    log_normal,
    half_epd,
    gg,
    weibull,
    frechet,
    gompertz,
    log_logistic,
    gamma,
    inverse_gamma,
    beta_prime,
    lomax,
    nakagami,
    inverse_gaussian,
    exponential,
    half_normal,
    rayleigh,
    maxwell_boltzmann,
    chi_squared,
    pareto,
    beta,
    kumaraswamy,
    uniform,
};

inline constexpr int family_count = 32;

// Parameter values in the order of the family's parameter list.
using ParamVector = std::vector<double>;
using Sample = std::vector<double>;

enum class Support { real_line, positive, above_one, unit, interval };

struct FamilyInfo {
    FamilyId id;
    std::string_view name;                 // lowercase, hyphenated
    std::vector<std::string_view> params;  // parameter names in order
    Support support;
    bool has_mm;
    // Index of location and scale parameters, -1 when absent. Used by the
    // equivariance properties.
    int location_index;
    int scale_index;
};

const FamilyInfo& info(FamilyId fam);
std::span<const FamilyId> all_families();
FamilyId family_from_name(std::string_view name);
std::string_view family_name(FamilyId fam);
int arity(FamilyId fam);
int param_index(FamilyId fam, std::string_view name);

// Throws DomainError when theta has the wrong length or leaves the parameter space.
void validate(FamilyId fam, const ParamVector& theta);

// Lower and upper support bounds for theta (uniform depends on theta).
std::pair<double, double> support_bounds(FamilyId fam, const ParamVector& theta);
bool in_support(FamilyId fam, const ParamVector& theta, double x);

double pdf(FamilyId fam, const ParamVector& theta, double x);
double log_pdf(FamilyId fam, const ParamVector& theta, double x);
double cdf(FamilyId fam, const ParamVector& theta, double x);
double quantile(FamilyId fam, const ParamVector& theta, double u);

Sample sample(FamilyId fam, const ParamVector& theta, std::size_t n, std::uint64_t seed);
void sample_into(FamilyId fam, const ParamVector& theta, rng::Stream& stream, std::span<double> out);

// Asymmetric power distribution APD(lambda, alpha, rho, mu, sigma).
struct ApdParams {
    double lambda;
    double alpha;
    double rho;
    double mu;
    double sigma;
};

void validate(const ApdParams& p);
double apd_pdf(const ApdParams& p, double x);
double apd_cdf(const ApdParams& p, double x);
double apd_quantile(const ApdParams& p, double u);
Sample sample_apd(const ApdParams& p, std::size_t n, std::uint64_t seed);
void sample_apd_into(const ApdParams& p, rng::Stream& stream, std::span<double> out);

}  // namespace trigof
