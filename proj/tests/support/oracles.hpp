#pragma once

// Independent reference computations for the test suites: tanh-sinh
// expectations over the PIT scale, finite differences and property checks.

#include "trigof/estimate.hpp"
#include "trigof/families.hpp"
#include "trigof/linalg.hpp"

#include <functional>
#include <string>
#include <vector>

namespace oracle {

using trigof::EstimatorKind;
using trigof::FamilyId;
using trigof::ParamVector;

// A few parameter points per family, away from boundary cases.
std::vector<ParamVector> theta_grid(FamilyId fam);

// E[g(U, X)] with X = F^{-1}(U), U uniform; integrated separately on
// (0, 1/2) and (1/2, 1) so kinks at the median do not spoil convergence.
double pit_expect(FamilyId fam, const ParamVector& theta, const std::function<double(double, double)>& g);

// E[tau s^T], E[r r^T] and E[tau r^T] with r the estimating function.
struct RawMatrices {
    trigof::linalg::Matrix G;
    trigof::linalg::Matrix cov_r;
    trigof::linalg::Matrix tau_r;
};
RawMatrices raw_matrices(FamilyId fam, EstimatorKind kind, const ParamVector& theta);

// Largest deviations of the tabulated G, R, J from the quadrature values.
// For MM the comparison is on R^{-1} = Cov(psi) and J R^{-1} = E[tau psi^T]
// over the estimated components.
struct MatrixDeviation {
    double g = 0.0;
    double r = 0.0;
    double j = 0.0;
};
MatrixDeviation compare_matrices(FamilyId fam, EstimatorKind kind, const ParamVector& theta);

// d/dx of f by a fourth-order central difference with step h.
double derivative(const std::function<double(double)>& f, double x, double h);

// Property checks; each returns human-readable violations (empty on success).
std::vector<std::string> specfun_recurrences();
std::vector<std::string> pdf_cdf_consistency(FamilyId fam, const ParamVector& theta);
std::vector<std::string> score_gradient(FamilyId fam, const ParamVector& theta, double rel_tol = 1e-6);
// Symmetry, finiteness and positive definiteness; for ML also the largest
// eigenvalue <= 1/2, which does not hold for every MM estimator.
std::vector<std::string> sigma_properties(FamilyId fam, EstimatorKind kind, const ParamVector& theta,
                                          const trigof::KnownMask& mask);

// All sigma checks over the grid, both estimators where defined, with no
// parameter known and with each single parameter known.
std::vector<std::string> sigma_grid();

// MM configurations (shape fixed where required) whose Sigma has an
// eigenvalue above 1/2, formatted as "family(theta): value".
std::vector<std::string> mm_eigen_exceedances();

// Sigma as E[(tau - G phi)(tau - G phi)^T] with phi the influence function of
// the unknown components, every expectation by quadrature.
trigof::linalg::Matrix direct_sigma(FamilyId fam, EstimatorKind kind, const ParamVector& theta,
                                    const trigof::KnownMask& mask);

std::string describe(FamilyId fam, const ParamVector& theta);

}  // namespace oracle
