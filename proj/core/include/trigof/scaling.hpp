#pragma once

#include "trigof/estimate.hpp"
#include "trigof/families.hpp"
#include "trigof/linalg.hpp"

#include <vector>

namespace trigof {

// G = E[tau s^T], R (Fisher information for ML, Cov(psi)^{-1} for MM) and
// J = E[tau r^T]. Rows of G and J are (cos, sin); columns follow the
// family's parameter order.
struct MatrixSet {
    FamilyId family;
    EstimatorKind kind;
    linalg::Matrix G;
    linalg::Matrix R;
    linalg::Matrix J;
    // Components the estimator never estimates (the MM shape parameter).
    // Their R rows/columns and J columns are placeholders and must be masked.
    std::vector<int> required_known;
};

bool supports(FamilyId fam, EstimatorKind kind);

MatrixSet matrices(FamilyId fam, EstimatorKind kind, const ParamVector& theta);

// Sigma after dropping the known components. Exactly I/2 when every
// component is known.
linalg::Matrix sigma(const MatrixSet& ms, const KnownMask& mask);

// Convenience: matrices() followed by sigma().
linalg::Matrix sigma(FamilyId fam, EstimatorKind kind, const ParamVector& theta, const KnownMask& mask);

// Symmetric M with M Sigma M = I.
linalg::Matrix sigma_inverse_sqrt(const linalg::Matrix& s);

}  // namespace trigof
