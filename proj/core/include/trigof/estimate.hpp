#pragma once

#include "trigof/families.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trigof {

enum class EstimatorKind { ml, mm };

const char* to_string(EstimatorKind kind) noexcept;
EstimatorKind estimator_from_name(std::string_view name);

// Which parameter components are fixed, and at what values.
class KnownMask {
public:
    KnownMask() = default;

    static KnownMask none(FamilyId fam);
    static KnownMask all(FamilyId fam, const ParamVector& theta);

    KnownMask& fix(int index, double value);
    KnownMask& fix(FamilyId fam, std::string_view name, double value);

    int size() const noexcept { return static_cast<int>(known_.size()); }
    bool is_known(int index) const { return known_.at(index); }
    double value(int index) const { return values_.at(index); }
    int unknown_count() const noexcept;
    bool all_known() const noexcept { return unknown_count() == 0; }
    bool none_known() const noexcept { return unknown_count() == size(); }
    std::vector<int> unknown_indices() const;
    std::vector<int> known_indices() const;

    // theta with the known components overwritten.
    ParamVector apply(ParamVector theta) const;

private:
    std::vector<bool> known_;
    std::vector<double> values_;
};

struct FitResult {
    ParamVector theta;
    int iterations = 0;
    bool converged = false;
    // Largest scale-normalized mean estimating equation over the unknown,
    // differentiable components.
    double residual = 0.0;
    std::string note;
};

struct FitOptions {
    double step_tol = 1e-10;
    double residual_tol = 1e-8;
    int max_iter = 200;
    // Bracket for shape-type roots; expanded geometrically from the start.
    double shape_lo = 1e-3;
    double shape_hi = 1e3;
};

// True when the family offers this estimator.
bool has_estimator(FamilyId fam, EstimatorKind kind);

// True when fit() supports the mask for this family and estimator (MM rows
// that need the shape parameter known reject masks that leave it free).
bool supports_mask(FamilyId fam, EstimatorKind kind, const KnownMask& mask);

FitResult fit(FamilyId fam, EstimatorKind kind, const KnownMask& mask, std::span<const double> x,
              const FitOptions& opts = {});

// Per-observation score d/dtheta ln f(x | theta).
std::vector<double> score(FamilyId fam, const ParamVector& theta, double x);

// Per-observation estimating function: the score for ML, the moment
// influence function psi for MM (theta_hat - theta ~ mean psi). Components
// that MM never estimates (a known shape) are zero.
std::vector<double> estimating_function(FamilyId fam, EstimatorKind kind, const ParamVector& theta, double x);

double log_likelihood(FamilyId fam, const ParamVector& theta, std::span<const double> x);

// Median with the even-n convention (average of the two middle values).
double median(std::span<const double> x);

}  // namespace trigof
