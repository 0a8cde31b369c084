#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>

namespace trigof::hconst {

// Number of arguments taken by h_index (index in 1..37).
int arity(int index);

// The numerically evaluated integrals h_1 .. h_37 used by the covariance
// matrices. Results are memoized per (index, args rounded to 15 significant
// digits); the cache is safe for concurrent use.
double h(int index, std::span<const double> args);
double h(int index, std::initializer_list<double> args);

// Evaluates without touching the memo cache.
double h_uncached(int index, std::span<const double> args);

void clear_cache();
std::size_t cache_size();

struct LogisticConstants {
    double c_cos;  // E[cos(2 pi U) (Y (2U - 1) - 1)]
    double c_sin;  // E[sin(2 pi U) (2U - 1)]
    double m_cos;  // moment-estimator counterpart of c_cos
    double m_sin;  // moment-estimator counterpart of c_sin
};

// Recomputes the four logistic integrals by quadrature over the PIT scale.
LogisticConstants logistic_constants();

}  // namespace trigof::hconst
