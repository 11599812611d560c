#pragma once

#include <algorithm>
#include <cmath>

namespace facloc {

// Feasibility comparisons: relative 1e-9, absolute 1e-12 near zero.
inline constexpr double kRelTol = 1e-9;
inline constexpr double kAbsTol = 1e-12;
// Tie detection for strict price comparisons.
inline constexpr double kTieTol = 1e-12;

inline double tol_for(double a, double b, double rel = kRelTol) {
  return std::max(kAbsTol, rel * std::max(std::abs(a), std::abs(b)));
}

// a >= b, near-equality counts as satisfied.
inline bool approx_ge(double a, double b, double rel = kRelTol) { return a >= b - tol_for(a, b, rel); }
inline bool approx_le(double a, double b, double rel = kRelTol) { return a <= b + tol_for(a, b, rel); }
// a > b, near-equality counts as not satisfied.
inline bool strictly_greater(double a, double b, double rel = kRelTol) {
  return a > b + tol_for(a, b, rel);
}
inline bool strictly_less(double a, double b, double rel = kRelTol) {
  return a < b - tol_for(a, b, rel);
}

}  // namespace facloc
