#pragma once

// Exhaustive solvers and structural checkers used as ground truth on small
// inputs. None of these share code paths with the approximation algorithms.

#include <cstddef>
#include <vector>

#include "facloc/centers.hpp"
#include "facloc/dominator.hpp"
#include "facloc/instance.hpp"

namespace facloc {

inline constexpr std::size_t kMaxOracleFacilities = 20;
inline constexpr std::size_t kMaxOracleSubsets = 1'000'000;

struct ExactFacLoc {
  double opt = 0.0;
  std::vector<Index> open;  // lexicographically smallest optimal set
};

// Minimum facility-location cost over all nonempty facility subsets. Throws
// SizeError when n_f exceeds kMaxOracleFacilities.
ExactFacLoc exact_facloc(const FLInstance& inst);

struct ExactCenters {
  double opt = 0.0;
  std::vector<Index> centers;
};

// Exact optimum over all k-subsets. Throws SizeError when C(n, k) exceeds
// kMaxOracleSubsets.
ExactCenters exact_kobjective(const CenterInstance& cinst, std::size_t k, Objective objective);

struct DominatorCheck {
  bool independent = true;
  bool maximal = true;
  bool ok() const { return independent && maximal; }
};

// Builds G^2 explicitly and checks that `set` is a maximal independent set of it.
DominatorCheck check_dominator(const Graph& g, const std::vector<Index>& set);
// Builds H' explicitly and checks that `set` (U-side) is a maximal independent
// set of it.
DominatorCheck check_dominator(const Bipartite& h, const std::vector<Index>& set);

// Number of k-subsets of n, saturating at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k);

}  // namespace facloc
