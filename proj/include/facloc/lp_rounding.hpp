#pragma once

// Filtering and round-synchronous rounding of a given fractional facility
// location LP solution. The LP itself is an input; nothing here solves it.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "facloc/instance.hpp"
#include "facloc/primitives.hpp"

namespace facloc {

inline constexpr double kLpTol = 1e-7;

// x is facility-major: x(i, j) is the fraction of client j served by i.
struct LpSolution {
  DenseMatrix x;
  std::vector<double> y;
  double theta = 0.0;  // sum d x + sum f y, recomputed
};

// Validates sum_i x_ij = 1 and 0 <= x_ij <= y_i <= 1 (tolerance kLpTol) and
// computes theta. A declared objective must match it to the same relative
// tolerance. Throws ValidationError naming the broken constraint.
LpSolution make_lp(const FLInstance& inst, DenseMatrix x, std::vector<double> y,
                   std::optional<double> declared_theta = std::nullopt);

// The LP point of an integral solution: x_{pi_j, j} = 1, y = indicator of open.
LpSolution integral_lp(const FLInstance& inst, std::span<const Index> open,
                       std::span<const Index> assign);

struct FilteredLp {
  double alpha = 1.0 / 3.0;
  std::vector<double> delta;  // sum_i d(j,i) x_ij
  BitMatrix ball;             // C x F; B_j = {i : d(j,i) <= (1+alpha) delta_j}
  std::vector<double> mass;   // sum_{i in B_j} x_ij
  DenseMatrix x;              // x', facility-major
  std::vector<double> y;      // y' = min(1, (1 + 1/alpha) y)
};

FilteredLp filter(Executor& ex, const FLInstance& inst, const LpSolution& lp, double alpha);

struct LpRoundRecord {
  double tau = 0.0;
  std::size_t selected = 0;  // |S|
  std::size_t blocked = 0;   // members of S whose ball meets an earlier ball
  std::vector<Index> opened;  // I = {i_j : j in J}
  double facility_cost = 0.0;
  double facility_budget = 0.0;  // sum over the J balls of y'_i f_i
};

struct LpRoundResult {
  Solution solution;
  std::vector<Index> cheapest;  // i_j
  std::vector<Index> blocker;   // client whose facility serves j, or j itself
  std::vector<LpRoundRecord> history;
  std::uint64_t round_bound = 0;
  bool facility_claim_ok = true;   // per-round facility bound
  bool connection_claim_ok = true; // per-client connection bound
  bool facility_total_ok = true;   // sum_{F_A} f <= (1 + 1/alpha) sum f y
  double worst_connection_ratio = 0.0;  // max_j d(j, pi_j) / allowed
};

LpRoundResult lp_round(Executor& ex, const FLInstance& inst, const LpSolution& lp,
                       const FilteredLp& filtered, double eps, std::uint64_t seed);

LpRoundResult lp_round_solve(Executor& ex, const FLInstance& inst, const LpSolution& lp,
                             double alpha, double eps, std::uint64_t seed);

// (1 + 1/alpha) sum f y + 3(1+alpha)(1+eps) sum delta + theta/m; with
// alpha = 1/3 this is at most 4(1+eps) theta + theta/m.
double lp_cost_bound(const FLInstance& inst, const LpSolution& lp, const FilteredLp& filtered,
                     double eps);

}  // namespace facloc
