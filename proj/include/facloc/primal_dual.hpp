#pragma once

// Parallel primal-dual facility location: free-facility preprocessing, a
// geometric ladder for the duals, tentative opening and freezing, then a
// maximal U-dominator cleanup over the contribution graph H.

#include <cstdint>
#include <span>
#include <vector>

#include "facloc/greedy.hpp"
#include "facloc/instance.hpp"
#include "facloc/primitives.hpp"

namespace facloc {

struct PDState {
  double eps = 0.1;
  double t0 = 0.0;              // ladder start, gamma/m^2 by default
  std::uint64_t iteration = 0;  // next ladder index
  std::vector<double> alpha;
  std::vector<std::uint8_t> frozen;
  std::vector<std::uint8_t> tentative;  // F_T
  std::vector<std::uint8_t> free;       // F_0, disjoint from F_T
  std::vector<Index> free_pi;           // facility of a freely connected client, else kNoFacility
  BitMatrix h;                          // F x C; rows outside F_T stay empty
  bool finalized = false;

  double ladder(std::uint64_t l) const;
  bool done() const;  // every facility open or every client frozen
};

PDState make_pd_state(const FLInstance& inst, double eps, double t0);

// F_0 = {i : sum_j max(0, t0 - d(j,i)) >= f_i}; clients within t0 of a free
// facility get alpha = 0, freeze, and remember the lowest such facility.
void pd_preprocess(Executor& ex, const FLInstance& inst, PDState& state);

// One ladder iteration: raise, open, freeze, extend H.
void pd_round(Executor& ex, const FLInstance& inst, PDState& state);

// Unfrozen clients left once every facility is open take alpha = min_i d(j,i).
void pd_finalize(Executor& ex, const FLInstance& inst, PDState& state);

enum class PDCase : std::uint8_t {
  kFree = 1,      // within t0 of a free facility
  kEdge = 2,      // H-edge to a member of I
  kTight = 3,     // a member of I is within (1+eps) alpha_j
  kTightFree = 4, // a free facility is within (1+eps) alpha_j
  kIndirect = 5,  // neighbor of a neighbor of some tentative facility
};

struct PDAssignment {
  std::vector<Index> dominators;  // I
  std::vector<Index> open;        // I union F_0
  std::vector<Index> pi;
  std::vector<PDCase> cases;
  std::uint64_t dominator_rounds = 0;
};

PDAssignment pd_postprocess(Executor& ex, const FLInstance& inst, const PDState& state,
                            std::uint64_t seed);

struct PDOptions {
  // Check sum_j max(0, alpha_j - d(j,i)) <= f_i after every iteration.
  bool check_each_iteration = false;
};

struct PDResult {
  Solution solution;
  PDState state;
  PDAssignment assignment;
  double gamma = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t iteration_bound = 0;
  std::vector<std::uint64_t> round_calls;  // primitive calls per ladder iteration
};

// 3 log_{1+eps} m + 2, rounded down.
std::uint64_t pd_iteration_bound(std::size_t m, double eps);

PDResult pd_solve(Executor& ex, const FLInstance& inst, double eps, std::uint64_t seed,
                  PDOptions options = {});

// Dual feasibility of alpha with beta_ij = max(0, alpha_j - d(j,i)), over all
// facilities; this implies the per-facility bound over Gamma_H(i).
DualCheck pd_dual_check(const FLInstance& inst, std::span<const double> alpha);

// 3 sum_{F_A} f_i + sum_j d(j, pi_j) <= 3 gamma/m + 3(1+eps) sum_j alpha_j.
LedgerCheck pd_ledger_check(const FLInstance& inst, const Solution& solution,
                            std::span<const double> alpha, double eps);

}  // namespace facloc
