#pragma once

// Parallel greedy facility location: cheapest maximal stars, (1+eps)-slack
// selection, randomized facility subselection and a dual-fitting certificate.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "facloc/dominator.hpp"
#include "facloc/instance.hpp"
#include "facloc/primitives.hpp"

namespace facloc {

inline constexpr Index kNoFacility = std::numeric_limits<Index>::max();

struct Star {
  double price = std::numeric_limits<double>::infinity();
  std::size_t size = 0;  // kappa; 0 when no client remains
  double radius = 0.0;   // distance of the kappa-th client
};

// p_k = (f + sum_{j<=k} d_j) / k over a nondecreasing distance list; returns
// the smallest k with p_k < p_{k+1} (relative 1e-12 counts as equal), else
// the full length. Uses one prefix-sum call.
Star cheapest_maximal_star(Executor& ex, double f, std::span<const double> sorted_dists);

// Current facility costs, remaining clients and the facility-major presorted
// distance rows. Sorting happens once, in the constructor.
class StarState {
 public:
  StarState(Executor& ex, const FLInstance& inst);

  const FLInstance& instance() const { return *inst_; }
  double cost(std::size_t i) const { return cost_[i]; }
  void zero_cost(std::size_t i) { cost_[i] = 0.0; }
  bool remaining(std::size_t j) const { return remaining_[j] != 0; }
  std::span<const std::uint8_t> remaining_mask() const { return remaining_; }
  std::size_t num_remaining() const { return num_remaining_; }
  void remove_client(std::size_t j);

  // Distance of the r-th nearest client of facility i, and that client.
  double sorted_dist(std::size_t i, std::size_t r) const { return sorted_.values(i, r); }
  Index sorted_client(std::size_t i, std::size_t r) const { return sorted_.index.order(i, r); }

  // Cheapest maximal star of every facility over the remaining clients.
  std::vector<Star> stars(Executor& ex) const;

 private:
  const FLInstance* inst_;
  std::vector<double> cost_;
  std::vector<std::uint8_t> remaining_;
  std::size_t num_remaining_;
  SortedRows sorted_;
};

// alpha_j is the tau of the round that removed j (0 for preprocessing);
// pi_j is the facility j was charged to.
struct GreedyDual {
  std::vector<double> alpha;
  std::vector<Index> pi;
};

struct GreedyPreprocess {
  std::vector<Index> opened;
  std::vector<Index> removed;
  std::uint64_t passes = 0;
};

// Opens every facility whose star price is <= gamma/m^2, removing its star,
// and repeats until no remaining star is that cheap.
GreedyPreprocess greedy_preprocess(Executor& ex, StarState& state, GreedyDual& dual, double gamma);

struct SubselectResult {
  std::vector<Index> opened;
  std::vector<Index> removed;
  std::uint64_t rounds = 0;
  // min over opened facilities of |{j : phi_j = i}| / deg(i) at opening time
  double min_paid_fraction = 1.0;
};

// Facility subselection on H (U = facilities, V = clients). in_i marks the
// facility set I; clients already removed from `state` are ignored.
SubselectResult subselect(Executor& ex, StarState& state, GreedyDual& dual, const Bipartite& h,
                          std::vector<std::uint8_t> in_i, double tau, double eps,
                          std::uint64_t seed);

struct GreedyResult {
  Solution solution;
  GreedyDual dual;
  std::uint64_t outer_rounds = 0;
  std::uint64_t round_bound = 0;
  std::vector<double> taus;  // one per outer round
  GreedyPreprocess preprocess;
  double min_paid_fraction = 1.0;
};

// ceil(log_{1+eps}(m^3)) + 2
std::uint64_t greedy_round_bound(std::size_t m, double eps);

GreedyResult greedy_solve(Executor& ex, const FLInstance& inst, double eps, std::uint64_t seed);

// sum_j max(0, alpha_j/divisor - d(j,i)) <= f_i for every facility, against
// the original costs.
DualCheck greedy_dual_check(const FLInstance& inst, std::span<const double> alpha,
                            double divisor = 3.0);

// sum_{F_A} f_i + sum_j d(j, pi_j) <= 2(1+eps)^2 sum_j alpha_j + gamma/m.
LedgerCheck greedy_ledger_check(const FLInstance& inst, const Solution& solution,
                                std::span<const double> alpha, double eps);

}  // namespace facloc
