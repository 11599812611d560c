#pragma once

// k-center by threshold binary search with dominator-set probes, and
// k-median / k-means local search with all swaps evaluated in parallel.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "facloc/instance.hpp"
#include "facloc/primitives.hpp"

namespace facloc {

enum class Objective { kMedian, kMeans, kCenter };

std::string_view to_string(Objective o);

// n points with a symmetric distance matrix and zero diagonal.
class CenterInstance {
 public:
  explicit CenterInstance(DenseMatrix dist);

  // Euclidean distances between coords (row-major, n * dim).
  static CenterInstance from_points(std::span<const double> coords, std::size_t dim);

  std::size_t size() const { return dist_.rows(); }
  double dist(std::size_t a, std::size_t b) const { return dist_(a, b); }
  const DenseMatrix& dist_matrix() const { return dist_; }

 private:
  DenseMatrix dist_;
};

// kMed = sum of distances, kMeans = sum of squares, kCenter = max distance,
// each to the nearest member of `centers`.
double center_objective(const CenterInstance& cinst, std::span<const Index> centers,
                        Objective objective);

struct KCenterProbe {
  std::size_t t = 0;        // 1-based index into the sorted distinct distances
  std::size_t size = 0;     // |MaxDom(H_{d_t})|
};

struct KCenterResult {
  std::vector<Index> centers;
  double radius = 0.0;
  std::size_t threshold_index = 0;  // 1-based t
  double threshold = 0.0;           // d_t
  // t == 1, or the probe at t - 1 was run and returned more than k nodes.
  bool previous_probe_failed = false;
  std::vector<KCenterProbe> probes;  // in evaluation order
  std::uint64_t primitive_calls = 0;
};

KCenterResult kcenter_solve(Executor& ex, const CenterInstance& cinst, std::size_t k,
                            std::uint64_t seed);

struct Swap {
  Index out = 0;
  Index in = 0;
  double new_cost = 0.0;
};

// Current center set with nearest / second-nearest open center per client,
// maintained from presorted distance rows.
class SwapState {
 public:
  SwapState(Executor& ex, const CenterInstance& cinst, std::vector<Index> open,
            Objective objective, double eps);

  const CenterInstance& instance() const { return *cinst_; }
  const std::vector<Index>& open() const { return open_; }
  bool is_open(std::size_t i) const { return is_open_[i] != 0; }
  Index assigned(std::size_t j) const { return nearest_[j]; }
  Index second(std::size_t j) const { return second_[j]; }
  double cost() const { return cost_; }
  double beta() const { return beta_; }
  std::size_t k() const { return open_.size(); }
  Objective objective() const { return objective_; }

  // Per-client cost: distance, or its square for k-means.
  double weight(std::size_t j, std::size_t i) const;

  void apply(Executor& ex, const Swap& swap);

 private:
  void refresh(Executor& ex);

  const CenterInstance* cinst_;
  Objective objective_;
  double beta_;
  SortedRows sorted_;
  std::vector<Index> open_;
  std::vector<std::uint8_t> is_open_;
  std::vector<Index> nearest_;
  std::vector<Index> second_;  // == nearest_ when only one center is open
  double cost_ = 0.0;
};

// Best swap (largest decrease, ties by lexicographic (out, in)) if it beats
// (1 - beta/k) * cost; otherwise nullopt.
std::optional<Swap> find_improving_swap(Executor& ex, const SwapState& state);

struct LocalSearchResult {
  std::vector<Index> centers;
  std::vector<Index> assign;
  double cost = 0.0;
  std::vector<double> history;  // objective before the first swap and after each one
  std::uint64_t rounds = 0;     // accepted swaps
  std::uint64_t round_cap = 0;
  bool cap_exceeded = false;
  std::uint64_t primitive_calls = 0;
};

LocalSearchResult local_search_solve(Executor& ex, const CenterInstance& cinst, std::size_t k,
                                     double eps, Objective objective, std::uint64_t seed);

// Round cap recorded by local_search_solve: ceil(3 ln n / ln(1 / (1 - beta/k))) + 1.
std::uint64_t local_search_round_cap(std::size_t n, std::size_t k, double eps);

}  // namespace facloc
