#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "facloc/primitives.hpp"

namespace facloc {

using Index = std::uint32_t;

// Coordinates for geometrically generated instances, row-major by point.
struct Points {
  std::size_t dim = 0;
  std::vector<double> facilities;  // n_f * dim
  std::vector<double> clients;     // n_c * dim

  bool operator==(const Points&) const = default;
};

// Uncapacitated facility-location instance. Immutable once built; the
// constructor validates sizes, signs and finiteness, and (when coordinates
// are given) that the matrix matches them.
class FLInstance {
 public:
  // dist is client-major: dist(j, i) is the cost of serving client j from
  // facility i.
  FLInstance(std::vector<double> facility_costs, DenseMatrix dist,
             std::optional<Points> points = std::nullopt);

  std::size_t num_facilities() const { return costs_.size(); }
  std::size_t num_clients() const { return dist_.rows(); }
  std::size_t m() const { return num_facilities() * num_clients(); }

  double cost(std::size_t i) const { return costs_[i]; }
  std::span<const double> facility_costs() const { return costs_; }
  double dist(std::size_t j, std::size_t i) const { return dist_(j, i); }
  const DenseMatrix& dist_matrix() const { return dist_; }
  const std::optional<Points>& points() const { return points_; }

  bool operator==(const FLInstance&) const = default;

 private:
  std::vector<double> costs_;
  DenseMatrix dist_;
  std::optional<Points> points_;
};

struct GammaBounds {
  std::vector<double> gamma_j;  // min_i (f_i + d(j, i))
  double gamma = 0.0;           // max_j gamma_j
  double sum_gamma = 0.0;
};

struct Solution {
  std::vector<Index> open;    // sorted, unique
  std::vector<Index> assign;  // pi_j, always a member of open
  double facility_cost = 0.0;
  double connection_cost = 0.0;  // sum_j d(j, pi_j)
  double total = 0.0;
  std::uint64_t rounds = 0;
  std::uint64_t subselection_rounds = 0;
  std::uint64_t primitive_calls = 0;

  bool operator==(const Solution&) const = default;
};

struct MetricCheck {
  bool ok = true;
  // First (a, b, c) in scan order with d(a, c) > d(a, b) + d(b, c) + tol.
  std::optional<std::array<std::size_t, 3>> violation;
  double excess = 0.0;
};

// Per-facility dual constraint check: lhs_i <= f_i + tol for every i.
struct DualCheck {
  bool ok = true;
  std::optional<Index> worst_facility;  // smallest slack f_i - lhs_i, lowest index on ties
  double worst_slack = 0.0;
};

// lhs <= rhs + tol for a cost-vs-dual ledger inequality.
struct LedgerCheck {
  bool ok = true;
  double lhs = 0.0;
  double rhs = 0.0;
};

// Uniform points in the unit dim-cube, costs uniform in [cost_lo, cost_hi].
FLInstance gen_euclidean(std::size_t n_f, std::size_t n_c, std::size_t dim, double cost_lo,
                         double cost_hi, std::uint64_t seed);

// Checks every triple of a symmetric square distance matrix (additive 1e-9).
MetricCheck verify_metric(const DenseMatrix& full);

// Checks the combined facility+client point set. Facilities take indices
// [0, n_f) and clients [n_f, n_f + n_c). Without coordinates, same-side
// distances are the shortest two-hop paths through the other side.
MetricCheck verify_metric(const FLInstance& inst);

// Full (n_f + n_c)^2 distance matrix used by verify_metric.
DenseMatrix combined_distances(const FLInstance& inst);

GammaBounds gamma_bounds(Executor& ex, const FLInstance& inst);
GammaBounds gamma_bounds(const FLInstance& inst);

// Builds a Solution from an open set and assignment, filling in costs. Throws
// std::invalid_argument if some pi_j is not open.
Solution make_solution(const FLInstance& inst, std::vector<Index> open, std::vector<Index> assign);

// Facility costs plus nearest-open connection costs.
double facloc_cost(const FLInstance& inst, std::span<const Index> open);
double nearest_connection_cost(const FLInstance& inst, std::span<const Index> open);

}  // namespace facloc
