#pragma once

// Maximal dominator sets (an MIS of G^2) and maximal U-dominator sets (an MIS
// of H', the U-side "shares a V-neighbor" graph) via Luby's select step run
// in place, without materializing G^2 or H'.

#include <cstdint>
#include <span>
#include <vector>

#include "facloc/instance.hpp"
#include "facloc/primitives.hpp"

namespace facloc {

// Simple undirected graph on n nodes with a dense symmetric adjacency.
class Graph {
 public:
  explicit Graph(std::size_t n) : adj_(n, n) {}
  // Takes a prebuilt adjacency; it must be square, symmetric and loop-free.
  explicit Graph(BitMatrix adj);

  std::size_t size() const { return adj_.rows(); }
  bool adjacent(std::size_t a, std::size_t b) const { return adj_(a, b); }
  // Adds the undirected edge a-b. Self-loops are rejected.
  void add_edge(std::size_t a, std::size_t b);
  const BitMatrix& adjacency() const { return adj_; }

 private:
  BitMatrix adj_;
};

// Bipartite graph H = (U, V, E) with a dense U x V adjacency.
class Bipartite {
 public:
  Bipartite(std::size_t u, std::size_t v) : adj_(u, v), deg_u_(u, 0), deg_v_(v, 0) {}
  explicit Bipartite(BitMatrix adj);

  std::size_t u_size() const { return adj_.rows(); }
  std::size_t v_size() const { return adj_.cols(); }
  bool adjacent(std::size_t u, std::size_t v) const { return adj_(u, v); }
  void add_edge(std::size_t u, std::size_t v);
  std::uint32_t degree_u(std::size_t u) const { return deg_u_[u]; }
  std::uint32_t degree_v(std::size_t v) const { return deg_v_[v]; }
  const BitMatrix& adjacency() const { return adj_; }

 private:
  BitMatrix adj_;
  std::vector<std::uint32_t> deg_u_;
  std::vector<std::uint32_t> deg_v_;
};

struct DominatorResult {
  std::vector<Index> members;  // ascending
  std::uint64_t rounds = 0;
};

// One select step. Node i (among active nodes) is selected iff its label is
// the minimum over its active distance-<=2 neighborhood; the minimum is found
// by two min-distribution passes. Intermediate nodes need not be active.
// An empty `active` span means every node is active.
std::vector<Index> luby_select_round(Executor& ex, const Graph& g, std::span<const Label> labels,
                                     std::span<const std::uint8_t> active = {});
// Bipartite variant: labels live on U and the two hops go U -> V -> U.
std::vector<Index> luby_select_round(Executor& ex, const Bipartite& h,
                                     std::span<const Label> labels,
                                     std::span<const std::uint8_t> active_u = {});

DominatorResult max_dom(Executor& ex, const Graph& g, std::uint64_t seed);
DominatorResult max_u_dom(Executor& ex, const Bipartite& h, std::uint64_t seed);

}  // namespace facloc
