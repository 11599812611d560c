#include "facloc/dominator.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "facloc/rng.hpp"

namespace facloc {

Graph::Graph(BitMatrix adj) : adj_(std::move(adj)) {
  const std::size_t n = adj_.rows();
  if (adj_.cols() != n) throw std::invalid_argument("graph adjacency must be square");
  for (std::size_t a = 0; a < n; ++a) {
    if (adj_(a, a)) throw std::invalid_argument("self-loops are not allowed");
    for (std::size_t b = a + 1; b < n; ++b) {
      if (adj_(a, b) != adj_(b, a)) throw std::invalid_argument("graph adjacency must be symmetric");
    }
  }
}

Bipartite::Bipartite(BitMatrix adj)
    : adj_(std::move(adj)), deg_u_(adj_.rows(), 0), deg_v_(adj_.cols(), 0) {
  for (std::size_t u = 0; u < adj_.rows(); ++u) {
    for (std::size_t v = 0; v < adj_.cols(); ++v) {
      if (adj_(u, v)) {
        ++deg_u_[u];
        ++deg_v_[v];
      }
    }
  }
}

void Graph::add_edge(std::size_t a, std::size_t b) {
  if (a == b) throw std::invalid_argument("self-loops are not allowed");
  adj_.set(a, b, true);
  adj_.set(b, a, true);
}

void Bipartite::add_edge(std::size_t u, std::size_t v) {
  if (adj_(u, v)) return;
  adj_.set(u, v, true);
  ++deg_u_[u];
  ++deg_v_[v];
}

namespace {

constexpr auto kMinLabel = [](const Label& a, const Label& b) { return b < a ? b : a; };
constexpr auto kOr = [](std::uint8_t a, std::uint8_t b) -> std::uint8_t { return a | b; };

bool is_active(std::span<const std::uint8_t> active, std::size_t i) {
  return active.empty() || active[i] != 0;
}

std::vector<Index> gather(Executor& ex, std::size_t n, std::span<const Label> labels,
                          std::span<const Label> best, std::span<const std::uint8_t> active) {
  std::vector<std::uint8_t> flag(n, 0);
  ex.parallel_for(n, [&](std::size_t i) {
    flag[i] = is_active(active, i) && best[i] == labels[i] ? 1 : 0;
  });
  std::vector<Index> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (flag[i]) out.push_back(static_cast<Index>(i));
  }
  return out;
}

}  // namespace

std::vector<Index> luby_select_round(Executor& ex, const Graph& g, std::span<const Label> labels,
                                     std::span<const std::uint8_t> active) {
  const std::size_t n = g.size();
  // Hop 1: every node (active or not) takes the min label over its closed
  // neighborhood restricted to active nodes.
  const auto hop1 = reduce_rows_by(
      ex, n, n,
      [&](std::size_t z, std::size_t w) {
        return (w == z || g.adjacent(z, w)) && is_active(active, w) ? labels[w]
                                                                     : Label::infinity();
      },
      Label::infinity(), kMinLabel);
  // Hop 2: pull the hop-1 minima back over the closed neighborhood.
  const auto hop2 = reduce_rows_by(
      ex, n, n,
      [&](std::size_t i, std::size_t z) {
        return z == i || g.adjacent(i, z) ? hop1[z] : Label::infinity();
      },
      Label::infinity(), kMinLabel);
  return gather(ex, n, labels, hop2, active);
}

std::vector<Index> luby_select_round(Executor& ex, const Bipartite& h,
                                     std::span<const Label> labels,
                                     std::span<const std::uint8_t> active_u) {
  const std::size_t nu = h.u_size();
  const std::size_t nv = h.v_size();
  const auto hop1 = reduce_cols_by(
      ex, nu, nv,
      [&](std::size_t u, std::size_t v) {
        return h.adjacent(u, v) && is_active(active_u, u) ? labels[u] : Label::infinity();
      },
      Label::infinity(), kMinLabel);
  const auto hop2 = reduce_rows_by(
      ex, nu, nv,
      [&](std::size_t u, std::size_t v) { return h.adjacent(u, v) ? hop1[v] : Label::infinity(); },
      Label::infinity(), kMinLabel);
  // An isolated U-node sees only itself.
  std::vector<Label> best(nu);
  for (std::size_t u = 0; u < nu; ++u) best[u] = std::min(hop2[u], labels[u]);
  return gather(ex, nu, labels, best, active_u);
}

DominatorResult max_dom(Executor& ex, const Graph& g, std::uint64_t seed) {
  const std::size_t n = g.size();
  DominatorResult result;
  std::vector<std::uint8_t> active(n, 1);
  std::size_t remaining = n;
  while (remaining > 0) {
    const auto labels = random_labels(ex, n, seed, result.rounds);
    const auto selected = luby_select_round(ex, g, labels, active);
    ++result.rounds;

    std::vector<std::uint8_t> chosen(n, 0);
    for (Index i : selected) chosen[i] = 1;
    result.members.insert(result.members.end(), selected.begin(), selected.end());

    // Drop the selected nodes together with their distance-<=2 neighborhoods.
    const auto near1 = reduce_rows_by(
        ex, n, n,
        [&](std::size_t z, std::size_t w) -> std::uint8_t {
          return (w == z || g.adjacent(z, w)) ? chosen[w] : 0;
        },
        std::uint8_t{0}, kOr);
    const auto near2 = reduce_rows_by(
        ex, n, n,
        [&](std::size_t w, std::size_t z) -> std::uint8_t {
          return (z == w || g.adjacent(w, z)) ? near1[z] : 0;
        },
        std::uint8_t{0}, kOr);
    ex.parallel_for(n, [&](std::size_t w) {
      if (near2[w]) active[w] = 0;
    });
    remaining = reduce_by(
        ex, n, [&](std::size_t i) -> std::size_t { return active[i]; }, std::size_t{0},
        std::plus<>{});
  }
  std::sort(result.members.begin(), result.members.end());
  return result;
}

DominatorResult max_u_dom(Executor& ex, const Bipartite& h, std::uint64_t seed) {
  const std::size_t nu = h.u_size();
  const std::size_t nv = h.v_size();
  DominatorResult result;
  std::vector<std::uint8_t> active(nu, 1);
  std::size_t remaining = nu;
  while (remaining > 0) {
    const auto labels = random_labels(ex, nu, seed, result.rounds);
    const auto selected = luby_select_round(ex, h, labels, active);
    ++result.rounds;

    std::vector<std::uint8_t> chosen(nu, 0);
    for (Index u : selected) chosen[u] = 1;
    result.members.insert(result.members.end(), selected.begin(), selected.end());

    // V-nodes covered by a selected node, then every U-node touching one.
    const auto covered = reduce_cols_by(
        ex, nu, nv,
        [&](std::size_t u, std::size_t v) -> std::uint8_t { return h.adjacent(u, v) ? chosen[u] : 0; },
        std::uint8_t{0}, kOr);
    const auto blocked = reduce_rows_by(
        ex, nu, nv,
        [&](std::size_t u, std::size_t v) -> std::uint8_t { return h.adjacent(u, v) ? covered[v] : 0; },
        std::uint8_t{0}, kOr);
    ex.parallel_for(nu, [&](std::size_t u) {
      if (chosen[u] || blocked[u]) active[u] = 0;
    });
    remaining = reduce_by(
        ex, nu, [&](std::size_t i) -> std::size_t { return active[i]; }, std::size_t{0},
        std::plus<>{});
  }
  std::sort(result.members.begin(), result.members.end());
  return result;
}

}  // namespace facloc
