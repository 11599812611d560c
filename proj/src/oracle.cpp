#include "facloc/oracle.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "facloc/errors.hpp"
#include "facloc/tolerance.hpp"

namespace facloc {

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::size_t>::max()) return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(r);
}

ExactFacLoc exact_facloc(const FLInstance& inst) {
  const std::size_t nf = inst.num_facilities();
  const std::size_t nc = inst.num_clients();
  if (nf > kMaxOracleFacilities) {
    throw SizeError("exact facility location is limited to " +
                    std::to_string(kMaxOracleFacilities) + " facilities");
  }
  ExactFacLoc best;
  best.opt = std::numeric_limits<double>::infinity();
  std::vector<Index> set;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << nf); ++mask) {
    set.clear();
    double cost = 0.0;
    for (std::size_t i = 0; i < nf; ++i) {
      if (mask >> i & 1) {
        set.push_back(static_cast<Index>(i));
        cost += inst.cost(i);
      }
    }
    for (std::size_t j = 0; j < nc; ++j) {
      double d = std::numeric_limits<double>::infinity();
      for (Index i : set) d = std::min(d, inst.dist(j, i));
      cost += d;
    }
    const double tol = tol_for(cost, best.opt == std::numeric_limits<double>::infinity() ? 0.0 : best.opt);
    if (cost < best.opt - tol || (cost <= best.opt + tol && set < best.open)) {
      best.opt = std::min(best.opt, cost);
      best.open = set;
    }
  }
  return best;
}

ExactCenters exact_kobjective(const CenterInstance& cinst, std::size_t k, Objective objective) {
  const std::size_t n = cinst.size();
  if (k < 1 || k > n) throw std::invalid_argument("k must satisfy 1 <= k <= n");
  if (binomial(n, k) > kMaxOracleSubsets) {
    throw SizeError("exact k-objective is limited to " + std::to_string(kMaxOracleSubsets) +
                    " subsets");
  }
  // prev_permutation over a leading-ones mask walks k-subsets in
  // lexicographic order, so the first strict minimum is the smallest set.
  std::vector<char> mask(n, 0);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), 1);
  ExactCenters best;
  best.opt = std::numeric_limits<double>::infinity();
  std::vector<Index> set;
  do {
    set.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) set.push_back(static_cast<Index>(i));
    }
    const double cost = center_objective(cinst, set, objective);
    if (best.centers.empty() || strictly_less(cost, best.opt)) {
      best.opt = cost;
      best.centers = set;
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

namespace {

DominatorCheck check_conflict(const BitMatrix& conflict, const std::vector<Index>& set) {
  const std::size_t n = conflict.rows();
  DominatorCheck out;
  std::vector<char> in(n, 0);
  for (Index v : set) {
    if (v >= n || in[v]) {
      out.independent = false;
      continue;
    }
    in[v] = 1;
  }
  for (std::size_t a = 0; a < set.size(); ++a) {
    for (std::size_t b = a + 1; b < set.size(); ++b) {
      if (set[a] < n && set[b] < n && conflict(set[a], set[b])) out.independent = false;
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (in[v]) continue;
    bool dominated = false;
    for (Index s : set) {
      if (s < n && conflict(v, s)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.maximal = false;
  }
  return out;
}

}  // namespace

DominatorCheck check_dominator(const Graph& g, const std::vector<Index>& set) {
  const std::size_t n = g.size();
  BitMatrix sq(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      bool near = g.adjacent(a, b);
      for (std::size_t z = 0; z < n && !near; ++z) near = g.adjacent(a, z) && g.adjacent(z, b);
      sq.set(a, b, near);
    }
  }
  return check_conflict(sq, set);
}

DominatorCheck check_dominator(const Bipartite& h, const std::vector<Index>& set) {
  const std::size_t nu = h.u_size();
  BitMatrix shared(nu, nu);
  for (std::size_t a = 0; a < nu; ++a) {
    for (std::size_t b = 0; b < nu; ++b) {
      if (a == b) continue;
      bool s = false;
      for (std::size_t v = 0; v < h.v_size() && !s; ++v) s = h.adjacent(a, v) && h.adjacent(b, v);
      shared.set(a, b, s);
    }
  }
  return check_conflict(shared, set);
}

}  // namespace facloc
