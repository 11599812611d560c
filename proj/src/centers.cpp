#include "facloc/centers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "facloc/dominator.hpp"
#include "facloc/errors.hpp"
#include "facloc/rng.hpp"

namespace facloc {

std::string_view to_string(Objective o) {
  switch (o) {
    case Objective::kMedian:
      return "median";
    case Objective::kMeans:
      return "means";
    case Objective::kCenter:
      return "center";
  }
  return "?";
}

CenterInstance::CenterInstance(DenseMatrix dist) : dist_(std::move(dist)) {
  const std::size_t n = dist_.rows();
  if (n == 0 || dist_.cols() != n) throw ValidationError("center instance needs a square matrix");
  for (std::size_t a = 0; a < n; ++a) {
    if (dist_(a, a) != 0.0) throw ValidationError("center instance needs a zero diagonal");
    for (std::size_t b = 0; b < n; ++b) {
      const double d = dist_(a, b);
      if (!std::isfinite(d) || d < 0.0) throw ValidationError("distances must be finite and >= 0");
      if (d != dist_(b, a)) throw ValidationError("center distances must be symmetric");
    }
  }
}

CenterInstance CenterInstance::from_points(std::span<const double> coords, std::size_t dim) {
  if (dim == 0 || coords.empty() || coords.size() % dim != 0) {
    throw std::invalid_argument("coordinate array does not match dimension");
  }
  const std::size_t n = coords.size() / dim;
  DenseMatrix d(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double x = coords[a * dim + k] - coords[b * dim + k];
        s += x * x;
      }
      d(a, b) = d(b, a) = std::sqrt(s);
    }
  }
  return CenterInstance(std::move(d));
}

double center_objective(const CenterInstance& cinst, std::span<const Index> centers,
                        Objective objective) {
  if (centers.empty()) return std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (std::size_t j = 0; j < cinst.size(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (Index c : centers) best = std::min(best, cinst.dist(j, c));
    switch (objective) {
      case Objective::kMedian:
        total += best;
        break;
      case Objective::kMeans:
        total += best * best;
        break;
      case Objective::kCenter:
        total = std::max(total, best);
        break;
    }
  }
  return total;
}

namespace {

void require_k(std::size_t k, std::size_t n) {
  if (k < 1 || k > n) throw std::invalid_argument("k must satisfy 1 <= k <= n");
}

// Sorted distinct pairwise distances via sort + flag/prefix-sum compaction.
std::vector<double> distinct_distances(Executor& ex, const CenterInstance& cinst) {
  const std::size_t n = cinst.size();
  const auto values = cinst.dist_matrix().values();
  const DenseMatrix flat(1, n * n, std::vector<double>(values.begin(), values.end()));
  const SortedRows sorted = sort_rows(ex, flat);
  const auto row = sorted.values.row(0);
  std::vector<double> flag(row.size());
  ex.parallel_for(row.size(), [&](std::size_t t) {
    flag[t] = (t == 0 || row[t] != row[t - 1]) ? 1.0 : 0.0;
  });
  const auto pos = prefix_sum(ex, flag, ReduceOp::kSum, ScanKind::kExclusive);
  const auto count = static_cast<std::size_t>(pos.back() + flag.back());
  std::vector<double> out(count);
  ex.parallel_for(row.size(), [&](std::size_t t) {
    if (flag[t] != 0.0) out[static_cast<std::size_t>(pos[t])] = row[t];
  });
  return out;
}

Graph threshold_graph(Executor& ex, const CenterInstance& cinst, double threshold) {
  const std::size_t n = cinst.size();
  BitMatrix adj(n, n);
  ex.parallel_for(n, [&](std::size_t a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && cinst.dist(a, b) <= threshold) adj.set(a, b, true);
    }
  });
  return Graph(std::move(adj));
}

}  // namespace

KCenterResult kcenter_solve(Executor& ex, const CenterInstance& cinst, std::size_t k,
                            std::uint64_t seed) {
  require_k(k, cinst.size());
  const std::uint64_t start_calls = ex.calls();
  const auto distances = distinct_distances(ex, cinst);
  const std::size_t p = distances.size();

  KCenterResult result;
  std::map<std::size_t, DominatorResult> probed;
  auto probe = [&](std::size_t t) -> const DominatorResult& {
    auto it = probed.find(t);
    if (it != probed.end()) return it->second;
    const Graph h = threshold_graph(ex, cinst, distances[t - 1]);
    auto dom = max_dom(ex, h, derive_seed(seed, {tag_of("kcenter-probe"), t}));
    result.probes.push_back({t, dom.members.size()});
    return probed.emplace(t, std::move(dom)).first->second;
  };

  // hi always satisfies the predicate: at d_p the threshold graph is complete.
  std::size_t lo = 1;
  std::size_t hi = p;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (probe(mid).members.size() <= k) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const DominatorResult& chosen = probe(lo);
  result.centers = chosen.members;
  result.threshold_index = lo;
  result.threshold = distances[lo - 1];
  result.previous_probe_failed =
      lo == 1 || (probed.contains(lo - 1) && probed.at(lo - 1).members.size() > k);
  result.radius = center_objective(cinst, result.centers, Objective::kCenter);
  result.primitive_calls = ex.calls() - start_calls;
  return result;
}

SwapState::SwapState(Executor& ex, const CenterInstance& cinst, std::vector<Index> open,
                     Objective objective, double eps)
    : cinst_(&cinst),
      objective_(objective),
      beta_(eps / (1.0 + eps)),
      sorted_(sort_rows(ex, cinst.dist_matrix())),
      open_(std::move(open)),
      is_open_(cinst.size(), 0) {
  if (objective == Objective::kCenter) {
    throw std::invalid_argument("local search supports the median and means objectives");
  }
  std::sort(open_.begin(), open_.end());
  open_.erase(std::unique(open_.begin(), open_.end()), open_.end());
  if (open_.empty()) throw std::invalid_argument("local search needs at least one center");
  for (Index i : open_) is_open_.at(i) = 1;
  nearest_.resize(cinst.size());
  second_.resize(cinst.size());
  refresh(ex);
}

double SwapState::weight(std::size_t j, std::size_t i) const {
  const double d = cinst_->dist(j, i);
  return objective_ == Objective::kMeans ? d * d : d;
}

void SwapState::refresh(Executor& ex) {
  const std::size_t n = cinst_->size();
  // The first two open entries of each presorted row; stable sort puts the
  // lowest index first among ties.
  ex.parallel_for(n, [&](std::size_t j) {
    const auto order = sorted_.index.order_row(j);
    int found = 0;
    for (std::size_t r = 0; r < order.size() && found < 2; ++r) {
      const Index i = order[r];
      if (!is_open_[i]) continue;
      if (found == 0) {
        nearest_[j] = i;
        second_[j] = i;
      } else {
        second_[j] = i;
      }
      ++found;
    }
  });
  cost_ = reduce_by(
      ex, n, [&](std::size_t j) { return weight(j, nearest_[j]); }, 0.0, std::plus<>{});
}

void SwapState::apply(Executor& ex, const Swap& swap) {
  if (!is_open_.at(swap.out) || is_open_.at(swap.in)) {
    throw std::invalid_argument("swap must exchange an open and a closed center");
  }
  is_open_[swap.out] = 0;
  is_open_[swap.in] = 1;
  std::replace(open_.begin(), open_.end(), swap.out, swap.in);
  std::sort(open_.begin(), open_.end());
  refresh(ex);
}

std::optional<Swap> find_improving_swap(Executor& ex, const SwapState& state) {
  const std::size_t n = state.instance().size();
  const std::size_t k = state.k();
  std::vector<Index> closed;
  for (std::size_t i = 0; i < n; ++i) {
    if (!state.is_open(i)) closed.push_back(static_cast<Index>(i));
  }
  const std::size_t swaps = k * closed.size();
  if (swaps == 0) return std::nullopt;

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> delta(swaps);
  ex.parallel_for(swaps, [&](std::size_t s) {
    const Index out = state.open()[s / closed.size()];
    const Index in = closed[s % closed.size()];
    // sum_j [ w(j, F - out + in) - w(j, F) ]
    delta[s] = detail::tree_fold(
        0, n,
        [&](std::size_t j) {
          const Index near = state.assigned(j);
          double keep = state.weight(j, near);
          if (near == out) keep = k > 1 ? state.weight(j, state.second(j)) : inf;
          return std::min(keep, state.weight(j, in)) - state.weight(j, near);
        },
        std::plus<>{}, 0.0);
  });

  struct Best {
    double delta;
    std::size_t s;
  };
  const Best best = reduce_by(
      ex, swaps, [&](std::size_t s) { return Best{delta[s], s}; },
      Best{inf, std::numeric_limits<std::size_t>::max()}, [](const Best& a, const Best& b) {
        if (b.delta < a.delta || (b.delta == a.delta && b.s < a.s)) return b;
        return a;
      });

  const double current = state.cost();
  const double candidate = current + best.delta;
  const double threshold = (1.0 - state.beta() / static_cast<double>(k)) * current;
  if (!(candidate < threshold)) return std::nullopt;
  return Swap{state.open()[best.s / closed.size()], closed[best.s % closed.size()], candidate};
}

std::uint64_t local_search_round_cap(std::size_t n, std::size_t k, double eps) {
  const double beta = eps / (1.0 + eps);
  const double per_round = -std::log1p(-beta / static_cast<double>(k));
  return static_cast<std::uint64_t>(std::ceil(3.0 * std::log(static_cast<double>(n)) / per_round)) + 1;
}

LocalSearchResult local_search_solve(Executor& ex, const CenterInstance& cinst, std::size_t k,
                                     double eps, Objective objective, std::uint64_t seed) {
  require_k(k, cinst.size());
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (objective == Objective::kCenter) {
    throw std::invalid_argument("local search supports the median and means objectives");
  }
  const std::uint64_t start_calls = ex.calls();
  const std::size_t n = cinst.size();

  std::vector<Index> start = kcenter_solve(ex, cinst, k, derive_seed(seed, {tag_of("kcenter")})).centers;
  // The dominator set may hold fewer than k centers; top up with farthest
  // points (ties to the lowest index).
  while (start.size() < k) {
    Index far = 0;
    double far_d = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      double d = std::numeric_limits<double>::infinity();
      for (Index c : start) d = std::min(d, cinst.dist(j, c));
      if (d > far_d) {
        far_d = d;
        far = static_cast<Index>(j);
      }
    }
    start.push_back(far);
  }

  SwapState state(ex, cinst, std::move(start), objective, eps);
  LocalSearchResult result;
  result.history.push_back(state.cost());
  while (auto swap = find_improving_swap(ex, state)) {
    state.apply(ex, *swap);
    result.history.push_back(state.cost());
    ++result.rounds;
  }
  result.round_cap = local_search_round_cap(n, k, eps);
  result.cap_exceeded = result.rounds > result.round_cap;
  result.centers = state.open();
  result.assign.resize(n);
  for (std::size_t j = 0; j < n; ++j) result.assign[j] = state.assigned(j);
  result.cost = state.cost();
  result.primitive_calls = ex.calls() - start_calls;
  return result;
}

}  // namespace facloc
