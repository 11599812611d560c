#include "facloc/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "facloc/errors.hpp"
#include "facloc/rng.hpp"
#include "facloc/tolerance.hpp"

namespace facloc {

namespace {

constexpr auto kMinLabel = [](const Label& a, const Label& b) { return b < a ? b : a; };
constexpr auto kMinIndex = [](Index a, Index b) { return std::min(a, b); };

// Walks p_k for k = 1..n, where prefix(k) = f + sum of the k smallest
// remaining distances, and stops at the first strict increase.
template <class Next>
Star scan_star(std::size_t n, Next next) {
  Star star;
  for (std::size_t k = 1; k <= n; ++k) {
    const auto [total, d] = next(k);
    const double p = total / static_cast<double>(k);
    if (star.size > 0 && strictly_greater(p, star.price, kTieTol)) break;
    star.price = p;
    star.size = k;
    star.radius = d;
  }
  return star;
}

struct Tally {
  std::uint32_t deg = 0;
  std::uint32_t chosen = 0;
};

struct Load {
  std::uint32_t deg = 0;
  double sum = 0.0;
};

}  // namespace

Star cheapest_maximal_star(Executor& ex, double f, std::span<const double> sorted_dists) {
  if (sorted_dists.empty()) return {};
  const auto prefix = prefix_sum(ex, sorted_dists, ReduceOp::kSum, ScanKind::kInclusive);
  return scan_star(sorted_dists.size(), [&](std::size_t k) {
    return std::pair{f + prefix[k - 1], sorted_dists[k - 1]};
  });
}

StarState::StarState(Executor& ex, const FLInstance& inst)
    : inst_(&inst),
      cost_(inst.facility_costs().begin(), inst.facility_costs().end()),
      remaining_(inst.num_clients(), 1),
      num_remaining_(inst.num_clients()),
      sorted_(sort_rows(ex, transpose(ex, inst.dist_matrix()))) {}

void StarState::remove_client(std::size_t j) {
  if (remaining_[j]) {
    remaining_[j] = 0;
    --num_remaining_;
  }
}

std::vector<Star> StarState::stars(Executor& ex) const {
  const std::size_t nf = inst_->num_facilities();
  const std::size_t nc = inst_->num_clients();
  DenseMatrix masked(nf, nc);
  DenseMatrix count(nf, nc);
  ex.parallel_for(nf, [&](std::size_t i) {
    for (std::size_t r = 0; r < nc; ++r) {
      if (remaining_[sorted_client(i, r)]) {
        masked(i, r) = sorted_dist(i, r);
        count(i, r) = 1.0;
      }
    }
  });
  const DenseMatrix sums = prefix_sum_rows(ex, masked, ReduceOp::kSum, ScanKind::kInclusive);
  const DenseMatrix counts = prefix_sum_rows(ex, count, ReduceOp::kSum, ScanKind::kInclusive);
  std::vector<Star> out(nf);
  ex.parallel_for(nf, [&](std::size_t i) {
    // Sorted positions of the remaining clients, in order.
    std::vector<std::size_t> pos;
    pos.reserve(num_remaining_);
    for (std::size_t r = 0; r < nc; ++r) {
      if (count(i, r) != 0.0) pos.push_back(r);
    }
    out[i] = scan_star(pos.size(), [&](std::size_t k) {
      const std::size_t r = pos[k - 1];
      return std::pair{cost_[i] + sums(i, r), sorted_dist(i, r)};
    });
  });
  return out;
}

GreedyPreprocess greedy_preprocess(Executor& ex, StarState& state, GreedyDual& dual, double gamma) {
  const FLInstance& inst = state.instance();
  const std::size_t nf = inst.num_facilities();
  const std::size_t nc = inst.num_clients();
  const double m = static_cast<double>(inst.m());
  const double bound = gamma / (m * m);
  GreedyPreprocess result;
  while (state.num_remaining() > 0) {
    const auto stars = state.stars(ex);
    std::vector<std::uint8_t> open(nf, 0);
    ex.parallel_for(nf, [&](std::size_t i) {
      open[i] = stars[i].size > 0 && approx_le(stars[i].price, bound, kTieTol) ? 1 : 0;
    });
    if (std::none_of(open.begin(), open.end(), [](std::uint8_t v) { return v != 0; })) break;
    ++result.passes;

    // A client in several opened stars goes to the lowest-index facility.
    const auto owner = reduce_rows_by(
        ex, nc, nf,
        [&](std::size_t j, std::size_t i) {
          return state.remaining(j) && open[i] && inst.dist(j, i) <= stars[i].radius
                     ? static_cast<Index>(i)
                     : kNoFacility;
        },
        kNoFacility, kMinIndex);
    for (std::size_t i = 0; i < nf; ++i) {
      if (!open[i]) continue;
      state.zero_cost(i);
      result.opened.push_back(static_cast<Index>(i));
    }
    for (std::size_t j = 0; j < nc; ++j) {
      if (owner[j] == kNoFacility) continue;
      dual.alpha[j] = 0.0;
      dual.pi[j] = owner[j];
      state.remove_client(j);
      result.removed.push_back(static_cast<Index>(j));
    }
  }
  std::sort(result.opened.begin(), result.opened.end());
  result.opened.erase(std::unique(result.opened.begin(), result.opened.end()), result.opened.end());
  std::sort(result.removed.begin(), result.removed.end());
  return result;
}

SubselectResult subselect(Executor& ex, StarState& state, GreedyDual& dual, const Bipartite& h,
                          std::vector<std::uint8_t> in_i, double tau, double eps,
                          std::uint64_t seed) {
  const FLInstance& inst = state.instance();
  const std::size_t nf = h.u_size();
  const std::size_t nc = h.v_size();
  const double limit = tau * (1.0 + eps);
  const double paid = 1.0 / (2.0 * (1.0 + eps));
  auto& active = in_i;
  SubselectResult result;

  auto edge = [&](std::size_t i, std::size_t j) {
    return active[i] && state.remaining(j) && h.adjacent(i, j);
  };

  while (std::any_of(active.begin(), active.end(), [](std::uint8_t v) { return v != 0; })) {
    const auto labels = random_labels(ex, nf, seed, result.rounds);
    ++result.rounds;

    // (b) every client picks its lowest-labelled neighbor in I.
    const auto phi = reduce_rows_by(
        ex, nc, nf,
        [&](std::size_t j, std::size_t i) { return edge(i, j) ? labels[i] : Label::infinity(); },
        Label::infinity(), kMinLabel);

    // (c) open facilities picked by enough of their neighbors.
    const auto tally = reduce_cols_by(
        ex, nc, nf,
        [&](std::size_t j, std::size_t i) {
          Tally t;
          if (edge(i, j)) {
            t.deg = 1;
            t.chosen = phi[j].node == i ? 1 : 0;
          }
          return t;
        },
        Tally{}, [](Tally a, Tally b) { return Tally{a.deg + b.deg, a.chosen + b.chosen}; });
    std::vector<std::uint8_t> open(nf, 0);
    ex.parallel_for(nf, [&](std::size_t i) {
      const Tally t = tally[i];
      open[i] = active[i] && t.deg > 0 &&
                        approx_ge(static_cast<double>(t.chosen), paid * t.deg, kTieTol)
                    ? 1
                    : 0;
    });
    for (std::size_t i = 0; i < nf; ++i) {
      if (!open[i]) continue;
      if (!approx_ge(static_cast<double>(tally[i].chosen), paid * tally[i].deg, kTieTol)) {
        throw InvariantError("opened facility is not paid for");
      }
      result.min_paid_fraction =
          std::min(result.min_paid_fraction,
                   static_cast<double>(tally[i].chosen) / static_cast<double>(tally[i].deg));
      result.opened.push_back(static_cast<Index>(i));
    }

    // Clients adjacent to an opened facility leave; pi_j prefers phi_j.
    const auto first_open = reduce_rows_by(
        ex, nc, nf,
        [&](std::size_t j, std::size_t i) {
          return open[i] && edge(i, j) ? static_cast<Index>(i) : kNoFacility;
        },
        kNoFacility, kMinIndex);
    for (std::size_t j = 0; j < nc; ++j) {
      if (first_open[j] == kNoFacility) continue;
      const Index pick = phi[j].node;
      dual.pi[j] = pick < nf && open[pick] ? pick : first_open[j];
      dual.alpha[j] = tau;
      state.remove_client(j);
      result.removed.push_back(static_cast<Index>(j));
    }
    for (std::size_t i = 0; i < nf; ++i) {
      if (!open[i]) continue;
      state.zero_cost(i);
      active[i] = 0;
    }

    // (d) drop facilities whose average over the remaining graph is too high.
    const auto load = reduce_cols_by(
        ex, nc, nf,
        [&](std::size_t j, std::size_t i) {
          return edge(i, j) ? Load{1, inst.dist(j, i)} : Load{};
        },
        Load{}, [](Load a, Load b) { return Load{a.deg + b.deg, a.sum + b.sum}; });
    ex.parallel_for(nf, [&](std::size_t i) {
      if (!active[i]) return;
      const Load l = load[i];
      if (l.deg == 0 || strictly_greater((state.cost(i) + l.sum) / l.deg, limit, kTieTol)) {
        active[i] = 0;
      }
    });
  }
  std::sort(result.opened.begin(), result.opened.end());
  std::sort(result.removed.begin(), result.removed.end());
  return result;
}

std::uint64_t greedy_round_bound(std::size_t m, double eps) {
  const double rounds = 3.0 * std::log(static_cast<double>(m)) / std::log1p(eps);
  return static_cast<std::uint64_t>(std::ceil(rounds - 1e-9)) + 2;
}

GreedyResult greedy_solve(Executor& ex, const FLInstance& inst, double eps, std::uint64_t seed) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  const std::uint64_t start_calls = ex.calls();
  const std::size_t nf = inst.num_facilities();
  const std::size_t nc = inst.num_clients();
  const GammaBounds gb = gamma_bounds(ex, inst);

  GreedyResult result;
  result.round_bound = greedy_round_bound(inst.m(), eps);
  result.dual.alpha.assign(nc, 0.0);
  result.dual.pi.assign(nc, kNoFacility);
  StarState state(ex, inst);
  result.preprocess = greedy_preprocess(ex, state, result.dual, gb.gamma);

  std::vector<std::uint8_t> opened(nf, 0);
  for (Index i : result.preprocess.opened) opened[i] = 1;
  std::uint64_t sub_rounds = 0;
  // Each round removes at least one client, so nc rounds always suffice.
  while (state.num_remaining() > 0) {
    if (result.outer_rounds >= nc) throw InvariantError("greedy made no progress");
    ++result.outer_rounds;
    const auto stars = state.stars(ex);
    const double tau = reduce_by(
        ex, nf, [&](std::size_t i) { return stars[i].price; },
        std::numeric_limits<double>::infinity(), [](double a, double b) { return std::min(a, b); });
    const double limit = tau * (1.0 + eps);
    result.taus.push_back(tau);

    std::vector<std::uint8_t> in_i(nf, 0);
    BitMatrix adj(nf, nc);
    ex.parallel_for(nf, [&](std::size_t i) {
      if (stars[i].size == 0 || !approx_le(stars[i].price, limit, kTieTol)) return;
      in_i[i] = 1;
      for (std::size_t j = 0; j < nc; ++j) {
        if (state.remaining(j) && approx_le(inst.dist(j, i), limit, kTieTol)) adj.set(i, j, true);
      }
    });
    const Bipartite h(std::move(adj));
    const auto sub = subselect(ex, state, result.dual, h, std::move(in_i), tau, eps,
                               derive_seed(seed, {tag_of("greedy"), result.outer_rounds}));
    sub_rounds += sub.rounds;
    result.min_paid_fraction = std::min(result.min_paid_fraction, sub.min_paid_fraction);
    for (Index i : sub.opened) opened[i] = 1;
  }

  std::vector<Index> open_list;
  for (std::size_t i = 0; i < nf; ++i) {
    if (opened[i]) open_list.push_back(static_cast<Index>(i));
  }
  result.solution = make_solution(inst, std::move(open_list), result.dual.pi);
  result.solution.rounds = result.outer_rounds;
  result.solution.subselection_rounds = sub_rounds;
  result.solution.primitive_calls = ex.calls() - start_calls;
  return result;
}

DualCheck greedy_dual_check(const FLInstance& inst, std::span<const double> alpha, double divisor) {
  if (alpha.size() != inst.num_clients()) throw std::invalid_argument("alpha length mismatch");
  if (!(divisor > 0.0)) throw std::invalid_argument("divisor must be positive");
  DualCheck check;
  for (std::size_t i = 0; i < inst.num_facilities(); ++i) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (alpha[j] < 0.0) check.ok = false;
      lhs += std::max(0.0, alpha[j] / divisor - inst.dist(j, i));
    }
    const double slack = inst.cost(i) - lhs;
    if (!approx_le(lhs, inst.cost(i))) check.ok = false;
    if (!check.worst_facility || slack < check.worst_slack) {
      check.worst_facility = static_cast<Index>(i);
      check.worst_slack = slack;
    }
  }
  return check;
}

LedgerCheck greedy_ledger_check(const FLInstance& inst, const Solution& solution,
                                std::span<const double> alpha, double eps) {
  const GammaBounds gb = gamma_bounds(inst);
  double sum_alpha = 0.0;
  for (double a : alpha) sum_alpha += a;
  LedgerCheck check;
  check.lhs = solution.total;
  check.rhs = 2.0 * (1.0 + eps) * (1.0 + eps) * sum_alpha + gb.gamma / static_cast<double>(inst.m());
  check.ok = approx_le(check.lhs, check.rhs);
  return check;
}

}  // namespace facloc
