#include "facloc/lp_rounding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "facloc/dominator.hpp"
#include "facloc/errors.hpp"
#include "facloc/greedy.hpp"
#include "facloc/rng.hpp"
#include "facloc/tolerance.hpp"

namespace facloc {

namespace {

constexpr auto kMinIndex = [](Index a, Index b) { return std::min(a, b); };

bool lp_close(double a, double b) { return std::abs(a - b) <= kLpTol * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace

LpSolution make_lp(const FLInstance& inst, DenseMatrix x, std::vector<double> y,
                   std::optional<double> declared_theta) {
  const std::size_t nf = inst.num_facilities();
  const std::size_t nc = inst.num_clients();
  if (x.rows() != nf || x.cols() != nc) throw ValidationError("x must be n_f x n_c");
  if (y.size() != nf) throw ValidationError("y must have n_f entries");
  for (std::size_t i = 0; i < nf; ++i) {
    if (!std::isfinite(y[i]) || y[i] < -kLpTol || y[i] > 1.0 + kLpTol) {
      throw ValidationError("y[" + std::to_string(i) + "] outside [0, 1]");
    }
    for (std::size_t j = 0; j < nc; ++j) {
      const double v = x(i, j);
      if (!std::isfinite(v) || v < -kLpTol) {
        throw ValidationError("x[" + std::to_string(i) + "][" + std::to_string(j) + "] negative");
      }
      if (v > y[i] + kLpTol) {
        throw ValidationError("x[" + std::to_string(i) + "][" + std::to_string(j) + "] exceeds y[" +
                              std::to_string(i) + "]");
      }
    }
  }
  LpSolution lp;
  for (std::size_t j = 0; j < nc; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < nf; ++i) {
      col += x(i, j);
      lp.theta += inst.dist(j, i) * x(i, j);
    }
    if (std::abs(col - 1.0) > kLpTol) {
      throw ValidationError("assignment of client " + std::to_string(j) + " sums to " +
                            std::to_string(col) + ", not 1");
    }
  }
  for (std::size_t i = 0; i < nf; ++i) lp.theta += inst.cost(i) * y[i];
  if (declared_theta && !lp_close(*declared_theta, lp.theta)) {
    throw ValidationError("declared theta " + std::to_string(*declared_theta) +
                          " does not match recomputed " + std::to_string(lp.theta));
  }
  lp.x = std::move(x);
  lp.y = std::move(y);
  return lp;
}

LpSolution integral_lp(const FLInstance& inst, std::span<const Index> open,
                       std::span<const Index> assign) {
  const std::size_t nf = inst.num_facilities();
  const std::size_t nc = inst.num_clients();
  if (assign.size() != nc) throw std::invalid_argument("assignment length does not match client count");
  DenseMatrix x(nf, nc);
  std::vector<double> y(nf, 0.0);
  for (Index i : open) y.at(i) = 1.0;
  for (std::size_t j = 0; j < nc; ++j) x(assign[j], j) = 1.0;
  return make_lp(inst, std::move(x), std::move(y));
}

FilteredLp filter(Executor& ex, const FLInstance& inst, const LpSolution& lp, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const std::size_t nf = inst.num_facilities();
  const std::size_t nc = inst.num_clients();
  FilteredLp out;
  out.alpha = alpha;
  out.delta = reduce_rows_by(
      ex, nc, nf, [&](std::size_t j, std::size_t i) { return inst.dist(j, i) * lp.x(i, j); }, 0.0,
      std::plus<>{});
  out.ball = BitMatrix(nc, nf);
  ex.parallel_for(nc, [&](std::size_t j) {
    const double radius = (1.0 + alpha) * out.delta[j];
    for (std::size_t i = 0; i < nf; ++i) {
      if (approx_le(inst.dist(j, i), radius)) out.ball.set(j, i, true);
    }
  });
  out.mass = reduce_rows_by(
      ex, nc, nf, [&](std::size_t j, std::size_t i) { return out.ball(j, i) ? lp.x(i, j) : 0.0; },
      0.0, std::plus<>{});
  for (std::size_t j = 0; j < nc; ++j) {
    if (!approx_ge(out.mass[j], alpha / (1.0 + alpha), kLpTol)) {
      throw InvariantError("ball of client " + std::to_string(j) + " holds too little mass");
    }
  }
  out.x = DenseMatrix(nf, nc);
  ex.parallel_for(nf, [&](std::size_t i) {
    for (std::size_t j = 0; j < nc; ++j) {
      if (out.ball(j, i)) out.x(i, j) = lp.x(i, j) / out.mass[j];
    }
  });
  out.y.resize(nf);
  ex.parallel_for(nf, [&](std::size_t i) { out.y[i] = std::min(1.0, (1.0 + 1.0 / alpha) * lp.y[i]); });
  return out;
}

LpRoundResult lp_round(Executor& ex, const FLInstance& inst, const LpSolution& lp,
                       const FilteredLp& fl, double eps, std::uint64_t seed) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  const std::uint64_t start_calls = ex.calls();
  const std::size_t nf = inst.num_facilities();
  const std::size_t nc = inst.num_clients();
  const double m = static_cast<double>(inst.m());
  const double floor_delta = lp.theta / (m * m);
  const double a = fl.alpha;

  LpRoundResult result;
  result.round_bound = greedy_round_bound(inst.m(), eps);

  // i_j: cheapest facility of B_j, lowest index on ties.
  struct Cheap {
    double f = std::numeric_limits<double>::infinity();
    Index i = kNoFacility;
  };
  const auto cheap = reduce_rows_by(
      ex, nc, nf,
      [&](std::size_t j, std::size_t i) {
        return fl.ball(j, i) ? Cheap{inst.cost(i), static_cast<Index>(i)} : Cheap{};
      },
      Cheap{}, [](const Cheap& x, const Cheap& y) {
        return y.f < x.f || (y.f == x.f && y.i < x.i) ? y : x;
      });
  result.cheapest.resize(nc);
  for (std::size_t j = 0; j < nc; ++j) {
    if (cheap[j].i == kNoFacility) throw InvariantError("empty ball");
    result.cheapest[j] = cheap[j].i;
  }

  std::vector<std::uint8_t> remaining(nc, 1);
  std::vector<std::uint8_t> first_round(nc, 0);
  std::vector<std::uint8_t> opened(nf, 0);
  std::vector<Index> owner(nf, kNoFacility);  // J-client whose ball claimed i
  result.blocker.assign(nc, kNoFacility);
  std::size_t left = nc;

  while (left > 0) {
    if (result.history.size() >= nc) throw InvariantError("rounding made no progress");
    LpRoundRecord rec;
    rec.tau = reduce_by(
        ex, nc,
        [&](std::size_t j) { return remaining[j] ? fl.delta[j] : std::numeric_limits<double>::infinity(); },
        std::numeric_limits<double>::infinity(), [](double x, double y) { return std::min(x, y); });
    double cutoff = (1.0 + eps) * rec.tau;
    if (result.history.empty()) cutoff = std::max(cutoff, floor_delta);

    std::vector<std::uint8_t> in_s(nc, 0);
    ex.parallel_for(nc, [&](std::size_t j) {
      in_s[j] = remaining[j] && approx_le(fl.delta[j], cutoff, kTieTol) ? 1 : 0;
    });
    // Clients whose ball meets a ball claimed in an earlier round are served
    // by that round's facility.
    const auto earlier = reduce_rows_by(
        ex, nc, nf,
        [&](std::size_t j, std::size_t i) {
          return in_s[j] && fl.ball(j, i) ? owner[i] : kNoFacility;
        },
        kNoFacility, kMinIndex);
    std::vector<Index> candidates;
    for (std::size_t j = 0; j < nc; ++j) {
      if (!in_s[j]) continue;
      ++rec.selected;
      if (result.history.empty()) first_round[j] = 1;
      if (earlier[j] != kNoFacility) {
        result.blocker[j] = earlier[j];
        ++rec.blocked;
      } else {
        candidates.push_back(static_cast<Index>(j));
      }
    }

    BitMatrix sub(candidates.size(), nf);
    ex.parallel_for(candidates.size(), [&](std::size_t u) {
      for (std::size_t i = 0; i < nf; ++i) sub.set(u, i, fl.ball(candidates[u], i));
    });
    const auto dom = max_u_dom(ex, Bipartite(std::move(sub)),
                               derive_seed(seed, {tag_of("lp-round"), result.history.size()}));
    for (Index u : dom.members) {
      const Index j = candidates[u];
      result.blocker[j] = j;
      const Index i = result.cheapest[j];
      opened[i] = 1;
      rec.opened.push_back(i);
      rec.facility_cost += inst.cost(i);
      for (std::size_t f = 0; f < nf; ++f) {
        if (!fl.ball(j, f)) continue;
        if (owner[f] != kNoFacility) throw InvariantError("balls of selected clients overlap");
        owner[f] = j;
        rec.facility_budget += fl.y[f] * inst.cost(f);
      }
    }
    // Remaining candidates share a facility with a member of J.
    const auto same = reduce_rows_by(
        ex, candidates.size(), nf,
        [&](std::size_t u, std::size_t i) { return fl.ball(candidates[u], i) ? owner[i] : kNoFacility; },
        kNoFacility, kMinIndex);
    for (std::size_t u = 0; u < candidates.size(); ++u) {
      const Index j = candidates[u];
      if (result.blocker[j] == j) continue;
      if (same[u] == kNoFacility) throw InvariantError("selected set is not maximal");
      result.blocker[j] = same[u];
    }
    std::sort(rec.opened.begin(), rec.opened.end());
    if (!approx_le(rec.facility_cost, rec.facility_budget)) result.facility_claim_ok = false;
    for (std::size_t j = 0; j < nc; ++j) {
      if (in_s[j]) {
        remaining[j] = 0;
        --left;
      }
    }
    result.history.push_back(std::move(rec));
  }

  std::vector<Index> pi(nc);
  std::vector<Index> open_list;
  for (std::size_t i = 0; i < nf; ++i) {
    if (opened[i]) open_list.push_back(static_cast<Index>(i));
  }
  for (std::size_t j = 0; j < nc; ++j) {
    const Index own = result.cheapest[j];
    const bool direct = opened[own];
    pi[j] = direct ? own : result.cheapest[result.blocker[j]];
    // First-round clients were swept in at delta <= theta/m^2.
    const double delta = first_round[j] ? std::max(fl.delta[j], floor_delta) : fl.delta[j];
    const double allowed = direct ? (1.0 + a) * fl.delta[j] : 3.0 * (1.0 + a) * (1.0 + eps) * delta;
    const double d = inst.dist(j, pi[j]);
    if (!approx_le(d, allowed)) result.connection_claim_ok = false;
    if (allowed > 0.0) result.worst_connection_ratio = std::max(result.worst_connection_ratio, d / allowed);
  }
  double fy = 0.0;
  for (std::size_t i = 0; i < nf; ++i) fy += inst.cost(i) * lp.y[i];
  result.solution = make_solution(inst, std::move(open_list), std::move(pi));
  result.facility_total_ok = approx_le(result.solution.facility_cost, (1.0 + 1.0 / a) * fy);
  result.solution.rounds = result.history.size();
  result.solution.primitive_calls = ex.calls() - start_calls;
  return result;
}

LpRoundResult lp_round_solve(Executor& ex, const FLInstance& inst, const LpSolution& lp,
                             double alpha, double eps, std::uint64_t seed) {
  const std::uint64_t start_calls = ex.calls();
  const FilteredLp fl = filter(ex, inst, lp, alpha);
  auto result = lp_round(ex, inst, lp, fl, eps, seed);
  result.solution.primitive_calls = ex.calls() - start_calls;
  return result;
}

double lp_cost_bound(const FLInstance& inst, const LpSolution& lp, const FilteredLp& fl, double eps) {
  double fy = 0.0;
  for (std::size_t i = 0; i < inst.num_facilities(); ++i) fy += inst.cost(i) * lp.y[i];
  double sd = 0.0;
  for (double d : fl.delta) sd += d;
  return (1.0 + 1.0 / fl.alpha) * fy + 3.0 * (1.0 + fl.alpha) * (1.0 + eps) * sd +
         lp.theta / static_cast<double>(inst.m());
}

}  // namespace facloc
