#include "facloc/primal_dual.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "facloc/dominator.hpp"
#include "facloc/errors.hpp"
#include "facloc/rng.hpp"
#include "facloc/tolerance.hpp"

namespace facloc {

namespace {

constexpr auto kMinIndex = [](Index a, Index b) { return std::min(a, b); };
constexpr auto kOr = [](std::uint8_t a, std::uint8_t b) -> std::uint8_t { return a | b; };

bool is_open(const PDState& s, std::size_t i) { return s.tentative[i] || s.free[i]; }

// H holds ij for tentative i with (1+eps) alpha_j > d(j,i). Alpha only grows
// and F_T only grows, so rebuilding from the current state yields the union
// of all earlier edge sets.
void refresh_h(Executor& ex, const FLInstance& inst, PDState& s) {
  const std::size_t nc = inst.num_clients();
  ex.parallel_for(inst.num_facilities(), [&](std::size_t i) {
    if (!s.tentative[i]) return;
    for (std::size_t j = 0; j < nc; ++j) {
      if (strictly_greater((1.0 + s.eps) * s.alpha[j], inst.dist(j, i))) s.h.set(i, j, true);
    }
  });
}

}  // namespace

double PDState::ladder(std::uint64_t l) const {
  return t0 * std::pow(1.0 + eps, static_cast<double>(l));
}

bool PDState::done() const {
  bool all_open = true;
  for (std::size_t i = 0; i < tentative.size(); ++i) all_open = all_open && (tentative[i] || free[i]);
  const bool all_frozen = std::all_of(frozen.begin(), frozen.end(), [](std::uint8_t v) { return v != 0; });
  return all_open || all_frozen;
}

PDState make_pd_state(const FLInstance& inst, double eps, double t0) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  if (!(t0 > 0.0) || !std::isfinite(t0)) throw std::invalid_argument("t0 must be positive");
  const std::size_t nf = inst.num_facilities();
  const std::size_t nc = inst.num_clients();
  PDState s;
  s.eps = eps;
  s.t0 = t0;
  s.alpha.assign(nc, 0.0);
  s.frozen.assign(nc, 0);
  s.tentative.assign(nf, 0);
  s.free.assign(nf, 0);
  s.free_pi.assign(nc, kNoFacility);
  s.h = BitMatrix(nf, nc);
  return s;
}

void pd_preprocess(Executor& ex, const FLInstance& inst, PDState& s) {
  const std::size_t nf = inst.num_facilities();
  const std::size_t nc = inst.num_clients();
  const auto pay = reduce_cols_by(
      ex, nc, nf, [&](std::size_t j, std::size_t i) { return std::max(0.0, s.t0 - inst.dist(j, i)); },
      0.0, std::plus<>{});
  ex.parallel_for(nf, [&](std::size_t i) { s.free[i] = approx_ge(pay[i], inst.cost(i)) ? 1 : 0; });
  const auto owner = reduce_rows_by(
      ex, nc, nf,
      [&](std::size_t j, std::size_t i) {
        return s.free[i] && inst.dist(j, i) <= s.t0 ? static_cast<Index>(i) : kNoFacility;
      },
      kNoFacility, kMinIndex);
  ex.parallel_for(nc, [&](std::size_t j) {
    if (owner[j] == kNoFacility) return;
    s.free_pi[j] = owner[j];
    s.alpha[j] = 0.0;
    s.frozen[j] = 1;
  });
}

void pd_round(Executor& ex, const FLInstance& inst, PDState& s) {
  const std::size_t nf = inst.num_facilities();
  const std::size_t nc = inst.num_clients();
  const double t = s.ladder(s.iteration);
  const double grow = 1.0 + s.eps;

  // 1. raise
  ex.parallel_for(nc, [&](std::size_t j) {
    if (!s.frozen[j]) s.alpha[j] = t;
  });
  // 2. open every unopened facility whose raised contributions cover f_i
  const auto pay = reduce_cols_by(
      ex, nc, nf,
      [&](std::size_t j, std::size_t i) { return std::max(0.0, grow * s.alpha[j] - inst.dist(j, i)); },
      0.0, std::plus<>{});
  ex.parallel_for(nf, [&](std::size_t i) {
    if (!is_open(s, i) && approx_ge(pay[i], inst.cost(i))) s.tentative[i] = 1;
  });
  // 3. freeze clients that reach an open facility
  const auto reach = reduce_rows_by(
      ex, nc, nf,
      [&](std::size_t j, std::size_t i) -> std::uint8_t {
        return is_open(s, i) && approx_ge(grow * s.alpha[j], inst.dist(j, i)) ? 1 : 0;
      },
      std::uint8_t{0}, kOr);
  ex.parallel_for(nc, [&](std::size_t j) {
    if (reach[j]) s.frozen[j] = 1;
  });
  // 4. extend H
  refresh_h(ex, inst, s);
  ++s.iteration;
}

void pd_finalize(Executor& ex, const FLInstance& inst, PDState& s) {
  const std::size_t nf = inst.num_facilities();
  const std::size_t nc = inst.num_clients();
  if (std::all_of(s.frozen.begin(), s.frozen.end(), [](std::uint8_t v) { return v != 0; })) {
    s.finalized = true;
    return;
  }
  for (std::size_t i = 0; i < nf; ++i) {
    if (!is_open(s, i)) throw InvariantError("finalize needs every facility open");
  }
  const auto nearest = reduce_rows_by(
      ex, nc, nf, [&](std::size_t j, std::size_t i) { return inst.dist(j, i); },
      std::numeric_limits<double>::infinity(), [](double a, double b) { return std::min(a, b); });
  ex.parallel_for(nc, [&](std::size_t j) {
    if (s.frozen[j]) return;
    s.alpha[j] = nearest[j];
    s.frozen[j] = 1;
  });
  refresh_h(ex, inst, s);
  s.finalized = true;
}

PDAssignment pd_postprocess(Executor& ex, const FLInstance& inst, const PDState& s,
                            std::uint64_t seed) {
  const std::size_t nf = inst.num_facilities();
  const std::size_t nc = inst.num_clients();
  const double grow = 1.0 + s.eps;

  std::vector<Index> ft;
  for (std::size_t i = 0; i < nf; ++i) {
    if (s.tentative[i]) ft.push_back(static_cast<Index>(i));
  }
  BitMatrix sub(ft.size(), nc);
  ex.parallel_for(ft.size(), [&](std::size_t u) {
    for (std::size_t j = 0; j < nc; ++j) sub.set(u, j, s.h(ft[u], j));
  });
  const auto dom = max_u_dom(ex, Bipartite(std::move(sub)), seed);

  PDAssignment out;
  out.dominator_rounds = dom.rounds;
  std::vector<std::uint8_t> in_i(nf, 0);
  for (Index u : dom.members) {
    out.dominators.push_back(ft[u]);
    in_i[ft[u]] = 1;
  }
  for (std::size_t i = 0; i < nf; ++i) {
    if (in_i[i] || s.free[i]) out.open.push_back(static_cast<Index>(i));
  }

  auto tight = [&](std::size_t j, std::size_t i) { return approx_ge(grow * s.alpha[j], inst.dist(j, i)); };
  struct Pick {
    Index edge = kNoFacility;       // case 2
    std::uint32_t edges = 0;        // number of I-facilities with an H-edge to j
    Index tight_i = kNoFacility;    // case 3
    Index tight_free = kNoFacility; // case 3'
    Index tight_t = kNoFacility;    // lowest tentative member of phi(j)
  };
  const auto picks = reduce_rows_by(
      ex, nc, nf,
      [&](std::size_t j, std::size_t i) {
        Pick p;
        const auto id = static_cast<Index>(i);
        if (in_i[i] && s.h(i, j)) {
          p.edge = id;
          p.edges = 1;
        }
        if (tight(j, i)) {
          if (in_i[i]) p.tight_i = id;
          if (s.free[i]) p.tight_free = id;
          if (s.tentative[i]) p.tight_t = id;
        }
        return p;
      },
      Pick{}, [](const Pick& a, const Pick& b) {
        return Pick{std::min(a.edge, b.edge), a.edges + b.edges, std::min(a.tight_i, b.tight_i),
                    std::min(a.tight_free, b.tight_free), std::min(a.tight_t, b.tight_t)};
      });

  out.pi.assign(nc, kNoFacility);
  out.cases.assign(nc, PDCase::kFree);
  std::vector<std::uint8_t> failed(nc, 0);
  ex.parallel_for(nc, [&](std::size_t j) {
    const Pick& p = picks[j];
    if (p.edges > 1) {
      failed[j] = 1;
      return;
    }
    if (s.free_pi[j] != kNoFacility) {
      out.pi[j] = s.free_pi[j];
      out.cases[j] = PDCase::kFree;
    } else if (p.edge != kNoFacility) {
      out.pi[j] = p.edge;
      out.cases[j] = PDCase::kEdge;
    } else if (p.tight_i != kNoFacility) {
      out.pi[j] = p.tight_i;
      out.cases[j] = PDCase::kTight;
    } else if (p.tight_free != kNoFacility) {
      out.pi[j] = p.tight_free;
      out.cases[j] = PDCase::kTightFree;
    } else if (p.tight_t != kNoFacility) {
      // i' is outside I, so by maximality it shares an H-client with a member.
      const Index ip = p.tight_t;
      for (std::size_t i = 0; i < nf && out.pi[j] == kNoFacility; ++i) {
        if (!in_i[i]) continue;
        for (std::size_t jj = 0; jj < nc; ++jj) {
          if (s.h(ip, jj) && s.h(i, jj)) {
            out.pi[j] = static_cast<Index>(i);
            break;
          }
        }
      }
      out.cases[j] = PDCase::kIndirect;
      if (out.pi[j] == kNoFacility) failed[j] = 1;
    } else {
      failed[j] = 1;
    }
  });
  for (std::size_t j = 0; j < nc; ++j) {
    if (failed[j]) {
      throw InvariantError("client " + std::to_string(j) + " has no valid assignment");
    }
  }
  return out;
}

std::uint64_t pd_iteration_bound(std::size_t m, double eps) {
  return static_cast<std::uint64_t>(3.0 * std::log(static_cast<double>(m)) / std::log1p(eps) + 1e-9) + 2;
}

PDResult pd_solve(Executor& ex, const FLInstance& inst, double eps, std::uint64_t seed,
                  PDOptions options) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  const std::uint64_t start_calls = ex.calls();
  const GammaBounds gb = gamma_bounds(ex, inst);
  const double m = static_cast<double>(inst.m());

  PDResult result;
  result.gamma = gb.gamma;
  result.iteration_bound = pd_iteration_bound(inst.m(), eps);
  // gamma == 0 means every client sits on a free facility: the ladder never
  // starts, so any positive t0 works.
  const double t0 = gb.gamma > 0.0 ? gb.gamma / (m * m) : 1.0;
  result.state = make_pd_state(inst, eps, t0);
  PDState& s = result.state;
  pd_preprocess(ex, inst, s);

  while (!s.done()) {
    if (s.iteration > 100 * result.iteration_bound + 1000) throw InvariantError("ladder did not converge");
    const std::uint64_t before = ex.calls();
    pd_round(ex, inst, s);
    result.round_calls.push_back(ex.calls() - before);
    if (options.check_each_iteration && !pd_dual_check(inst, s.alpha).ok) {
      throw InvariantError("dual infeasible after iteration " + std::to_string(s.iteration - 1));
    }
  }
  result.iterations = s.iteration;
  pd_finalize(ex, inst, s);
  result.assignment = pd_postprocess(ex, inst, s, derive_seed(seed, {tag_of("pd")}));
  result.solution = make_solution(inst, result.assignment.open, result.assignment.pi);
  result.solution.rounds = result.iterations;
  result.solution.subselection_rounds = result.assignment.dominator_rounds;
  result.solution.primitive_calls = ex.calls() - start_calls;
  return result;
}

DualCheck pd_dual_check(const FLInstance& inst, std::span<const double> alpha) {
  return greedy_dual_check(inst, alpha, 1.0);
}

LedgerCheck pd_ledger_check(const FLInstance& inst, const Solution& solution,
                            std::span<const double> alpha, double eps) {
  const GammaBounds gb = gamma_bounds(inst);
  double sum_alpha = 0.0;
  for (double a : alpha) sum_alpha += a;
  double fac = 0.0;
  for (Index i : solution.open) fac += inst.cost(i);
  LedgerCheck check;
  check.lhs = 3.0 * fac + solution.connection_cost;
  check.rhs = 3.0 * gb.gamma / static_cast<double>(inst.m()) + 3.0 * (1.0 + eps) * sum_alpha;
  check.ok = approx_le(check.lhs, check.rhs);
  return check;
}

}  // namespace facloc
