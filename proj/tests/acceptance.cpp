// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "facloc/centers.hpp"
#include "facloc/dominator.hpp"
#include "facloc/errors.hpp"
#include "facloc/greedy.hpp"
#include "facloc/io.hpp"
#include "facloc/lp_rounding.hpp"
#include "facloc/oracle.hpp"
#include "facloc/primal_dual.hpp"
#include "facloc/tolerance.hpp"
#include "support.hpp"

using namespace facloc;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok) { pass = pass && ok; }
};

constexpr double kEps = 0.1;

// ceil(log_{1+eps}(m^3)) + 2, computed here rather than taken from the library.
std::uint64_t outer_round_limit(std::size_t m) {
  return static_cast<std::uint64_t>(std::ceil(std::log(std::pow(static_cast<double>(m), 3.0)) /
                                              std::log(1.0 + kEps) - 1e-9)) + 2;
}

FLInstance small_instance(std::uint64_t seed) { return test::random_instance(seed, 1, 6, 1, 10); }

CenterInstance random_points(std::size_t n, std::uint64_t seed) {
  const FLInstance inst = gen_euclidean(1, n, 2, 0.0, 0.0, seed);
  return CenterInstance::from_points(inst.points()->clients, 2);
}

LpSolution optimal_integral_lp(const FLInstance& inst) {
  const auto exact = exact_facloc(inst);
  std::vector<Index> assign(inst.num_clients());
  for (std::size_t j = 0; j < inst.num_clients(); ++j) {
    Index best = exact.open.front();
    for (Index i : exact.open) {
      if (inst.dist(j, i) < inst.dist(j, best)) best = i;
    }
    assign[j] = best;
  }
  return integral_lp(inst, exact.open, assign);
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Rounds observed in criteria 2 and 4, checked together in criterion 7.
struct RoundLog {
  std::size_t runs = 0;
  std::size_t over = 0;
  std::uint64_t worst_margin = 0;  // largest rounds observed
};
RoundLog greedy_rounds;
RoundLog lp_rounds;

void log_rounds(RoundLog& log, std::uint64_t rounds, std::size_t m) {
  ++log.runs;
  if (rounds > outer_round_limit(m)) ++log.over;
  log.worst_margin = std::max(log.worst_margin, rounds);
}

void dominators(Outcome& out) {
  Executor ex;
  std::mt19937_64 rng(derive_seed(1, {tag_of("acceptance-dominator")}));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const double ps[] = {0.1, 0.3, 0.5};
  std::size_t failures = 0;
  std::uint64_t max_rounds = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 64;
    const double p = ps[t % 3];
    Graph g(n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (coin(rng) < p) g.add_edge(a, b);
      }
    }
    const auto r = max_dom(ex, g, rng());
    if (!check_dominator(g, r.members).ok()) ++failures;
    max_rounds = std::max(max_rounds, r.rounds);
  }
  for (int t = 0; t < 200; ++t) {
    const double p = ps[t % 3];
    Bipartite h(1 + rng() % 32, 1 + rng() % 32);
    for (std::size_t u = 0; u < h.u_size(); ++u) {
      for (std::size_t v = 0; v < h.v_size(); ++v) {
        if (coin(rng) < p) h.add_edge(u, v);
      }
    }
    const auto r = max_u_dom(ex, h, rng());
    if (!check_dominator(h, r.members).ok()) ++failures;
    max_rounds = std::max(max_rounds, r.rounds);
  }
  out.require(failures == 0);
  out.detail << "400 graphs, " << failures << " checker failures, max rounds " << max_rounds;
}

void greedy(Outcome& out) {
  Executor ex;
  std::size_t within = 0;
  std::size_t feasible = 0;
  std::size_t above_tight = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const FLInstance inst = small_instance(seed);
    const auto r = greedy_solve(ex, inst, kEps, seed);
    const double opt = exact_facloc(inst).opt;
    const double ratio = r.solution.total / opt;
    worst = std::max(worst, ratio);
    if (approx_le(r.solution.total, (6.0 + kEps) * opt)) ++within;
    if (ratio > 3.722 + kEps) ++above_tight;
    if (greedy_dual_check(inst, r.dual.alpha, 3.0).ok) ++feasible;
    log_rounds(greedy_rounds, r.outer_rounds, inst.m());
  }
  out.require(within == 100 && feasible == 100);
  out.detail << "ratio <= 6.1 in " << within << "/100 (max " << worst << ", " << above_tight
             << " above 3.822), dual/3 feasible in " << feasible << "/100";
}

void primal_dual(Outcome& out) {
  Executor ex;
  std::size_t ledger_ok = 0;
  std::size_t lower_ok = 0;
  std::size_t iter_ok = 0;
  std::size_t feasible_each = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const FLInstance inst = small_instance(seed);
    const double opt = exact_facloc(inst).opt;
    try {
      const auto r = pd_solve(ex, inst, kEps, seed, PDOptions{true});
      ++feasible_each;
      const double m = static_cast<double>(inst.m());
      double fac = 0.0;
      for (Index i : r.solution.open) fac += inst.cost(i);
      const double lhs = 3.0 * fac + r.solution.connection_cost;
      const double rhs = 3.0 * r.gamma / m + 3.0 * (1.0 + kEps) * sum(r.state.alpha);
      if (approx_le(lhs, rhs)) ++ledger_ok;
      if (approx_le(sum(r.state.alpha), opt)) ++lower_ok;
      const double limit = 3.0 * std::log(m) / std::log(1.0 + kEps) + 2.0;
      if (static_cast<double>(r.iterations) <= limit + 1e-9) ++iter_ok;
    } catch (const InvariantError& e) {
      out.detail << "seed " << seed << ": " << e.what() << "; ";
    }
  }
  out.require(ledger_ok == 100 && lower_ok == 100 && iter_ok == 100 && feasible_each == 100);
  out.detail << "ledger " << ledger_ok << "/100, sum alpha <= opt " << lower_ok
             << "/100, feasible every iteration " << feasible_each << "/100, iterations within bound "
             << iter_ok << "/100";
}

void lp_rounding(Outcome& out) {
  Executor ex;
  std::size_t within = 0;
  std::size_t claims = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const FLInstance inst = test::random_instance(seed + 4000, 2, 8, 2, 12);
    const LpSolution lp = optimal_integral_lp(inst);
    const auto r = lp_round_solve(ex, inst, lp, 1.0 / 3.0, kEps, seed);
    const double m = static_cast<double>(inst.m());
    if (approx_le(r.solution.total, 4.0 * (1.0 + kEps) * lp.theta + lp.theta / m)) ++within;
    if (r.facility_claim_ok && r.connection_claim_ok && r.facility_total_ok) ++claims;
    worst = std::max(worst, r.solution.total / lp.theta);
    log_rounds(lp_rounds, r.solution.rounds, inst.m());
  }
  out.require(within == 50 && claims == 50);
  out.detail << "total <= 4.4 theta + theta/m in " << within << "/50 (max ratio " << worst
             << "), claims held in " << claims << "/50";
}

void kcenter(Outcome& out) {
  Executor ex;
  std::size_t within = 0;
  std::size_t probe_ok = 0;
  std::mt19937_64 rng(derive_seed(5, {tag_of("acceptance-kcenter")}));
  for (std::uint64_t t = 0; t < 60; ++t) {
    const std::size_t n = 5 + rng() % 10;
    const std::size_t k = 2 + t % 3;
    const CenterInstance c = random_points(n, t + 6000);
    const auto r = kcenter_solve(ex, c, k, t);
    const double opt = exact_kobjective(c, k, Objective::kCenter).opt;
    if (approx_le(r.radius, 2.0 * opt) && r.centers.size() <= k) ++within;
    bool probes = r.previous_probe_failed;
    for (const auto& p : r.probes) {
      if (p.t == r.threshold_index && p.size > k) probes = false;
      if (p.t + 1 == r.threshold_index && p.size <= k) probes = false;
    }
    if (probes) ++probe_ok;
  }
  out.require(within == 60 && probe_ok == 60);
  out.detail << "radius <= 2 opt in " << within << "/60, previous probe failed in " << probe_ok << "/60";
}

void local_search(Outcome& out) {
  Executor ex;
  std::size_t within = 0;
  std::size_t decreasing = 0;
  std::size_t capped = 0;
  double worst_med = 0.0;
  double worst_means = 0.0;
  std::mt19937_64 rng(derive_seed(6, {tag_of("acceptance-local")}));
  for (std::uint64_t t = 0; t < 60; ++t) {
    const std::size_t n = 5 + rng() % 8;
    const std::size_t k = 2 + t % 2;
    const Objective obj = (t / 2) % 2 == 0 ? Objective::kMedian : Objective::kMeans;
    const CenterInstance c = random_points(n, t + 7000);
    const auto r = local_search_solve(ex, c, k, kEps, obj, t);
    const double opt = exact_kobjective(c, k, obj).opt;
    const double bound = obj == Objective::kMedian ? 5.0 + kEps : 81.0 + kEps;
    if (approx_le(r.cost, bound * opt)) ++within;
    const double ratio = opt > 0.0 ? r.cost / opt : 1.0;
    double& worst = obj == Objective::kMedian ? worst_med : worst_means;
    worst = std::max(worst, ratio);
    const double beta = kEps / (1.0 + kEps);
    bool strict = r.history.size() == r.rounds + 1;
    for (std::size_t s = 1; s < r.history.size(); ++s) {
      strict = strict && r.history[s] < (1.0 - beta / static_cast<double>(k)) * r.history[s - 1];
    }
    if (strict) ++decreasing;
    if (r.cap_exceeded) ++capped;
  }
  out.require(within == 60 && decreasing == 60);
  out.detail << "within bound " << within << "/60 (max median ratio " << worst_med << ", max means ratio "
             << worst_means << "), strict decrease " << decreasing << "/60, over round cap " << capped
             << " (flagged)";
}

void round_counts(Outcome& out) {
  out.require(greedy_rounds.runs == 100 && lp_rounds.runs == 50);
  out.require(greedy_rounds.over == 0 && lp_rounds.over == 0);

  Executor ex;
  const double limit = 10.0 * std::log(1024.0) / std::log(1.0 + kEps);
  std::size_t within = 0;
  std::uint64_t worst = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const FLInstance inst = gen_euclidean(16, 64, 2, 0.2, 2.0, seed + 8000);
    const auto r = greedy_solve(ex, inst, kEps, seed);
    worst = std::max(worst, r.solution.subselection_rounds);
    if (static_cast<double>(r.solution.subselection_rounds) <= limit) ++within;
  }
  out.require(within * 100 >= 99 * 500);
  out.detail << "greedy outer rounds over limit " << greedy_rounds.over << "/" << greedy_rounds.runs
             << " (max " << greedy_rounds.worst_margin << "), lp-round over limit " << lp_rounds.over << "/"
             << lp_rounds.runs << " (max " << lp_rounds.worst_margin << "); subselection rounds per run <= "
             << limit << " in " << within << "/500 (max " << worst << ", tail " << 500 - within << ")";
}

std::string solve_dump(const std::string& algo, int workers, std::uint64_t seed) {
  Executor ex(workers);
  SolutionFile f;
  f.algo = algo;
  f.eps = kEps;
  f.seed = seed;
  if (algo == "greedy" || algo == "pd" || algo == "lp-round") {
    const FLInstance inst = test::random_instance(seed + 9000, 4, 10, 8, 24);
    if (algo == "greedy") {
      auto r = greedy_solve(ex, inst, kEps, seed);
      f.solution = r.solution;
      f.alpha = r.dual.alpha;
    } else if (algo == "pd") {
      auto r = pd_solve(ex, inst, kEps, seed);
      f.solution = r.solution;
      f.alpha = r.state.alpha;
    } else {
      f.solution = lp_round_solve(ex, inst, optimal_integral_lp(inst), 1.0 / 3.0, kEps, seed).solution;
    }
    return dump_solution(f);
  }
  const CenterInstance c = random_points(16, seed + 9500);
  f.k = 3;
  if (algo == "kcenter") {
    const auto r = kcenter_solve(ex, c, 3, seed);
    f.solution.open = r.centers;
    f.solution.total = r.radius;
    f.solution.rounds = r.probes.size();
    f.solution.primitive_calls = r.primitive_calls;
  } else {
    const auto r = local_search_solve(ex, c, 3, kEps, algo == "kmedian" ? Objective::kMedian : Objective::kMeans,
                                      seed);
    f.solution.open = r.centers;
    f.solution.assign = r.assign;
    f.solution.total = r.cost;
    f.solution.rounds = r.rounds;
    f.solution.primitive_calls = r.primitive_calls;
  }
  return dump_solution(f);
}

void determinism(Outcome& out) {
  std::size_t runs = 0;
  std::size_t identical = 0;
  for (const std::string algo : {"greedy", "pd", "lp-round", "kcenter", "kmedian", "kmeans"}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const std::string base = solve_dump(algo, 1, seed);
      bool same = true;
      for (int workers : {4, 8}) same = same && solve_dump(algo, workers, seed) == base;
      ++runs;
      if (same) {
        ++identical;
      } else {
        out.detail << algo << " seed " << seed << " differs; ";
      }
    }
  }
  out.require(identical == runs);
  out.detail << identical << "/" << runs << " algorithm-seed pairs identical at workers 1, 4, 8";
}

void pd_call_counts(Outcome& out) {
  Executor ex;
  std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t hi = 0;
  for (std::size_t side : {8u, 16u, 32u}) {
    const FLInstance inst = gen_euclidean(side, side, 2, 0.2, 2.0, side);
    const auto r = pd_solve(ex, inst, kEps, 1);
    std::uint64_t local_lo = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t local_hi = 0;
    for (std::uint64_t c : r.round_calls) {
      local_lo = std::min(local_lo, c);
      local_hi = std::max(local_hi, c);
    }
    lo = std::min(lo, local_lo);
    hi = std::max(hi, local_hi);
    const double log_m = std::log(static_cast<double>(inst.m())) / std::log(1.0 + kEps);
    out.detail << "m=" << inst.m() << ": " << r.round_calls.size() << " iterations (" << r.iterations / log_m
               << " per log m), calls per iteration " << local_lo << ".." << local_hi << ", total calls "
               << r.solution.primitive_calls << "; ";
  }
  out.require(hi >= lo && hi - lo <= 2);
  out.detail << "spread " << hi - lo;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> run;
    double time_limit_s;  // 0 = none
  };
  const Criterion criteria[] = {
      {1, "dominator sets are maximal and independent", dominators, 30.0},
      {2, "greedy ratio and scaled dual feasibility", greedy, 60.0},
      {3, "primal-dual ledger, lower bound and iterations", primal_dual, 60.0},
      {4, "LP rounding against the integral optimum", lp_rounding, 60.0},
      {5, "k-center within twice the optimum", kcenter, 60.0},
      {6, "local search ratios and strict decrease", local_search, 120.0},
      {7, "round counts", round_counts, 0.0},
      {8, "worker-count determinism", determinism, 0.0},
      {9, "primal-dual primitive calls per iteration", pd_call_counts, 0.0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0.0 && secs >= c.time_limit_s) {
      out.pass = false;
      out.detail << "; took longer than " << c.time_limit_s << " s";
    }
    if (!out.pass) ++failed;
    std::printf("%s criterion %d: %s [%.2f s] %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                out.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
