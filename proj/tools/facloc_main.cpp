// facloc command-line driver: gen, solve, verify, bench, oracle.
//
// Exit codes: 0 ok, 2 usage, 3 io/parse/validation, 4 size cap,
// 5 certificate or invariant failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "facloc/centers.hpp"
#include "facloc/dominator.hpp"
#include "facloc/errors.hpp"
#include "facloc/greedy.hpp"
#include "facloc/instance.hpp"
#include "facloc/io.hpp"
#include "facloc/lp_rounding.hpp"
#include "facloc/oracle.hpp"
#include "facloc/primal_dual.hpp"
#include "facloc/rng.hpp"
#include "facloc/tolerance.hpp"

using namespace facloc;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitSize = 4;
constexpr int kExitCertificate = 5;

const std::vector<std::string> kAlgos = {"greedy", "pd", "lp-round", "kcenter", "kmedian", "kmeans"};

bool is_center_algo(const std::string& algo) {
  return algo == "kcenter" || algo == "kmedian" || algo == "kmeans";
}

Objective objective_of(const std::string& algo) {
  if (algo == "kmedian") return Objective::kMedian;
  if (algo == "kmeans") return Objective::kMeans;
  return Objective::kCenter;
}

struct Run {
  SolutionFile file;
  bool certified = true;
  std::string note;
  double wall_ms = 0.0;
};

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

Run run_facility(Executor& ex, const FLInstance& inst, const std::string& algo, double eps,
                 double alpha, std::uint64_t seed, const std::optional<LpSolution>& lp) {
  Run run;
  run.file.algo = algo;
  run.file.eps = eps;
  run.file.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  if (algo == "greedy") {
    auto r = greedy_solve(ex, inst, eps, seed);
    run.wall_ms = elapsed_ms(start);
    const auto dual = greedy_dual_check(inst, r.dual.alpha, 3.0);
    const auto ledger = greedy_ledger_check(inst, r.solution, r.dual.alpha, eps);
    run.certified = dual.ok && ledger.ok;
    if (!dual.ok) run.note += "dual infeasible at facility " + std::to_string(*dual.worst_facility) + "; ";
    if (!ledger.ok) run.note += "ledger " + std::to_string(ledger.lhs) + " > " + std::to_string(ledger.rhs) + "; ";
    run.file.solution = std::move(r.solution);
    run.file.alpha = std::move(r.dual.alpha);
  } else if (algo == "pd") {
    auto r = pd_solve(ex, inst, eps, seed);
    run.wall_ms = elapsed_ms(start);
    const auto dual = pd_dual_check(inst, r.state.alpha);
    const auto ledger = pd_ledger_check(inst, r.solution, r.state.alpha, eps);
    run.certified = dual.ok && ledger.ok;
    if (!dual.ok) run.note += "dual infeasible at facility " + std::to_string(*dual.worst_facility) + "; ";
    if (!ledger.ok) run.note += "ledger " + std::to_string(ledger.lhs) + " > " + std::to_string(ledger.rhs) + "; ";
    run.file.solution = std::move(r.solution);
    run.file.alpha = std::move(r.state.alpha);
  } else if (algo == "lp-round") {
    if (!lp) throw std::invalid_argument("--algo lp-round needs --lp FILE");
    auto r = lp_round_solve(ex, inst, *lp, alpha, eps, seed);
    run.wall_ms = elapsed_ms(start);
    run.certified = r.facility_claim_ok && r.connection_claim_ok && r.facility_total_ok;
    if (!r.facility_claim_ok) run.note += "per-round facility bound failed; ";
    if (!r.connection_claim_ok) run.note += "per-client connection bound failed; ";
    if (!r.facility_total_ok) run.note += "total facility bound failed; ";
    run.file.solution = std::move(r.solution);
  } else {
    throw std::invalid_argument("unknown facility algorithm " + algo);
  }
  return run;
}

Run run_center(Executor& ex, const CenterInstance& cinst, const std::string& algo, std::size_t k,
               double eps, std::uint64_t seed) {
  Run run;
  run.file.algo = algo;
  run.file.eps = eps;
  run.file.seed = seed;
  run.file.k = k;
  const auto start = std::chrono::steady_clock::now();
  Solution& s = run.file.solution;
  if (algo == "kcenter") {
    const auto r = kcenter_solve(ex, cinst, k, seed);
    run.wall_ms = elapsed_ms(start);
    s.open = r.centers;
    s.total = r.radius;
    s.rounds = r.probes.size();
    s.primitive_calls = r.primitive_calls;
    run.certified = r.previous_probe_failed;
    if (!run.certified) run.note = "probe below the threshold was not shown to fail";
  } else {
    const auto r = local_search_solve(ex, cinst, k, eps, objective_of(algo), seed);
    run.wall_ms = elapsed_ms(start);
    s.open = r.centers;
    s.total = r.cost;
    s.rounds = r.rounds;
    s.primitive_calls = r.primitive_calls;
    if (r.cap_exceeded) run.note = "round cap exceeded (flagged)";
  }
  s.assign.resize(cinst.size());
  for (std::size_t j = 0; j < cinst.size(); ++j) {
    Index best = s.open.front();
    for (Index c : s.open) {
      if (cinst.dist(j, c) < cinst.dist(j, best)) best = c;
    }
    s.assign[j] = best;
  }
  s.facility_cost = 0.0;
  s.connection_cost = s.total;
  return run;
}

double oracle_opt(const FLInstance& inst) { return exact_facloc(inst).opt; }
double oracle_opt(const CenterInstance& cinst, std::size_t k, const std::string& algo) {
  return exact_kobjective(cinst, k, objective_of(algo)).opt;
}

double ratio_of(double cost, double opt) {
  if (opt > 0.0) return cost / opt;
  return cost > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

// ---- gen -----------------------------------------------------------------

struct GenArgs {
  std::size_t n_f = 4;
  std::size_t n_c = 8;
  std::size_t dim = 2;
  double cost_lo = 0.5;
  double cost_hi = 2.0;
  std::uint64_t seed = 1;
  bool center = false;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  const FLInstance inst = gen_euclidean(a.n_f, a.n_c, a.dim, a.cost_lo, a.cost_hi, a.seed);
  if (a.center) {
    save_center_instance(CenterInstance::from_points(inst.points()->clients, a.dim), a.out);
  } else {
    save_instance(inst, a.out);
  }
  return 0;
}

// ---- solve ---------------------------------------------------------------

struct SolveArgs {
  std::string in;
  std::string algo;
  double eps = 0.1;
  double alpha = 1.0 / 3.0;
  std::size_t k = 0;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string lp;
  std::string out;
  bool stats = false;
  bool oracle = false;
};

int cmd_solve(const SolveArgs& a) {
  Executor ex(a.workers);
  Run run;
  std::optional<double> opt;
  if (is_center_algo(a.algo)) {
    if (a.k == 0) throw std::invalid_argument("--k is required for " + a.algo);
    const CenterInstance cinst = load_center_instance(a.in);
    run = run_center(ex, cinst, a.algo, a.k, a.eps, a.seed);
    if (a.oracle) opt = oracle_opt(cinst, a.k, a.algo);
  } else {
    const FLInstance inst = load_instance(a.in);
    std::optional<LpSolution> lp;
    if (!a.lp.empty()) lp = load_lp(a.lp, inst);
    run = run_facility(ex, inst, a.algo, a.eps, a.alpha, a.seed, lp);
    if (a.oracle) opt = oracle_opt(inst);
  }
  const std::string text = dump_solution(run.file);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_file(a.out, text);
  }
  const Solution& s = run.file.solution;
  if (a.stats) {
    std::cerr << "algo=" << a.algo << " total=" << fmt(s.total) << " rounds=" << s.rounds
              << " subselection_rounds=" << s.subselection_rounds
              << " primitive_calls=" << s.primitive_calls << " wall_ms=" << run.wall_ms << "\n";
  }
  if (opt) std::cerr << "oracle_opt=" << fmt(*opt) << " ratio=" << fmt(ratio_of(s.total, *opt)) << "\n";
  if (!run.note.empty()) std::cerr << "note: " << run.note << "\n";
  return run.certified ? 0 : kExitCertificate;
}

// ---- verify --------------------------------------------------------------

struct VerifyArgs {
  std::string in;
  std::string solution;
  bool metric = false;
  bool oracle = false;
  std::size_t dominator_trials = 0;
  std::uint64_t seed = 1;
  int workers = 1;
};

struct Report {
  bool ok = true;
  void line(const std::string& name, bool pass, const std::string& detail = {}) {
    std::cout << "check " << name << ": " << (pass ? "ok" : "FAIL");
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    ok = ok && pass;
  }
};

void verify_dominators(Executor& ex, std::size_t trials, std::uint64_t seed, Report& report) {
  std::mt19937_64 rng(derive_seed(seed, {tag_of("verify-dominator")}));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::size_t failures = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = 2 + rng() % 31;
    const double p = 0.1 + 0.4 * coin(rng);
    Graph g(n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (coin(rng) < p) g.add_edge(a, b);
      }
    }
    if (!check_dominator(g, max_dom(ex, g, rng()).members).ok()) ++failures;
    Bipartite h(1 + rng() % 16, 1 + rng() % 16);
    for (std::size_t u = 0; u < h.u_size(); ++u) {
      for (std::size_t v = 0; v < h.v_size(); ++v) {
        if (coin(rng) < p) h.add_edge(u, v);
      }
    }
    if (!check_dominator(h, max_u_dom(ex, h, rng()).members).ok()) ++failures;
  }
  report.line("dominator", failures == 0,
              std::to_string(2 * trials) + " graphs, " + std::to_string(failures) + " failures");
}

bool close(double a, double b) { return std::abs(a - b) <= tol_for(a, b); }

int cmd_verify(const VerifyArgs& a) {
  Executor ex(a.workers);
  Report report;
  if (a.dominator_trials > 0) verify_dominators(ex, a.dominator_trials, a.seed, report);
  if (a.in.empty()) {
    if (a.dominator_trials == 0) throw std::invalid_argument("nothing to verify; give --in or --dominator");
    return report.ok ? 0 : kExitCertificate;
  }

  std::optional<SolutionFile> file;
  if (!a.solution.empty()) file = load_solution(a.solution);
  const bool centers = file ? is_center_algo(file->algo) : false;

  if (centers) {
    const CenterInstance cinst = load_center_instance(a.in);
    if (a.metric) {
      const auto mc = verify_metric(cinst.dist_matrix());
      report.line("metric", mc.ok);
    }
    const Solution& s = file->solution;
    const Objective obj = objective_of(file->algo);
    const double value = center_objective(cinst, s.open, obj);
    report.line("objective", close(value, s.total), "recomputed " + fmt(value));
    if (a.oracle && file->k) {
      const double opt = oracle_opt(cinst, *file->k, file->algo);
      const double bound = obj == Objective::kCenter ? 2.0 : obj == Objective::kMedian ? 5.0 + file->eps : 81.0 + file->eps;
      const double r = ratio_of(s.total, opt);
      report.line("ratio", approx_le(s.total, bound * opt), "ratio " + fmt(r) + ", bound " + fmt(bound));
    }
    return report.ok ? 0 : kExitCertificate;
  }

  const FLInstance inst = load_instance(a.in);
  if (a.metric) {
    const auto mc = verify_metric(inst);
    std::string detail;
    if (mc.violation) {
      detail = "triple (" + std::to_string((*mc.violation)[0]) + ", " + std::to_string((*mc.violation)[1]) +
               ", " + std::to_string((*mc.violation)[2]) + ")";
    }
    report.line("metric", mc.ok, detail);
  }
  if (file) {
    const Solution& s = file->solution;
    bool valid = true;
    Solution again;
    try {
      again = make_solution(inst, s.open, s.assign);
    } catch (const std::invalid_argument& e) {
      valid = false;
      report.line("solution", false, e.what());
    }
    if (valid) report.line("solution", close(again.total, s.total), "recomputed total " + fmt(again.total));
    if (valid && file->algo == "greedy") {
      const auto dual = greedy_dual_check(inst, file->alpha, 3.0);
      report.line("dual", dual.ok, "worst slack " + fmt(dual.worst_slack));
      const auto ledger = greedy_ledger_check(inst, again, file->alpha, file->eps);
      report.line("ledger", ledger.ok, fmt(ledger.lhs) + " <= " + fmt(ledger.rhs));
    } else if (valid && file->algo == "pd") {
      const auto dual = pd_dual_check(inst, file->alpha);
      report.line("dual", dual.ok, "worst slack " + fmt(dual.worst_slack));
      const auto ledger = pd_ledger_check(inst, again, file->alpha, file->eps);
      report.line("ledger", ledger.ok, fmt(ledger.lhs) + " <= " + fmt(ledger.rhs));
    }
    if (a.oracle) {
      const double opt = oracle_opt(inst);
      const double r = ratio_of(s.total, opt);
      if (file->algo == "greedy") {
        report.line("ratio", approx_le(s.total, (6.0 + file->eps) * opt), "ratio " + fmt(r));
      } else if (file->algo == "pd") {
        const double slack = 3.0 * gamma_bounds(inst).gamma / static_cast<double>(inst.m());
        report.line("ratio", approx_le(s.total, 3.0 * (1.0 + file->eps) * opt + slack), "ratio " + fmt(r));
      } else {
        std::cout << "ratio " << fmt(r) << "\n";
      }
    }
  } else if (a.oracle) {
    std::cout << "oracle_opt " << fmt(oracle_opt(inst)) << "\n";
  }
  return report.ok ? 0 : kExitCertificate;
}

// ---- bench ---------------------------------------------------------------

struct BenchArgs {
  std::vector<std::string> algos = {"greedy", "pd"};
  std::vector<std::size_t> n_f = {4};
  std::vector<std::size_t> n_c = {8};
  std::vector<std::size_t> k = {2};
  std::vector<double> eps = {0.1};
  std::size_t seeds = 3;
  std::uint64_t seed = 1;
  std::size_t dim = 2;
  double alpha = 1.0 / 3.0;
  std::string in;
  bool oracle = false;
  int workers = 1;
  std::string out;
};

int cmd_bench(const BenchArgs& a) {
  for (const auto& algo : a.algos) {
    if (std::find(kAlgos.begin(), kAlgos.end(), algo) == kAlgos.end()) {
      throw std::invalid_argument("unknown algorithm " + algo);
    }
  }
  std::ostringstream csv;
  csv << "algo,n_f,n_c,k,eps,seed,cost,oracle_opt,ratio,rounds,subselection_rounds,primitive_calls,wall_ms\n";
  std::optional<FLInstance> fixed;
  if (!a.in.empty()) fixed = load_instance(a.in);

  for (const auto& algo : a.algos) {
    const bool centers = is_center_algo(algo);
    const std::vector<std::size_t> ks = centers ? a.k : std::vector<std::size_t>{0};
    for (std::size_t nf : fixed ? std::vector<std::size_t>{fixed->num_facilities()} : a.n_f) {
      for (std::size_t nc : fixed ? std::vector<std::size_t>{fixed->num_clients()} : a.n_c) {
        for (std::size_t k : ks) {
          for (double eps : a.eps) {
            for (std::size_t s = 0; s < a.seeds; ++s) {
              const std::uint64_t seed = a.seed + s;
              const FLInstance inst = fixed ? *fixed : gen_euclidean(nf, nc, a.dim, 0.5, 2.0, seed);
              Executor ex(a.workers);
              Run run;
              std::optional<double> opt;
              if (centers) {
                if (!inst.points()) throw std::invalid_argument("center benchmarks need coordinates");
                const auto cinst = CenterInstance::from_points(inst.points()->clients, inst.points()->dim);
                run = run_center(ex, cinst, algo, k, eps, seed);
                if (a.oracle) opt = oracle_opt(cinst, k, algo);
              } else {
                std::optional<LpSolution> lp;
                if (algo == "lp-round" || a.oracle) {
                  const auto exact = exact_facloc(inst);
                  opt = exact.opt;
                  if (algo == "lp-round") {
                    std::vector<Index> assign(inst.num_clients());
                    for (std::size_t j = 0; j < inst.num_clients(); ++j) {
                      Index best = exact.open.front();
                      for (Index i : exact.open) {
                        if (inst.dist(j, i) < inst.dist(j, best)) best = i;
                      }
                      assign[j] = best;
                    }
                    lp = integral_lp(inst, exact.open, assign);
                  }
                }
                run = run_facility(ex, inst, algo, eps, a.alpha, seed, lp);
              }
              const Solution& sol = run.file.solution;
              csv << algo << ',' << (centers ? nc : nf) << ',' << nc << ',';
              if (centers) csv << k;
              csv << ',' << eps << ',' << seed << ',' << fmt(sol.total) << ',';
              if (opt) csv << fmt(*opt);
              csv << ',';
              if (opt) csv << fmt(ratio_of(sol.total, *opt));
              csv << ',' << sol.rounds << ',' << sol.subselection_rounds << ',' << sol.primitive_calls << ','
                  << run.wall_ms << '\n';
            }
          }
        }
      }
    }
  }
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(a.out, csv.str());
  }
  return 0;
}

// ---- oracle --------------------------------------------------------------

struct OracleArgs {
  std::string in;
  std::string out;
  std::size_t k = 0;
  std::string objective = "median";
};

int cmd_oracle(const OracleArgs& a) {
  if (a.k > 0) {
    const CenterInstance cinst = load_center_instance(a.in);
    const Objective obj = a.objective == "means" ? Objective::kMeans
                          : a.objective == "center" ? Objective::kCenter
                                                    : Objective::kMedian;
    const auto exact = exact_kobjective(cinst, a.k, obj);
    std::cout << "opt " << fmt(exact.opt) << "\ncenters";
    for (Index c : exact.centers) std::cout << ' ' << c;
    std::cout << "\n";
    return 0;
  }
  const FLInstance inst = load_instance(a.in);
  const auto exact = exact_facloc(inst);
  std::cout << "opt " << fmt(exact.opt) << "\nopen";
  for (Index i : exact.open) std::cout << ' ' << i;
  std::cout << "\n";
  if (!a.out.empty()) {
    std::vector<Index> assign(inst.num_clients());
    for (std::size_t j = 0; j < inst.num_clients(); ++j) {
      Index best = exact.open.front();
      for (Index i : exact.open) {
        if (inst.dist(j, i) < inst.dist(j, best)) best = i;
      }
      assign[j] = best;
    }
    save_lp(integral_lp(inst, exact.open, assign), a.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel approximation algorithms for metric facility location"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate a random Euclidean instance");
  g->add_option("--n-f", gen.n_f, "facilities")->check(CLI::PositiveNumber);
  g->add_option("--n-c", gen.n_c, "clients")->check(CLI::PositiveNumber);
  g->add_option("--dim", gen.dim, "dimension")->check(CLI::PositiveNumber);
  g->add_option("--cost-lo", gen.cost_lo, "lowest facility cost");
  g->add_option("--cost-hi", gen.cost_hi, "highest facility cost");
  g->add_option("--seed", gen.seed, "seed");
  g->add_flag("--center", gen.center, "write a center file over the client points");
  g->add_option("--out", gen.out, "output file")->required();

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "run one algorithm");
  s->add_option("--in", solve.in, "instance file")->required();
  s->add_option("--algo", solve.algo, "algorithm")->required()->check(CLI::IsMember(kAlgos));
  s->add_option("--eps", solve.eps, "slack epsilon");
  s->add_option("--alpha", solve.alpha, "filtering alpha for lp-round");
  s->add_option("--k", solve.k, "number of centers");
  s->add_option("--seed", solve.seed, "seed");
  s->add_option("--workers", solve.workers, "worker threads")->check(CLI::PositiveNumber);
  s->add_option("--lp", solve.lp, "LP solution file for lp-round");
  s->add_option("--out", solve.out, "solution file (default stdout)");
  s->add_flag("--stats", solve.stats, "print counters to stderr");
  s->add_flag("--oracle", solve.oracle, "compare against the exact optimum");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "check instances, solutions and dominator sets");
  v->add_option("--in", verify.in, "instance file");
  v->add_option("--solution", verify.solution, "solution file");
  v->add_flag("--metric", verify.metric, "check the triangle inequality");
  v->add_flag("--oracle", verify.oracle, "check the ratio against the exact optimum");
  v->add_option("--dominator", verify.dominator_trials, "random dominator-set trials");
  v->add_option("--seed", verify.seed, "seed");
  v->add_option("--workers", verify.workers, "worker threads")->check(CLI::PositiveNumber);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "sweep algorithms and parameters, write CSV");
  b->add_option("--algo", bench.algos, "algorithms")->delimiter(',')->check(CLI::IsMember(kAlgos));
  b->add_option("--n-f", bench.n_f, "facility counts")->delimiter(',');
  b->add_option("--n-c", bench.n_c, "client counts")->delimiter(',');
  b->add_option("--k", bench.k, "center counts")->delimiter(',');
  b->add_option("--eps", bench.eps, "epsilons")->delimiter(',');
  b->add_option("--seeds", bench.seeds, "seeds per configuration");
  b->add_option("--seed", bench.seed, "first seed");
  b->add_option("--dim", bench.dim, "dimension");
  b->add_option("--alpha", bench.alpha, "filtering alpha for lp-round");
  b->add_option("--in", bench.in, "fixed instance file");
  b->add_flag("--oracle", bench.oracle, "fill oracle_opt and ratio");
  b->add_option("--workers", bench.workers, "worker threads")->check(CLI::PositiveNumber);
  b->add_option("--out", bench.out, "CSV file (default stdout)");

  OracleArgs oracle;
  auto* o = app.add_subcommand("oracle", "exact optimum by enumeration");
  o->add_option("--in", oracle.in, "instance or center file")->required();
  o->add_option("--out", oracle.out, "write the optimum as an integral LP file");
  o->add_option("--k", oracle.k, "solve the k-objective instead");
  o->add_option("--objective", oracle.objective, "median, means or center")
      ->check(CLI::IsMember({"median", "means", "center"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_gen(gen);
    if (s->parsed()) return cmd_solve(solve);
    if (v->parsed()) return cmd_verify(verify);
    if (b->parsed()) return cmd_bench(bench);
    if (o->parsed()) return cmd_oracle(oracle);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const SizeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSize;
  } catch (const InvariantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCertificate;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
