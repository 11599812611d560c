#include <doctest.h>

#include <random>

#include "facloc/greedy.hpp"
#include "facloc/oracle.hpp"
#include "facloc/tolerance.hpp"
#include "support.hpp"

using namespace facloc;

TEST_CASE("cheapest maximal star") {
  Executor ex;
  auto s = cheapest_maximal_star(ex, 0.0, std::vector<double>{1, 2});
  CHECK(s.price == 1.0);
  CHECK(s.size == 1);

  s = cheapest_maximal_star(ex, 0.0, std::vector<double>{1, 1, 1});
  CHECK(s.price == 1.0);
  CHECK(s.size == 3);

  s = cheapest_maximal_star(ex, 4.0, std::vector<double>{1, 1, 10});
  CHECK(s.price == 3.0);
  CHECK(s.size == 2);
  CHECK(s.radius == 1.0);

  CHECK(cheapest_maximal_star(ex, 1.0, std::vector<double>{}).size == 0);
}

TEST_CASE("star price is the point where contributions pay the facility") {
  Executor ex;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int t = 0; t < 200; ++t) {
    const double f = u(rng);
    std::vector<double> d(1 + rng() % 12);
    for (double& x : d) x = u(rng);
    std::sort(d.begin(), d.end());
    const Star s = cheapest_maximal_star(ex, f, d);
    double paid = 0.0;
    for (double x : d) paid += std::max(0.0, s.price - x);
    CHECK(paid == doctest::Approx(f).epsilon(1e-9));
    // Members are exactly the clients within the price, up to ties.
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (k < s.size) CHECK(approx_le(d[k], s.price + 1e-12));
      if (k >= s.size && s.size < d.size()) CHECK(approx_ge(d[k], s.price));
    }
    // p_k is unimodal, so the first local minimum is the global one.
    double prefix = f;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < d.size(); ++k) {
      prefix += d[k];
      best = std::min(best, prefix / static_cast<double>(k + 1));
    }
    CHECK(s.price == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("preprocessing") {
  Executor ex;
  {
    const FLInstance e2 = test::e2();
    StarState state(ex, e2);
    GreedyDual dual{std::vector<double>(3, 0.0), std::vector<Index>(3, kNoFacility)};
    const auto pre = greedy_preprocess(ex, state, dual, gamma_bounds(e2).gamma);
    CHECK(pre.opened.empty());
    CHECK(pre.removed.empty());
    CHECK(state.num_remaining() == 3);
  }
  {
    // A free facility next to its client, plus a far expensive pair.
    const FLInstance inst = test::line_instance({0.0, 100.0}, {0.0, 50.0}, {0.0, 100.0});
    StarState state(ex, inst);
    GreedyDual dual{std::vector<double>(2, 5.0), std::vector<Index>(2, kNoFacility)};
    const auto pre = greedy_preprocess(ex, state, dual, gamma_bounds(inst).gamma);
    CHECK(pre.opened == std::vector<Index>{0});
    CHECK(pre.removed == std::vector<Index>{0});
    CHECK(dual.alpha[0] == 0.0);
    CHECK(dual.pi[0] == 0);
    CHECK(state.cost(0) == 0.0);
  }
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const FLInstance inst = gen_euclidean(4, 7, 2, 0.0, 0.01, seed);
    StarState state(ex, inst);
    GreedyDual dual{std::vector<double>(7, 0.0), std::vector<Index>(7, kNoFacility)};
    const double gamma = gamma_bounds(inst).gamma;
    greedy_preprocess(ex, state, dual, gamma);
    const double bound = gamma / static_cast<double>(inst.m() * inst.m());
    for (const Star& s : state.stars(ex)) {
      if (s.size > 0) CHECK(strictly_greater(s.price, bound, kTieTol));
    }
  }
}

TEST_CASE("subselection") {
  Executor ex;
  {
    const FLInstance inst = test::line_instance({0.0}, {1.0}, {0.0, 0.5, 1.0});
    StarState state(ex, inst);
    GreedyDual dual{std::vector<double>(3, 0.0), std::vector<Index>(3, kNoFacility)};
    Bipartite h(1, 3);
    for (std::size_t j = 0; j < 3; ++j) h.add_edge(0, j);
    const auto r = subselect(ex, state, dual, h, {1}, 0.9, 0.1, 1);
    CHECK(r.opened == std::vector<Index>{0});
    CHECK(r.rounds == 1);
    CHECK(state.num_remaining() == 0);
    CHECK(dual.pi == std::vector<Index>{0, 0, 0});
    CHECK(dual.alpha == std::vector<double>{0.9, 0.9, 0.9});
  }
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    // Two co-located facilities sharing every client.
    const FLInstance inst = test::line_instance({0.0, 0.0}, {1.0, 1.0}, {1.0, -1.0, 1.0});
    StarState state(ex, inst);
    GreedyDual dual{std::vector<double>(3, 0.0), std::vector<Index>(3, kNoFacility)};
    Bipartite h(2, 3);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 3; ++j) h.add_edge(i, j);
    }
    const auto labels = random_labels(ex, 2, seed, 0);
    const Index winner = labels[0] < labels[1] ? 0 : 1;
    const auto r = subselect(ex, state, dual, h, {1, 1}, 4.0 / 3.0, 0.1, seed);
    CHECK(r.opened == std::vector<Index>{winner});
    CHECK(r.rounds == 1);
    CHECK(state.num_remaining() == 0);
    CHECK(dual.pi == std::vector<Index>(3, winner));
    CHECK(r.min_paid_fraction == 1.0);
  }
}

TEST_CASE("greedy on small instances") {
  Executor ex;
  const auto one = greedy_solve(ex, test::single_pair(1.0, 0.0), 0.1, 1);
  CHECK(one.solution.total == 1.0);

  const FLInstance e2 = test::e2();
  const auto r = greedy_solve(ex, e2, 0.1, 1);
  CHECK(r.solution.total <= 6.1 * 3.0);
  CHECK(r.solution.total == 3.0);
  CHECK(greedy_dual_check(e2, r.dual.alpha, 3.0).ok);
  CHECK(greedy_ledger_check(e2, r.solution, r.dual.alpha, 0.1).ok);

  CHECK_THROWS_AS(greedy_solve(ex, e2, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(greedy_solve(ex, e2, 1.5, 1), std::invalid_argument);
}

TEST_CASE("greedy dual check") {
  const FLInstance pair = test::single_pair(1.0, 0.0);
  CHECK(greedy_dual_check(pair, std::vector<double>{3.0}).ok);
  const auto doubled = greedy_dual_check(pair, std::vector<double>{6.0});
  CHECK_FALSE(doubled.ok);
  REQUIRE(doubled.worst_facility);
  CHECK(*doubled.worst_facility == 0);
  CHECK(doubled.worst_slack == doctest::Approx(-1.0));
  CHECK_FALSE(greedy_dual_check(pair, std::vector<double>{-1.0}).ok);
  CHECK_THROWS_AS(greedy_dual_check(pair, std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("greedy against the oracle") {
  Executor ex;
  double worst = 0.0;
  std::size_t above_tight = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const FLInstance inst = test::random_instance(seed, 1, 6, 1, 10);
    const auto r = greedy_solve(ex, inst, 0.1, seed);
    const double opt = exact_facloc(inst).opt;
    const double ratio = r.solution.total / opt;
    worst = std::max(worst, ratio);
    if (ratio > 3.722 + 0.1) ++above_tight;
    CHECK(approx_le(r.solution.total, 6.1 * opt));
    CHECK(greedy_dual_check(inst, r.dual.alpha, 3.0).ok);
    CHECK(greedy_ledger_check(inst, r.solution, r.dual.alpha, 0.1).ok);
    CHECK(r.outer_rounds <= r.round_bound);
    CHECK(r.min_paid_fraction >= 1.0 / (2.0 * 1.1) - 1e-12);
    CHECK(std::is_sorted(r.taus.begin(), r.taus.end()));

    std::vector<std::uint8_t> pre(inst.num_clients(), 0);
    for (Index j : r.preprocess.removed) pre[j] = 1;
    for (std::size_t j = 0; j < inst.num_clients(); ++j) {
      CHECK(std::binary_search(r.solution.open.begin(), r.solution.open.end(), r.dual.pi[j]));
      if (!pre[j]) CHECK(r.dual.alpha[j] > 0.0);
    }
  }
  MESSAGE("worst greedy ratio " << worst << ", runs above 3.722+eps: " << above_tight);
}
