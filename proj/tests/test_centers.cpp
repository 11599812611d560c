#include <doctest.h>

#include <cmath>

#include "facloc/centers.hpp"
#include "facloc/errors.hpp"
#include "facloc/oracle.hpp"
#include "facloc/tolerance.hpp"
#include "support.hpp"

using namespace facloc;

namespace {

CenterInstance random_points(std::size_t n, std::uint64_t seed) {
  const FLInstance inst = gen_euclidean(1, n, 2, 0.0, 0.0, seed);
  return CenterInstance::from_points(inst.points()->clients, 2);
}

std::optional<Swap> brute_force_swap(const SwapState& state) {
  const CenterInstance& c = state.instance();
  const double k = static_cast<double>(state.k());
  std::optional<Swap> best;
  for (Index out : state.open()) {
    for (std::size_t in = 0; in < c.size(); ++in) {
      if (state.is_open(in)) continue;
      std::vector<Index> next = state.open();
      std::replace(next.begin(), next.end(), out, static_cast<Index>(in));
      const double cost = center_objective(c, next, state.objective());
      if (!best || cost < best->new_cost) best = Swap{out, static_cast<Index>(in), cost};
    }
  }
  if (best && !(best->new_cost < (1.0 - state.beta() / k) * state.cost())) return std::nullopt;
  return best;
}

}  // namespace

TEST_CASE("center instances") {
  const CenterInstance line = test::line_points({0, 1, 10});
  CHECK(line.size() == 3);
  CHECK(line.dist(0, 2) == 10.0);
  CHECK_THROWS_AS(CenterInstance(DenseMatrix(2, 2, {0, 1, 2, 0})), ValidationError);
  CHECK_THROWS_AS(CenterInstance(DenseMatrix(2, 2, {1, 1, 1, 0})), ValidationError);
  CHECK_THROWS_AS(CenterInstance(DenseMatrix(2, 3)), ValidationError);

  const std::vector<Index> c{1};
  CHECK(center_objective(line, c, Objective::kMedian) == 10.0);
  CHECK(center_objective(line, c, Objective::kMeans) == 82.0);
  CHECK(center_objective(line, c, Objective::kCenter) == 9.0);
  CHECK(to_string(Objective::kMeans) == "means");
}

TEST_CASE("k-center") {
  Executor ex;
  const CenterInstance line = test::line_points({0, 1, 10});
  const auto all = kcenter_solve(ex, line, 3, 1);
  CHECK(all.radius == 0.0);
  CHECK(all.centers == std::vector<Index>{0, 1, 2});

  const auto two = kcenter_solve(ex, line, 2, 1);
  CHECK(exact_kobjective(line, 2, Objective::kCenter).opt == 1.0);
  CHECK(two.radius <= 2.0);
  CHECK(two.centers.size() <= 2);
  CHECK(two.previous_probe_failed);

  CHECK_THROWS_AS(kcenter_solve(ex, line, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(kcenter_solve(ex, line, 4, 1), std::invalid_argument);
}

TEST_CASE("k-center against the oracle") {
  Executor ex;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (std::size_t k : {2u, 3u}) {
      const CenterInstance c = random_points(12, seed);
      const auto r = kcenter_solve(ex, c, k, seed);
      const double opt = exact_kobjective(c, k, Objective::kCenter).opt;
      CHECK(approx_le(r.radius, 2.0 * opt));
      CHECK(r.centers.size() <= k);
      CHECK(r.radius == center_objective(c, r.centers, Objective::kCenter));
      CHECK(r.previous_probe_failed);
      for (const auto& p : r.probes) {
        if (p.t == r.threshold_index) CHECK(p.size <= k);
        if (p.t + 1 == r.threshold_index) CHECK(p.size > k);
      }
    }
  }
}

TEST_CASE("swap state tracks nearest and second nearest") {
  Executor ex;
  const CenterInstance c = random_points(10, 4);
  SwapState s(ex, c, {7, 2, 5}, Objective::kMedian, 0.1);
  CHECK(s.open() == std::vector<Index>{2, 5, 7});
  CHECK(s.beta() == doctest::Approx(0.1 / 1.1));
  auto verify = [&] {
    for (std::size_t j = 0; j < c.size(); ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (Index i : s.open()) best = std::min(best, c.dist(j, i));
      CHECK(c.dist(j, s.assigned(j)) == best);
      CHECK(s.is_open(s.second(j)));
      CHECK(s.second(j) != s.assigned(j));
      for (Index i : s.open()) {
        if (i != s.assigned(j)) CHECK(c.dist(j, s.second(j)) <= c.dist(j, i));
      }
    }
    CHECK(s.cost() == doctest::Approx(center_objective(c, s.open(), Objective::kMedian)));
  };
  verify();
  s.apply(ex, Swap{5, 0, 0.0});
  CHECK(s.open() == std::vector<Index>{0, 2, 7});
  verify();
  CHECK_THROWS_AS(s.apply(ex, Swap{5, 1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(SwapState(ex, c, {1}, Objective::kCenter, 0.1), std::invalid_argument);
}

TEST_CASE("improving swaps") {
  Executor ex;
  const CenterInstance line = test::line_points({0, 1, 2});
  SwapState s(ex, line, {0}, Objective::kMedian, 0.1);
  CHECK(s.cost() == 3.0);
  const auto swap = find_improving_swap(ex, s);
  REQUIRE(swap);
  CHECK(swap->out == 0);
  CHECK(swap->in == 1);
  CHECK(swap->new_cost == 2.0);
  CHECK(2.0 < (1.0 - s.beta()) * 3.0);

  SwapState best(ex, line, {1}, Objective::kMedian, 0.1);
  CHECK_FALSE(find_improving_swap(ex, best));

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const CenterInstance c = random_points(10, 100 + seed);
    for (Objective obj : {Objective::kMedian, Objective::kMeans}) {
      const std::vector<Index> start{static_cast<Index>(seed % 10), static_cast<Index>((seed + 3) % 10)};
      SwapState st(ex, c, start, obj, 0.1);
      const auto fast = find_improving_swap(ex, st);
      const auto slow = brute_force_swap(st);
      REQUIRE(fast.has_value() == slow.has_value());
      if (fast) {
        CHECK(fast->out == slow->out);
        CHECK(fast->in == slow->in);
        CHECK(fast->new_cost == doctest::Approx(slow->new_cost).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("local search") {
  Executor ex;
  const CenterInstance line = test::line_points({0, 1, 2});
  const auto one = local_search_solve(ex, line, 1, 0.1, Objective::kMedian, 1);
  CHECK(one.centers == std::vector<Index>{1});
  CHECK(one.cost == 2.0);
  CHECK(exact_kobjective(line, 1, Objective::kMedian).opt == 2.0);

  const auto full = local_search_solve(ex, line, 3, 0.1, Objective::kMeans, 1);
  CHECK(full.cost == 0.0);
  CHECK(full.rounds == 0);

  CHECK_THROWS_AS(local_search_solve(ex, line, 1, 0.0, Objective::kMedian, 1), std::invalid_argument);
  CHECK_THROWS_AS(local_search_solve(ex, line, 1, 1.0, Objective::kMedian, 1), std::invalid_argument);
  CHECK_THROWS_AS(local_search_solve(ex, line, 4, 0.1, Objective::kMedian, 1), std::invalid_argument);
  CHECK_THROWS_AS(local_search_solve(ex, line, 1, 0.1, Objective::kCenter, 1), std::invalid_argument);
}

TEST_CASE("local search against the oracle") {
  Executor ex;
  std::size_t flagged = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CenterInstance c = random_points(10, 200 + seed);
    for (std::size_t k : {2u, 3u}) {
      for (Objective obj : {Objective::kMedian, Objective::kMeans}) {
        const auto r = local_search_solve(ex, c, k, 0.1, obj, seed);
        const double opt = exact_kobjective(c, k, obj).opt;
        const double bound = obj == Objective::kMedian ? 5.1 : 81.1;
        CHECK(approx_le(r.cost, bound * opt));
        CHECK(r.centers.size() == k);
        CHECK(r.cost == doctest::Approx(center_objective(c, r.centers, obj)));
        const double beta = 0.1 / 1.1;
        for (std::size_t s = 1; s < r.history.size(); ++s) {
          CHECK(r.history[s] < (1.0 - beta / static_cast<double>(k)) * r.history[s - 1]);
        }
        CHECK(r.history.size() == r.rounds + 1);
        if (r.cap_exceeded) ++flagged;
      }
    }
  }
  MESSAGE("local search runs over the round cap: " << flagged);
}
