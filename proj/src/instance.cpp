#include "facloc/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "facloc/errors.hpp"
#include "facloc/rng.hpp"

namespace facloc {

namespace {

double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

std::span<const double> point(const std::vector<double>& coords, std::size_t dim, std::size_t i) {
  return {coords.data() + i * dim, dim};
}

}  // namespace

FLInstance::FLInstance(std::vector<double> facility_costs, DenseMatrix dist,
                       std::optional<Points> points)
    : costs_(std::move(facility_costs)), dist_(std::move(dist)), points_(std::move(points)) {
  if (costs_.empty()) throw std::invalid_argument("instance needs at least one facility");
  if (dist_.rows() == 0) throw std::invalid_argument("instance needs at least one client");
  if (dist_.cols() != costs_.size()) {
    throw ValidationError("dist has " + std::to_string(dist_.cols()) + " columns but n_f = " +
                          std::to_string(costs_.size()));
  }
  for (std::size_t i = 0; i < costs_.size(); ++i) {
    if (!std::isfinite(costs_[i]) || costs_[i] < 0.0) {
      throw ValidationError("facility_costs[" + std::to_string(i) + "] must be finite and >= 0");
    }
  }
  for (std::size_t j = 0; j < dist_.rows(); ++j) {
    for (std::size_t i = 0; i < dist_.cols(); ++i) {
      const double d = dist_(j, i);
      if (!std::isfinite(d) || d < 0.0) {
        throw ValidationError("dist[" + std::to_string(j) + "][" + std::to_string(i) +
                              "] must be finite and >= 0");
      }
    }
  }
  if (points_) {
    const Points& p = *points_;
    if (p.dim == 0 || p.facilities.size() != costs_.size() * p.dim ||
        p.clients.size() != dist_.rows() * p.dim) {
      throw ValidationError("points do not match instance dimensions");
    }
    for (std::size_t j = 0; j < dist_.rows(); ++j) {
      for (std::size_t i = 0; i < costs_.size(); ++i) {
        const double e = euclidean(point(p.clients, p.dim, j), point(p.facilities, p.dim, i));
        if (std::abs(e - dist_(j, i)) > 1e-12 * std::max(1.0, e)) {
          throw ValidationError("dist[" + std::to_string(j) + "][" + std::to_string(i) +
                                "] disagrees with point coordinates");
        }
      }
    }
  }
}

FLInstance gen_euclidean(std::size_t n_f, std::size_t n_c, std::size_t dim, double cost_lo,
                         double cost_hi, std::uint64_t seed) {
  if (n_f == 0 || n_c == 0 || dim == 0) {
    throw std::invalid_argument("gen_euclidean: n_f, n_c and dim must be positive");
  }
  if (!(cost_lo >= 0.0) || !(cost_hi >= cost_lo) || !std::isfinite(cost_hi)) {
    throw std::invalid_argument("gen_euclidean: need 0 <= cost_lo <= cost_hi");
  }
  // mt19937_64 output is fully specified by the standard; the conversion to
  // doubles is done by hand so files are identical across standard libraries.
  std::mt19937_64 gen(derive_seed(seed, {tag_of("gen_euclidean")}));
  Points p;
  p.dim = dim;
  p.facilities.resize(n_f * dim);
  p.clients.resize(n_c * dim);
  for (double& x : p.facilities) x = unit_interval(gen());
  for (double& x : p.clients) x = unit_interval(gen());
  std::vector<double> costs(n_f);
  for (double& c : costs) c = cost_lo + (cost_hi - cost_lo) * unit_interval(gen());

  DenseMatrix dist(n_c, n_f);
  for (std::size_t j = 0; j < n_c; ++j) {
    for (std::size_t i = 0; i < n_f; ++i) {
      dist(j, i) = euclidean(point(p.clients, dim, j), point(p.facilities, dim, i));
    }
  }
  return FLInstance(std::move(costs), std::move(dist), std::move(p));
}

MetricCheck verify_metric(const DenseMatrix& full) {
  if (full.rows() != full.cols()) throw std::invalid_argument("distance matrix must be square");
  const std::size_t n = full.rows();
  MetricCheck result;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        const double excess = full(a, c) - (full(a, b) + full(b, c));
        if (excess > 1e-9) {
          result.ok = false;
          result.excess = excess;
          result.violation = std::array<std::size_t, 3>{a, b, c};
          return result;
        }
      }
    }
  }
  return result;
}

DenseMatrix combined_distances(const FLInstance& inst) {
  const std::size_t nf = inst.num_facilities();
  const std::size_t nc = inst.num_clients();
  const std::size_t n = nf + nc;
  DenseMatrix full(n, n);
  for (std::size_t j = 0; j < nc; ++j) {
    for (std::size_t i = 0; i < nf; ++i) {
      full(i, nf + j) = inst.dist(j, i);
      full(nf + j, i) = inst.dist(j, i);
    }
  }
  if (const auto& pts = inst.points()) {
    for (std::size_t a = 0; a < nf; ++a) {
      for (std::size_t b = 0; b < nf; ++b) {
        full(a, b) = euclidean(point(pts->facilities, pts->dim, a),
                               point(pts->facilities, pts->dim, b));
      }
    }
    for (std::size_t a = 0; a < nc; ++a) {
      for (std::size_t b = 0; b < nc; ++b) {
        full(nf + a, nf + b) =
            euclidean(point(pts->clients, pts->dim, a), point(pts->clients, pts->dim, b));
      }
    }
    return full;
  }
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < nf; ++a) {
    for (std::size_t b = 0; b < nf; ++b) {
      double best = a == b ? 0.0 : inf;
      for (std::size_t j = 0; j < nc && a != b; ++j) {
        best = std::min(best, inst.dist(j, a) + inst.dist(j, b));
      }
      full(a, b) = best;
    }
  }
  for (std::size_t a = 0; a < nc; ++a) {
    for (std::size_t b = 0; b < nc; ++b) {
      double best = a == b ? 0.0 : inf;
      for (std::size_t i = 0; i < nf && a != b; ++i) {
        best = std::min(best, inst.dist(a, i) + inst.dist(b, i));
      }
      full(nf + a, nf + b) = best;
    }
  }
  return full;
}

MetricCheck verify_metric(const FLInstance& inst) { return verify_metric(combined_distances(inst)); }

GammaBounds gamma_bounds(Executor& ex, const FLInstance& inst) {
  if (inst.num_facilities() == 0) throw std::invalid_argument("gamma_bounds: no facilities");
  GammaBounds g;
  g.gamma_j = reduce_rows_by(
      ex, inst.num_clients(), inst.num_facilities(),
      [&](std::size_t j, std::size_t i) { return inst.cost(i) + inst.dist(j, i); },
      std::numeric_limits<double>::infinity(), [](double a, double b) { return std::min(a, b); });
  g.gamma = reduce(ex, g.gamma_j, ReduceOp::kMax);
  g.sum_gamma = reduce(ex, g.gamma_j, ReduceOp::kSum);
  return g;
}

GammaBounds gamma_bounds(const FLInstance& inst) {
  Executor ex;
  return gamma_bounds(ex, inst);
}

Solution make_solution(const FLInstance& inst, std::vector<Index> open, std::vector<Index> assign) {
  std::sort(open.begin(), open.end());
  open.erase(std::unique(open.begin(), open.end()), open.end());
  if (assign.size() != inst.num_clients()) {
    throw std::invalid_argument("assignment length does not match client count");
  }
  Solution s;
  for (Index i : open) {
    if (i >= inst.num_facilities()) throw std::invalid_argument("open facility out of range");
    s.facility_cost += inst.cost(i);
  }
  for (std::size_t j = 0; j < assign.size(); ++j) {
    if (!std::binary_search(open.begin(), open.end(), assign[j])) {
      throw std::invalid_argument("client " + std::to_string(j) + " assigned to a closed facility");
    }
    s.connection_cost += inst.dist(j, assign[j]);
  }
  s.total = s.facility_cost + s.connection_cost;
  s.open = std::move(open);
  s.assign = std::move(assign);
  return s;
}

double nearest_connection_cost(const FLInstance& inst, std::span<const Index> open) {
  if (open.empty()) return std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (std::size_t j = 0; j < inst.num_clients(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (Index i : open) best = std::min(best, inst.dist(j, i));
    total += best;
  }
  return total;
}

double facloc_cost(const FLInstance& inst, std::span<const Index> open) {
  double f = 0.0;
  for (Index i : open) f += inst.cost(i);
  return f + nearest_connection_cost(inst, open);
}

}  // namespace facloc
