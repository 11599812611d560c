#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "facloc/centers.hpp"
#include "facloc/instance.hpp"
#include "facloc/rng.hpp"

namespace facloc::test {

// Facilities and clients on a line; distances are |a - b|.
inline FLInstance line_instance(const std::vector<double>& facility_x, std::vector<double> costs,
                                const std::vector<double>& client_x) {
  DenseMatrix dist(client_x.size(), facility_x.size());
  for (std::size_t j = 0; j < client_x.size(); ++j) {
    for (std::size_t i = 0; i < facility_x.size(); ++i) dist(j, i) = std::abs(client_x[j] - facility_x[i]);
  }
  Points p{1, facility_x, client_x};
  return FLInstance(std::move(costs), std::move(dist), std::move(p));
}

// Facilities at 0 and 10 with cost 1, clients at 0, 1, 10. opt = 3.
inline FLInstance e2() { return line_instance({0.0, 10.0}, {1.0, 1.0}, {0.0, 1.0, 10.0}); }

inline FLInstance single_pair(double f, double d) {
  return FLInstance({f}, DenseMatrix(1, 1, std::vector<double>{d}));
}

inline CenterInstance line_points(const std::vector<double>& xs) {
  return CenterInstance::from_points(xs, 1);
}

// Random Euclidean instance with sizes drawn from [lo, hi] per side.
inline FLInstance random_instance(std::uint64_t seed, std::size_t nf_lo, std::size_t nf_hi,
                                  std::size_t nc_lo, std::size_t nc_hi) {
  const std::uint64_t s = derive_seed(seed, {tag_of("test-sizes")});
  const std::size_t nf = nf_lo + splitmix64(s) % (nf_hi - nf_lo + 1);
  const std::size_t nc = nc_lo + splitmix64(s + 1) % (nc_hi - nc_lo + 1);
  return gen_euclidean(nf, nc, 2, 0.2, 2.0, seed);
}

}  // namespace facloc::test
