#pragma once

// JSON file formats for instances, center instances, LP solutions and solver
// output. Doubles are written in shortest round-trip form, so save/load is
// lossless.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "facloc/centers.hpp"
#include "facloc/instance.hpp"
#include "facloc/lp_rounding.hpp"

namespace facloc {

std::string dump_instance(const FLInstance& inst);
FLInstance parse_instance(std::string_view text, const std::string& where = "<string>");
FLInstance load_instance(const std::string& path);
void save_instance(const FLInstance& inst, const std::string& path);

// A center file has "kind": "center" and an n x n "dist". An instance file
// with coordinates is also accepted; its clients become the points.
std::string dump_center_instance(const CenterInstance& cinst);
CenterInstance parse_center_instance(std::string_view text, const std::string& where = "<string>");
CenterInstance load_center_instance(const std::string& path);
void save_center_instance(const CenterInstance& cinst, const std::string& path);

// x is written facility-major, one row per facility.
std::string dump_lp(const LpSolution& lp);
LpSolution parse_lp(std::string_view text, const FLInstance& inst, const std::string& where = "<string>");
LpSolution load_lp(const std::string& path, const FLInstance& inst);
void save_lp(const LpSolution& lp, const std::string& path);

// Solver output. For the center objectives, open holds the centers, assign
// the nearest center, facility_cost is 0 and connection_cost = total is the
// objective value.
struct SolutionFile {
  std::string algo;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> k;
  Solution solution;
  std::vector<double> alpha;  // dual certificate, empty when the algorithm has none

  bool operator==(const SolutionFile&) const = default;
};

std::string dump_solution(const SolutionFile& file);
SolutionFile parse_solution(std::string_view text, const std::string& where = "<string>");
SolutionFile load_solution(const std::string& path);
void save_solution(const SolutionFile& file, const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace facloc
