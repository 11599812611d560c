#include "facloc/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "facloc/errors.hpp"

namespace facloc {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

std::string line_of(std::string_view text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n');
  return "line " + std::to_string(line);
}

json parse_json(std::string_view text, const std::string& where) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(where + ":" + line_of(text, e.byte), "malformed JSON");
  }
}

const json& field(const json& obj, const char* name, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where, "expected an object");
  const auto it = obj.find(name);
  if (it == obj.end()) throw ParseError(where + ":" + name, "missing field");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where, "expected a number");
  return v.get<double>();
}

std::uint64_t count(const json& v, const std::string& where) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ParseError(where, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<double> numbers(const json& v, const std::string& where, std::optional<std::size_t> size = {}) {
  if (!v.is_array()) throw ParseError(where, "expected an array");
  if (size && v.size() != *size) {
    throw ParseError(where, "expected " + std::to_string(*size) + " entries, got " + std::to_string(v.size()));
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<Index> indices(const json& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where, "expected an array");
  std::vector<Index> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(static_cast<Index>(count(v[k], where + "[" + std::to_string(k) + "]")));
  return out;
}

DenseMatrix matrix(const json& v, std::size_t rows, std::size_t cols, const std::string& where) {
  if (!v.is_array()) throw ParseError(where, "expected an array of rows");
  if (v.size() != rows) {
    throw ParseError(where, "expected " + std::to_string(rows) + " rows, got " + std::to_string(v.size()));
  }
  DenseMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = numbers(v[r], where + "[" + std::to_string(r) + "]", cols);
    std::copy(row.begin(), row.end(), m.row(r).begin());
  }
  return m;
}

json rows_of(const DenseMatrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    out.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return out;
}

json point_rows(const std::vector<double>& flat, std::size_t dim) {
  json out = json::array();
  for (std::size_t k = 0; k + dim <= flat.size(); k += dim) {
    out.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(k),
                                      flat.begin() + static_cast<std::ptrdiff_t>(k + dim)));
  }
  return out;
}

std::vector<double> flat_points(const json& v, std::size_t n, std::size_t dim, const std::string& where) {
  const DenseMatrix m = matrix(v, n, dim, where);
  const auto vals = m.values();
  return {vals.begin(), vals.end()};
}

void check_version(const json& doc, const std::string& where) {
  const auto v = count(field(doc, "version", where), where + ":version");
  if (v != kFormatVersion) throw ParseError(where + ":version", "unsupported version " + std::to_string(v));
}

// Construction-time validation failures keep their type; anything else from
// the library surfaces as a parse error on the file.
template <class Build>
auto build(const std::string& where, Build b) {
  try {
    return b();
  } catch (const ValidationError&) {
    throw;
  } catch (const ParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ParseError(where, e.what());
  }
}

FLInstance instance_from(const json& doc, const std::string& where) {
  check_version(doc, where);
  const auto nf = count(field(doc, "n_f", where), where + ":n_f");
  const auto nc = count(field(doc, "n_c", where), where + ":n_c");
  auto costs = numbers(field(doc, "facility_costs", where), where + ":facility_costs", nf);
  DenseMatrix dist = matrix(field(doc, "dist", where), nc, nf, where + ":dist");
  std::optional<Points> points;
  if (doc.contains("points") && !doc["points"].is_null()) {
    const json& p = doc["points"];
    const std::string pw = where + ":points";
    Points pts;
    pts.dim = count(field(p, "dim", pw), pw + ":dim");
    pts.facilities = flat_points(field(p, "facilities", pw), nf, pts.dim, pw + ":facilities");
    pts.clients = flat_points(field(p, "clients", pw), nc, pts.dim, pw + ":clients");
    points = std::move(pts);
  }
  return build(where, [&] { return FLInstance(std::move(costs), std::move(dist), std::move(points)); });
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("cannot write " + path);
}

std::string dump_instance(const FLInstance& inst) {
  json doc;
  doc["version"] = kFormatVersion;
  doc["n_f"] = inst.num_facilities();
  doc["n_c"] = inst.num_clients();
  doc["facility_costs"] = std::vector<double>(inst.facility_costs().begin(), inst.facility_costs().end());
  doc["dist"] = rows_of(inst.dist_matrix());
  if (const auto& p = inst.points()) {
    doc["points"] = {{"dim", p->dim},
                     {"facilities", point_rows(p->facilities, p->dim)},
                     {"clients", point_rows(p->clients, p->dim)}};
  }
  return doc.dump(1) + "\n";
}

FLInstance parse_instance(std::string_view text, const std::string& where) {
  return instance_from(parse_json(text, where), where);
}

FLInstance load_instance(const std::string& path) { return parse_instance(read_file(path), path); }

void save_instance(const FLInstance& inst, const std::string& path) { write_file(path, dump_instance(inst)); }

std::string dump_center_instance(const CenterInstance& cinst) {
  json doc;
  doc["version"] = kFormatVersion;
  doc["kind"] = "center";
  doc["n"] = cinst.size();
  doc["dist"] = rows_of(cinst.dist_matrix());
  return doc.dump(1) + "\n";
}

CenterInstance parse_center_instance(std::string_view text, const std::string& where) {
  const json doc = parse_json(text, where);
  if (doc.is_object() && doc.value("kind", std::string{}) == "center") {
    check_version(doc, where);
    const auto n = count(field(doc, "n", where), where + ":n");
    DenseMatrix dist = matrix(field(doc, "dist", where), n, n, where + ":dist");
    return build(where, [&] { return CenterInstance(std::move(dist)); });
  }
  const FLInstance inst = instance_from(doc, where);
  if (!inst.points()) throw ParseError(where + ":points", "center problems need a center file or client coordinates");
  return CenterInstance::from_points(inst.points()->clients, inst.points()->dim);
}

CenterInstance load_center_instance(const std::string& path) {
  return parse_center_instance(read_file(path), path);
}

void save_center_instance(const CenterInstance& cinst, const std::string& path) {
  write_file(path, dump_center_instance(cinst));
}

std::string dump_lp(const LpSolution& lp) {
  json doc;
  doc["version"] = kFormatVersion;
  doc["x"] = rows_of(lp.x);
  doc["y"] = lp.y;
  doc["theta"] = lp.theta;
  return doc.dump(1) + "\n";
}

LpSolution parse_lp(std::string_view text, const FLInstance& inst, const std::string& where) {
  const json doc = parse_json(text, where);
  check_version(doc, where);
  DenseMatrix x = matrix(field(doc, "x", where), inst.num_facilities(), inst.num_clients(), where + ":x");
  auto y = numbers(field(doc, "y", where), where + ":y", inst.num_facilities());
  std::optional<double> theta;
  if (doc.contains("theta")) theta = number(doc["theta"], where + ":theta");
  return make_lp(inst, std::move(x), std::move(y), theta);
}

LpSolution load_lp(const std::string& path, const FLInstance& inst) {
  return parse_lp(read_file(path), inst, path);
}

void save_lp(const LpSolution& lp, const std::string& path) { write_file(path, dump_lp(lp)); }

std::string dump_solution(const SolutionFile& file) {
  const Solution& s = file.solution;
  json doc;
  doc["version"] = kFormatVersion;
  doc["algo"] = file.algo;
  doc["eps"] = file.eps;
  doc["seed"] = file.seed;
  if (file.k) doc["k"] = *file.k;
  doc["open"] = s.open;
  doc["assign"] = s.assign;
  doc["facility_cost"] = s.facility_cost;
  doc["connection_cost"] = s.connection_cost;
  doc["total"] = s.total;
  doc["counters"] = {{"rounds", s.rounds},
                     {"subselection_rounds", s.subselection_rounds},
                     {"primitive_calls", s.primitive_calls}};
  if (!file.alpha.empty()) doc["certificate"] = {{"alpha", file.alpha}};
  return doc.dump(1) + "\n";
}

SolutionFile parse_solution(std::string_view text, const std::string& where) {
  const json doc = parse_json(text, where);
  check_version(doc, where);
  SolutionFile f;
  const json& algo = field(doc, "algo", where);
  if (!algo.is_string()) throw ParseError(where + ":algo", "expected a string");
  f.algo = algo.get<std::string>();
  f.eps = number(field(doc, "eps", where), where + ":eps");
  f.seed = count(field(doc, "seed", where), where + ":seed");
  if (doc.contains("k")) f.k = count(doc["k"], where + ":k");
  Solution& s = f.solution;
  s.open = indices(field(doc, "open", where), where + ":open");
  s.assign = indices(field(doc, "assign", where), where + ":assign");
  s.facility_cost = number(field(doc, "facility_cost", where), where + ":facility_cost");
  s.connection_cost = number(field(doc, "connection_cost", where), where + ":connection_cost");
  s.total = number(field(doc, "total", where), where + ":total");
  const json& c = field(doc, "counters", where);
  s.rounds = count(field(c, "rounds", where + ":counters"), where + ":counters:rounds");
  s.subselection_rounds =
      count(field(c, "subselection_rounds", where + ":counters"), where + ":counters:subselection_rounds");
  s.primitive_calls =
      count(field(c, "primitive_calls", where + ":counters"), where + ":counters:primitive_calls");
  if (doc.contains("certificate")) {
    f.alpha = numbers(field(doc["certificate"], "alpha", where + ":certificate"), where + ":certificate:alpha");
  }
  return f;
}

SolutionFile load_solution(const std::string& path) { return parse_solution(read_file(path), path); }

void save_solution(const SolutionFile& file, const std::string& path) {
  write_file(path, dump_solution(file));
}

}  // namespace facloc
