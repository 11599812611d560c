#pragma once

// Data-parallel matrix primitives: parallel loops, row/column reductions,
// prefix sums, row sorting with rank index and counter-based random labels.
//
// Every primitive is a pure function of its inputs. Floating-point
// reductions are evaluated over a fixed association tree whose shape depends
// only on the input length, so results are bit-identical for any worker
// count. Each public call bumps Executor::calls() exactly once.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace facloc {

enum class ReduceOp { kSum, kMin, kMax };
enum class ScanKind { kExclusive, kInclusive };

class Executor {
 public:
  explicit Executor(int workers = 1);

  int workers() const { return workers_; }
  std::uint64_t calls() const { return calls_; }
  void count_call() { ++calls_; }

  // Parallel loop over [0, n); counts as one primitive call.
  template <class Body>
  void parallel_for(std::size_t n, Body&& body) {
    count_call();
    run(n, body);
  }

  // Uncounted loop used by the primitives themselves.
  template <class Body>
  void run(std::size_t n, Body&& body) const {
    const auto count = static_cast<std::int64_t>(n);
    const int threads = workers_;
#pragma omp parallel for num_threads(threads) schedule(static) if (threads > 1 && count > 1)
    for (std::int64_t k = 0; k < count; ++k) body(static_cast<std::size_t>(k));
  }

 private:
  int workers_;
  std::uint64_t calls_ = 0;
};

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> values() const { return values_; }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Dense 0/1 matrix. One byte per entry so concurrent row writes never race.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool operator()(std::size_t r, std::size_t c) const { return bits_[r * cols_ + c] != 0; }
  void set(std::size_t r, std::size_t c, bool v) { bits_[r * cols_ + c] = v ? 1 : 0; }

  bool operator==(const BitMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Per-row permutation produced by sort_rows. order(r, k) is the original
// column of the k-th smallest entry of row r; rank(r, c) is its inverse.
class RankIndex {
 public:
  RankIndex() = default;
  RankIndex(std::size_t rows, std::size_t cols, std::vector<std::uint32_t> order,
            std::vector<std::uint32_t> rank)
      : rows_(rows), cols_(cols), order_(std::move(order)), rank_(std::move(rank)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint32_t order(std::size_t r, std::size_t k) const { return order_[r * cols_ + k]; }
  std::uint32_t rank(std::size_t r, std::size_t c) const { return rank_[r * cols_ + c]; }
  std::span<const std::uint32_t> order_row(std::size_t r) const {
    return {order_.data() + r * cols_, cols_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> rank_;
};

struct SortedRows {
  DenseMatrix values;
  RankIndex index;
};

// Random label with a strict total order: equal draws fall back to the node
// index.
struct Label {
  std::uint64_t value = std::numeric_limits<std::uint64_t>::max();
  std::uint32_t node = std::numeric_limits<std::uint32_t>::max();

  auto operator<=>(const Label&) const = default;

  static constexpr Label infinity() { return {}; }
};

namespace detail {

inline constexpr std::size_t kLeaf = 8;
inline constexpr std::size_t kChunk = 4096;

template <class T, class Get, class Op>
T tree_fold(std::size_t lo, std::size_t hi, const Get& get, const Op& op, const T& identity) {
  if (hi - lo <= kLeaf) {
    T acc = identity;
    for (std::size_t i = lo; i < hi; ++i) acc = op(acc, get(i));
    return acc;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return op(tree_fold(lo, mid, get, op, identity), tree_fold(mid, hi, get, op, identity));
}

double identity_of(ReduceOp op);
double apply(ReduceOp op, double a, double b);

}  // namespace detail

// Fixed-shape reduction of get(0..n-1).
template <class T, class Get, class Op>
T reduce_by(Executor& ex, std::size_t n, Get get, T identity, Op op) {
  ex.count_call();
  if (n <= detail::kChunk) return detail::tree_fold(0, n, get, op, identity);
  const std::size_t chunks = (n + detail::kChunk - 1) / detail::kChunk;
  std::vector<T> partial(chunks, identity);
  ex.run(chunks, [&](std::size_t c) {
    const std::size_t lo = c * detail::kChunk;
    const std::size_t hi = std::min(n, lo + detail::kChunk);
    partial[c] = detail::tree_fold(lo, hi, get, op, identity);
  });
  return detail::tree_fold(
      0, chunks, [&](std::size_t c) { return partial[c]; }, op, identity);
}

// out[r] = fold over c of get(r, c).
template <class T, class Get, class Op>
std::vector<T> reduce_rows_by(Executor& ex, std::size_t rows, std::size_t cols, Get get,
                              T identity, Op op) {
  ex.count_call();
  std::vector<T> out(rows, identity);
  ex.run(rows, [&](std::size_t r) {
    out[r] = detail::tree_fold(
        0, cols, [&](std::size_t c) { return get(r, c); }, op, identity);
  });
  return out;
}

// out[c] = fold over r of get(r, c).
template <class T, class Get, class Op>
std::vector<T> reduce_cols_by(Executor& ex, std::size_t rows, std::size_t cols, Get get,
                              T identity, Op op) {
  ex.count_call();
  std::vector<T> out(cols, identity);
  ex.run(cols, [&](std::size_t c) {
    out[c] = detail::tree_fold(
        0, rows, [&](std::size_t r) { return get(r, c); }, op, identity);
  });
  return out;
}

std::vector<double> reduce_rows(Executor& ex, const DenseMatrix& m, ReduceOp op);
std::vector<double> reduce_cols(Executor& ex, const DenseMatrix& m, ReduceOp op);
double reduce(Executor& ex, std::span<const double> v, ReduceOp op);

std::vector<double> prefix_sum(Executor& ex, std::span<const double> v, ReduceOp op,
                               ScanKind kind = ScanKind::kExclusive);
DenseMatrix prefix_sum_rows(Executor& ex, const DenseMatrix& m, ReduceOp op,
                            ScanKind kind = ScanKind::kExclusive);

DenseMatrix transpose(Executor& ex, const DenseMatrix& m);

// Stable per-row ascending sort.
SortedRows sort_rows(Executor& ex, const DenseMatrix& m);

// n labels drawn from {1, ..., 2n^4} by a counter-based generator keyed on
// (seed, round_tag). Label i carries node index i.
std::vector<Label> random_labels(Executor& ex, std::size_t n, std::uint64_t seed,
                                 std::uint64_t round_tag);

}  // namespace facloc
