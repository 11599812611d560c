#include "facloc/primitives.hpp"

#include <cmath>
#include <numeric>

#include "facloc/rng.hpp"

namespace facloc {

Executor::Executor(int workers) : workers_(workers) {
  if (workers < 1) throw std::invalid_argument("executor needs at least one worker");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw std::invalid_argument("matrix value count does not match rows*cols");
  }
}

namespace detail {

double identity_of(ReduceOp op) {
  switch (op) {
    case ReduceOp::kSum:
      return 0.0;
    case ReduceOp::kMin:
      return std::numeric_limits<double>::infinity();
    case ReduceOp::kMax:
      return -std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

double apply(ReduceOp op, double a, double b) {
  switch (op) {
    case ReduceOp::kSum:
      return a + b;
    case ReduceOp::kMin:
      return std::min(a, b);
    case ReduceOp::kMax:
      return std::max(a, b);
  }
  return a;
}

}  // namespace detail

namespace {

void require_nonempty(const DenseMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw std::invalid_argument("empty matrix");
}

// Blocked scan over a strided sequence. Block boundaries are fixed at kChunk,
// independent of the worker count.
template <class Get, class Put>
void scan_sequence(std::size_t n, ReduceOp op, ScanKind kind, const Get& get, const Put& put) {
  const double id = detail::identity_of(op);
  double acc = id;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = get(i);
    if (kind == ScanKind::kExclusive) {
      put(i, acc);
      acc = detail::apply(op, acc, x);
    } else {
      acc = detail::apply(op, acc, x);
      put(i, acc);
    }
  }
}

}  // namespace

std::vector<double> reduce_rows(Executor& ex, const DenseMatrix& m, ReduceOp op) {
  require_nonempty(m);
  return reduce_rows_by(
      ex, m.rows(), m.cols(), [&](std::size_t r, std::size_t c) { return m(r, c); },
      detail::identity_of(op), [op](double a, double b) { return detail::apply(op, a, b); });
}

std::vector<double> reduce_cols(Executor& ex, const DenseMatrix& m, ReduceOp op) {
  require_nonempty(m);
  return reduce_cols_by(
      ex, m.rows(), m.cols(), [&](std::size_t r, std::size_t c) { return m(r, c); },
      detail::identity_of(op), [op](double a, double b) { return detail::apply(op, a, b); });
}

double reduce(Executor& ex, std::span<const double> v, ReduceOp op) {
  if (v.empty()) throw std::invalid_argument("empty vector");
  return reduce_by(
      ex, v.size(), [&](std::size_t i) { return v[i]; }, detail::identity_of(op),
      [op](double a, double b) { return detail::apply(op, a, b); });
}

std::vector<double> prefix_sum(Executor& ex, std::span<const double> v, ReduceOp op,
                               ScanKind kind) {
  ex.count_call();
  const std::size_t n = v.size();
  std::vector<double> out(n);
  if (n == 0) return out;
  const std::size_t chunks = (n + detail::kChunk - 1) / detail::kChunk;
  // Pass 1: per-block totals.
  std::vector<double> totals(chunks);
  ex.run(chunks, [&](std::size_t c) {
    const std::size_t lo = c * detail::kChunk;
    const std::size_t hi = std::min(n, lo + detail::kChunk);
    double acc = detail::identity_of(op);
    for (std::size_t i = lo; i < hi; ++i) acc = detail::apply(op, acc, v[i]);
    totals[c] = acc;
  });
  // Pass 2: exclusive scan of block totals.
  std::vector<double> offsets(chunks);
  scan_sequence(
      chunks, op, ScanKind::kExclusive, [&](std::size_t c) { return totals[c]; },
      [&](std::size_t c, double x) { offsets[c] = x; });
  // Pass 3: local scans seeded with block offsets.
  ex.run(chunks, [&](std::size_t c) {
    const std::size_t lo = c * detail::kChunk;
    const std::size_t hi = std::min(n, lo + detail::kChunk);
    double acc = offsets[c];
    for (std::size_t i = lo; i < hi; ++i) {
      if (kind == ScanKind::kExclusive) {
        out[i] = acc;
        acc = detail::apply(op, acc, v[i]);
      } else {
        acc = detail::apply(op, acc, v[i]);
        out[i] = acc;
      }
    }
  });
  return out;
}

DenseMatrix prefix_sum_rows(Executor& ex, const DenseMatrix& m, ReduceOp op, ScanKind kind) {
  ex.count_call();
  DenseMatrix out(m.rows(), m.cols());
  ex.run(m.rows(), [&](std::size_t r) {
    auto src = m.row(r);
    auto dst = out.row(r);
    scan_sequence(
        src.size(), op, kind, [&](std::size_t i) { return src[i]; },
        [&](std::size_t i, double x) { dst[i] = x; });
  });
  return out;
}

DenseMatrix transpose(Executor& ex, const DenseMatrix& m) {
  ex.count_call();
  DenseMatrix out(m.cols(), m.rows());
  ex.run(m.cols(), [&](std::size_t c) {
    for (std::size_t r = 0; r < m.rows(); ++r) out(c, r) = m(r, c);
  });
  return out;
}

SortedRows sort_rows(Executor& ex, const DenseMatrix& m) {
  ex.count_call();
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  DenseMatrix values(rows, cols);
  std::vector<std::uint32_t> order(rows * cols);
  std::vector<std::uint32_t> rank(rows * cols);
  ex.run(rows, [&](std::size_t r) {
    auto row = m.row(r);
    std::uint32_t* ord = order.data() + r * cols;
    std::iota(ord, ord + cols, 0u);
    std::stable_sort(ord, ord + cols,
                     [&](std::uint32_t a, std::uint32_t b) { return row[a] < row[b]; });
    for (std::size_t k = 0; k < cols; ++k) {
      values(r, k) = row[ord[k]];
      rank[r * cols + ord[k]] = static_cast<std::uint32_t>(k);
    }
  });
  return {std::move(values), RankIndex(rows, cols, std::move(order), std::move(rank))};
}

std::vector<Label> random_labels(Executor& ex, std::size_t n, std::uint64_t seed,
                                 std::uint64_t round_tag) {
  ex.count_call();
  // Label range {1, ..., 2n^4}, saturated at 2^64 - 1.
  const unsigned __int128 nn = n;
  unsigned __int128 range = 2 * nn * nn * nn * nn;
  const auto max64 = static_cast<unsigned __int128>(std::numeric_limits<std::uint64_t>::max());
  if (range > max64 || range == 0) range = max64;
  const auto span = static_cast<std::uint64_t>(range);
  const std::uint64_t key = derive_seed(seed, {round_tag});
  std::vector<Label> labels(n);
  ex.run(n, [&](std::size_t i) {
    const std::uint64_t bits = splitmix64(key ^ splitmix64(i));
    labels[i] = Label{1 + bits % span, static_cast<std::uint32_t>(i)};
  });
  return labels;
}

}  // namespace facloc
