#include "inrb/tensor.hpp"

#include <algorithm>
#include <tuple>

namespace inrb {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         const std::vector<std::tuple<int, int, double>>& trip) {
  SparseMatrix m;
  m.rows = rows;
  m.cols = cols;
  std::vector<std::size_t> counts(rows + 1, 0);
  for (const auto& [r, c, v] : trip) {
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw std::runtime_error("sparse: triplet out of range");
    counts[r + 1]++;
  }
  m.row_ptr.assign(rows + 1, 0);
  for (int r = 0; r < rows; ++r) m.row_ptr[r + 1] = m.row_ptr[r] + counts[r + 1];
  m.col.resize(trip.size());
  m.val.resize(trip.size());
  std::vector<std::size_t> cursor(m.row_ptr.begin(), m.row_ptr.end() - 1);
  for (const auto& [r, c, v] : trip) {
    m.col[cursor[r]] = c;
    m.val[cursor[r]] = v;
    cursor[r]++;
  }
  // merge duplicates within each row for deterministic accumulation
  for (int r = 0; r < rows; ++r) {
    std::size_t b = m.row_ptr[r], e = m.row_ptr[r + 1];
    std::vector<std::pair<int, double>> entries;
    entries.reserve(e - b);
    for (std::size_t i = b; i < e; ++i) entries.emplace_back(m.col[i], m.val[i]);
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    std::size_t w = b;
    for (std::size_t i = 0; i < entries.size();) {
      int c = entries[i].first;
      double s = 0.0;
      while (i < entries.size() && entries[i].first == c) s += entries[i++].second;
      m.col[w] = c;
      m.val[w] = s;
      ++w;
    }
    // compact happens lazily: zero out any leftover slots
    for (std::size_t i = w; i < e; ++i) {
      m.col[i] = m.col[w - 1];
      m.val[i] = 0.0;
    }
  }
  return m;
}

void SparseMatrix::apply(const Tensor& x, Tensor& y) const {
  int c = x.cols();
  if (x.rows() != cols) throw std::runtime_error("sparse apply: dimension mismatch");
  if (y.rows() != rows || y.cols() != c) y = Tensor({rows, c});
  std::fill(y.vec().begin(), y.vec().end(), 0.0);
  for (int r = 0; r < rows; ++r) {
    for (std::size_t i = row_ptr[r]; i < row_ptr[r + 1]; ++i) {
      double v = val[i];
      int src = col[i];
      for (int k = 0; k < c; ++k) y.at(r, k) += v * x.at(src, k);
    }
  }
}

void SparseMatrix::apply_transpose(const Tensor& x, Tensor& y) const {
  int c = x.cols();
  if (x.rows() != rows) throw std::runtime_error("sparse apply_transpose: dimension mismatch");
  if (y.rows() != cols || y.cols() != c) y = Tensor({cols, c});
  std::fill(y.vec().begin(), y.vec().end(), 0.0);
  for (int r = 0; r < rows; ++r) {
    for (std::size_t i = row_ptr[r]; i < row_ptr[r + 1]; ++i) {
      double v = val[i];
      int dst = col[i];
      for (int k = 0; k < c; ++k) y.at(dst, k) += v * x.at(r, k);
    }
  }
}

}  // namespace inrb
