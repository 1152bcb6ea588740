#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

namespace moralnet {

using Index = std::uint32_t;

struct Triplet {
  Index row;
  Index col;
  double value;
};

// Compressed sparse row matrix. Column indices within a row are sorted and
// unique; explicit zeros are not stored.
class CsrMatrix {
 public:
  CsrMatrix() : row_ptr_(1, 0) {}
  CsrMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  // Duplicate (row, col) entries are summed.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries) {
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    CsrMatrix m(rows, cols);
    for (std::size_t i = 0; i < entries.size();) {
      const Index r = entries[i].row, c = entries[i].col;
      assert(r < rows && c < cols);
      double sum = 0;
      for (; i < entries.size() && entries[i].row == r && entries[i].col == c; ++i) sum += entries[i].value;
      if (sum == 0) continue;
      m.cols_idx_.push_back(c);
      m.values_.push_back(sum);
      ++m.row_ptr_[r + 1];
    }
    for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const Index> row_indices(std::size_t r) const {
    return {cols_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::size_t row_size(std::size_t r) const { return row_ptr_[r + 1] - row_ptr_[r]; }

  double at(std::size_t r, std::size_t c) const {
    auto idx = row_indices(r);
    auto it = std::lower_bound(idx.begin(), idx.end(), static_cast<Index>(c));
    if (it == idx.end() || *it != c) return 0.0;
    return values_[row_ptr_[r] + static_cast<std::size_t>(it - idx.begin())];
  }

  double row_sum(std::size_t r) const {
    double s = 0;
    for (double v : row_values(r)) s += v;
    return s;
  }

  // y = A x
  void multiply(std::span<const double> x, std::span<double> y) const {
    assert(x.size() == cols_ && y.size() == rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      double acc = 0;
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += values_[k] * x[cols_idx_[k]];
      y[r] = acc;
    }
  }

  std::vector<Triplet> triplets() const {
    std::vector<Triplet> out;
    out.reserve(nonzeros());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        out.push_back({static_cast<Index>(r), cols_idx_[k], values_[k]});
    return out;
  }

  CsrMatrix transpose() const {
    auto t = triplets();
    for (auto& e : t) std::swap(e.row, e.col);
    return from_triplets(cols_, rows_, std::move(t));
  }

  // Same sparsity pattern, values rewritten by f(row, col, value).
  template <typename F>
  CsrMatrix transform(F&& f) const {
    CsrMatrix m = *this;
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        m.values_[k] = f(r, static_cast<std::size_t>(cols_idx_[k]), values_[k]);
    return m;
  }

  bool is_symmetric() const {
    for (std::size_t r = 0; r < rows_; ++r) {
      auto idx = row_indices(r);
      auto val = row_values(r);
      for (std::size_t k = 0; k < idx.size(); ++k)
        if (at(idx[k], r) != val[k]) return false;
    }
    return true;
  }

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<Index> cols_idx_;
  std::vector<double> values_;
};

}  // namespace moralnet
