#pragma once

#include <span>
#include <vector>

namespace fsuc::lp {

// Left-looking sparse LU with partial pivoting: P B Q = L U, L unit lower.
// Columns are taken in a caller-supplied order.
class SparseLu {
 public:
  // B is m x m in CSC form; `order[k]` is the column eliminated at step k.
  // Returns false when a pivot falls below `singular_tol`.
  bool factor(int m, std::span<const int> col_start, std::span<const int> row_index, std::span<const double> value,
              std::span<const int> order, double singular_tol = 1e-11);

  // In place: b <- B^{-1} b.
  void solve(std::span<double> b) const;
  // In place: c <- B^{-T} c.
  void solve_transpose(std::span<double> c) const;

  [[nodiscard]] int size() const { return m_; }
  [[nodiscard]] std::size_t nonzeros() const { return li_.size() + ui_.size() + static_cast<std::size_t>(m_); }

 private:
  int m_ = 0;
  std::vector<int> lstart_, li_;  // L columns by step; row indices in B's row space
  std::vector<double> lx_;
  std::vector<int> ustart_, ui_;  // U columns by step; indices are earlier steps
  std::vector<double> ux_;
  std::vector<double> udiag_;
  std::vector<int> prow_;  // step -> pivot row
  std::vector<int> pinv_;  // row -> step
  std::vector<int> q_;     // step -> column
  mutable std::vector<double> work_;
};

}  // namespace fsuc::lp
