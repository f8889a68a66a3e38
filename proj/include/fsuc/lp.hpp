#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace fsuc::lp {

enum class VarStatus : std::int8_t { Basic = 0, AtLower = 1, AtUpper = 2 };
enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

const char* to_string(LpStatus s);

// A column-major constraint matrix with row activity bounds:
//   min c'x  s.t.  row_lo <= A x <= row_hi,  col_lo <= x <= col_hi.
// Infinite bounds are written as +/-infinity.
struct LpData {
  int num_cols = 0;
  int num_rows = 0;
  std::vector<double> cost;
  std::vector<double> col_lo, col_hi;
  std::vector<double> row_lo, row_hi;
  std::vector<int> col_start;  // size num_cols + 1
  std::vector<int> row_index;
  std::vector<double> value;
};

struct SparseRow {
  std::vector<int> index;
  std::vector<double> value;
};

struct LpOptions {
  double primal_tol = 1e-7;
  double dual_tol = 1e-7;
  double pivot_tol = 1e-9;
  int refactor_interval = 100;
  bool steepest_edge = true;
  bool parallel_pricing = false;
};

// Bounded dual simplex on [A, -I] with every variable boxed. Infinite column
// bounds are replaced by a wide artificial box; a solution resting on it is
// reported as unbounded. The solver keeps its basis between calls, so bound
// changes and appended rows warm-start from the last optimum.
class DualSimplex {
 public:
  explicit DualSimplex(const LpData& data, LpOptions options = {});
  ~DualSimplex();
  DualSimplex(const DualSimplex&) = delete;
  DualSimplex& operator=(const DualSimplex&) = delete;

  [[nodiscard]] int num_cols() const;
  [[nodiscard]] int num_rows() const;

  // Appends rows lo <= a'x <= hi; their logicals enter the basis.
  void add_rows(std::span<const SparseRow> rows, std::span<const double> lo, std::span<const double> hi);

  void set_col_bounds(int col, double lo, double hi);
  [[nodiscard]] double col_lower(int col) const;
  [[nodiscard]] double col_upper(int col) const;

  LpStatus solve(long max_iterations = 1000000);

  [[nodiscard]] double objective() const;
  [[nodiscard]] std::vector<double> primal() const;       // structural values
  [[nodiscard]] std::vector<double> row_activity() const;  // A x
  [[nodiscard]] long iterations() const;

  // Status of structurals then logicals (size num_cols + num_rows).
  [[nodiscard]] std::vector<VarStatus> basis() const;
  // Accepts a basis of any row count <= num_rows: missing logicals are basic.
  // An inconsistent basis falls back to the all-logical basis.
  void set_basis(std::span<const VarStatus> basis);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

namespace kernels {

// out[j] = rho' a_j for every column j of the CSC matrix with is_basic[j] == 0.
void price_row_serial(std::span<const int> col_start, std::span<const int> row_index,
                      std::span<const double> value, std::span<const double> rho,
                      std::span<const std::int8_t> is_basic, std::span<double> out);
void price_row_omp(std::span<const int> col_start, std::span<const int> row_index, std::span<const double> value,
                   std::span<const double> rho, std::span<const std::int8_t> is_basic, std::span<double> out);

}  // namespace kernels

}  // namespace fsuc::lp
