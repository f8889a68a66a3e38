#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsuc/lp.hpp"

namespace fsuc::mip {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ProblemError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
// The LP engine failed on a node even after restarting from a fresh basis.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Variable {
  std::string name;
  double lo = 0.0;
  double hi = kInf;
  bool integer = false;
  double cost = 0.0;
  int priority = 0;  // higher is branched and rounded first
};

struct Row {
  std::string name;
  std::vector<int> index;
  std::vector<double> value;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

// x * y >= z * z with x, y >= 0, on three declared variables.
struct ConeRow {
  std::string name;
  int x = -1, y = -1, z = -1;
};

// Minimisation problem built incrementally.
class MipProblem {
 public:
  int add_variable(std::string name, double lo, double hi, bool integer = false, double cost = 0.0);
  int add_row(std::string name, std::vector<int> index, std::vector<double> value, Sense sense, double rhs);
  int add_cone(std::string name, int x, int y, int z);
  void set_cost(int var, double cost) { vars_.at(var).cost = cost; }
  void set_bounds(int var, double lo, double hi);
  void set_priority(int var, int priority) { vars_.at(var).priority = priority; }
  void set_objective_offset(double c) { offset_ = c; }

  [[nodiscard]] const std::vector<Variable>& variables() const { return vars_; }
  [[nodiscard]] const std::vector<Row>& rows() const { return rows_; }
  [[nodiscard]] const std::vector<ConeRow>& cones() const { return cones_; }
  [[nodiscard]] double objective_offset() const { return offset_; }
  [[nodiscard]] int num_integer() const;

  // Throws ProblemError on dangling indices, lo > hi or NaN data.
  void validate() const;

  [[nodiscard]] double objective(const std::vector<double>& x) const;
  // Largest violation of bounds, rows, integrality and cones (the cone
  // measure is relative to max(1, x + y)).
  [[nodiscard]] double max_violation(const std::vector<double>& x) const;

  [[nodiscard]] lp::LpData to_lp() const;

 private:
  std::vector<Variable> vars_;
  std::vector<Row> rows_;
  std::vector<ConeRow> cones_;
  double offset_ = 0.0;
};

enum class Status { Optimal, FeasibleGap, Infeasible, Unbounded, Limit };
const char* to_string(Status s);

struct SolveOptions {
  double gap_tol = 1e-3;
  double feas_tol = 1e-6;
  double int_tol = 1e-6;
  double time_limit = kInf;  // s
  long node_limit = 100000;
  int cuts_per_node = 200;
  bool diving = true;
  bool verbose = false;
  lp::LpOptions lp;
  // Optional starting basis for the root relaxation (size cols + rows).
  std::vector<lp::VarStatus> warm_basis;
};

struct SolveStats {
  long nodes = 0;
  long cuts = 0;
  long lp_iterations = 0;
  double wall_time = 0.0;
  std::vector<double> incumbent_history;
};

// A supporting hyperplane a_x x + a_y y + a_z z <= 0 of the cone.
struct ConeCut {
  int cone = 0;
  double ax = 0.0, ay = 0.0, az = 0.0;
};

struct Solution {
  Status status = Status::Limit;
  double objective = kInf;
  double bound = -kInf;
  double mip_gap = kInf;
  std::vector<double> values;
  SolveStats stats;
  std::vector<ConeCut> cuts;
  std::vector<lp::VarStatus> root_basis;  // pre-cut root relaxation basis
};

// Supporting cut at (x, y, z); empty cone index when the point is the apex.
ConeCut cone_cut(int cone, double x, double y, double z);
double cone_violation(double x, double y, double z);

Solution solve(const MipProblem& p, const SolveOptions& opts = {});

// Fixed-format MPS of the linear part; cones become comment lines.
std::string export_mps(const MipProblem& p);
// One `cone name x_col y_col z_col` line per cone row.
std::string export_cone_sidecar(const MipProblem& p);

}  // namespace fsuc::mip
