#include "fsuc/mip.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

namespace fsuc::mip {

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::FeasibleGap: return "feasible-gap";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::Limit: return "limit";
  }
  return "?";
}

int MipProblem::add_variable(std::string name, double lo, double hi, bool integer, double cost) {
  vars_.push_back({std::move(name), lo, hi, integer, cost, 0});
  return static_cast<int>(vars_.size()) - 1;
}

int MipProblem::add_row(std::string name, std::vector<int> index, std::vector<double> value, Sense sense,
                        double rhs) {
  if (index.size() != value.size()) throw ProblemError("row " + name + ": index/value size mismatch");
  rows_.push_back({std::move(name), std::move(index), std::move(value), sense, rhs});
  return static_cast<int>(rows_.size()) - 1;
}

int MipProblem::add_cone(std::string name, int x, int y, int z) {
  cones_.push_back({std::move(name), x, y, z});
  return static_cast<int>(cones_.size()) - 1;
}

void MipProblem::set_bounds(int var, double lo, double hi) {
  auto& v = vars_.at(var);
  v.lo = lo;
  v.hi = hi;
}

int MipProblem::num_integer() const {
  return static_cast<int>(std::count_if(vars_.begin(), vars_.end(), [](const Variable& v) { return v.integer; }));
}

void MipProblem::validate() const {
  const int n = static_cast<int>(vars_.size());
  for (const auto& v : vars_) {
    if (std::isnan(v.lo) || std::isnan(v.hi) || std::isnan(v.cost) || !std::isfinite(v.cost))
      throw ProblemError("variable " + v.name + ": NaN or infinite data");
    if (v.lo > v.hi) throw ProblemError("variable " + v.name + ": lower bound exceeds upper bound");
  }
  for (const auto& r : rows_) {
    if (!std::isfinite(r.rhs)) throw ProblemError("row " + r.name + ": rhs must be finite");
    for (std::size_t k = 0; k < r.index.size(); ++k) {
      if (r.index[k] < 0 || r.index[k] >= n) throw ProblemError("row " + r.name + ": undeclared variable");
      if (!std::isfinite(r.value[k])) throw ProblemError("row " + r.name + ": non-finite coefficient");
    }
  }
  for (const auto& c : cones_) {
    for (int j : {c.x, c.y, c.z})
      if (j < 0 || j >= n) throw ProblemError("cone " + c.name + ": undeclared variable");
    if (vars_[c.x].lo < 0.0 || vars_[c.y].lo < 0.0)
      throw ProblemError("cone " + c.name + ": x and y need non-negative lower bounds");
  }
}

double MipProblem::objective(const std::vector<double>& x) const {
  double s = offset_;
  for (std::size_t j = 0; j < vars_.size(); ++j) s += vars_[j].cost * x[j];
  return s;
}

double cone_violation(double x, double y, double z) {
  return (std::hypot(2.0 * z, x - y) - (x + y)) / std::max(1.0, x + y);
}

double MipProblem::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const auto& v = vars_[j];
    worst = std::max({worst, v.lo - x[j], x[j] - v.hi});
    if (v.integer) worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
  }
  for (const auto& r : rows_) {
    double a = 0.0;
    for (std::size_t k = 0; k < r.index.size(); ++k) a += r.value[k] * x[r.index[k]];
    double scale = std::max(1.0, std::abs(r.rhs));
    if (r.sense != Sense::GreaterEqual) worst = std::max(worst, (a - r.rhs) / scale);
    if (r.sense != Sense::LessEqual) worst = std::max(worst, (r.rhs - a) / scale);
  }
  for (const auto& c : cones_) worst = std::max(worst, cone_violation(x[c.x], x[c.y], x[c.z]));
  return worst;
}

lp::LpData MipProblem::to_lp() const {
  lp::LpData d;
  d.num_cols = static_cast<int>(vars_.size());
  d.num_rows = static_cast<int>(rows_.size());
  for (const auto& v : vars_) {
    d.cost.push_back(v.cost);
    d.col_lo.push_back(v.lo);
    d.col_hi.push_back(v.hi);
  }
  std::vector<int> count(d.num_cols + 1, 0);
  for (const auto& r : rows_) {
    switch (r.sense) {
      case Sense::LessEqual: d.row_lo.push_back(-kInf); d.row_hi.push_back(r.rhs); break;
      case Sense::GreaterEqual: d.row_lo.push_back(r.rhs); d.row_hi.push_back(kInf); break;
      case Sense::Equal: d.row_lo.push_back(r.rhs); d.row_hi.push_back(r.rhs); break;
    }
    for (int j : r.index) ++count[j + 1];
  }
  for (int j = 0; j < d.num_cols; ++j) count[j + 1] += count[j];
  d.col_start = count;
  d.row_index.resize(count.back());
  d.value.resize(count.back());
  std::vector<int> fill(count.begin(), count.end() - 1);
  for (int i = 0; i < d.num_rows; ++i) {
    const auto& r = rows_[i];
    for (std::size_t k = 0; k < r.index.size(); ++k) {
      int p = fill[r.index[k]]++;
      d.row_index[p] = i;
      d.value[p] = r.value[k];
    }
  }
  // Merge duplicate entries within a column.
  lp::LpData m = d;
  m.row_index.clear();
  m.value.clear();
  m.col_start.assign(1, 0);
  std::vector<std::pair<int, double>> col;
  for (int j = 0; j < d.num_cols; ++j) {
    col.clear();
    for (int k = d.col_start[j]; k < d.col_start[j + 1]; ++k) col.emplace_back(d.row_index[k], d.value[k]);
    std::sort(col.begin(), col.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < col.size(); ++k) {
      if (!m.row_index.empty() && static_cast<int>(m.row_index.size()) > m.col_start.back() &&
          m.row_index.back() == col[k].first) {
        m.value.back() += col[k].second;
        continue;
      }
      m.row_index.push_back(col[k].first);
      m.value.push_back(col[k].second);
    }
    m.col_start.push_back(static_cast<int>(m.row_index.size()));
  }
  return m;
}

ConeCut cone_cut(int cone, double x, double y, double z) {
  // sqrt(4z^2 + (x-y)^2) <= x + y, linearised at the current point.
  const double norm = std::hypot(2.0 * z, x - y);
  ConeCut c;
  c.cone = cone;
  if (norm <= 0.0) {
    c.ax = -1.0;
    c.ay = -1.0;
    return c;
  }
  c.ax = (x - y) / norm - 1.0;
  c.ay = -(x - y) / norm - 1.0;
  c.az = 4.0 * z / norm;
  return c;
}

namespace {

using Clock = std::chrono::steady_clock;

struct BoundChange {
  int var;
  double lo, hi;
};

struct Node {
  long id = 0;
  int depth = 0;
  double bound = -kInf;
  std::vector<BoundChange> changes;
  std::vector<lp::VarStatus> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id < b.id;
  }
};

enum class NodeLp { Solved, Infeasible, Unbounded };

class BranchAndBound {
 public:
  BranchAndBound(const MipProblem& p, const SolveOptions& o)
      : p_(p), opts_(o), lp_(p.to_lp(), o.lp), start_(Clock::now()) {
    const auto& vars = p.variables();
    for (int j = 0; j < static_cast<int>(vars.size()); ++j) {
      root_lo_.push_back(vars[j].lo);
      root_hi_.push_back(vars[j].hi);
      prio_.push_back(vars[j].priority);
      if (vars[j].integer) {
        ints_.push_back(j);
        // Integer bounds are rounded inward.
        root_lo_[j] = std::isfinite(vars[j].lo) ? std::ceil(vars[j].lo - o.int_tol) : vars[j].lo;
        root_hi_[j] = std::isfinite(vars[j].hi) ? std::floor(vars[j].hi + o.int_tol) : vars[j].hi;
      }
    }
    cur_lo_ = root_lo_;
    cur_hi_ = root_hi_;
    for (int j : ints_)
      if (cur_lo_[j] <= cur_hi_[j]) lp_.set_col_bounds(j, cur_lo_[j], cur_hi_[j]);
  }

  Solution run() {
    Solution sol;
    for (int j : ints_)
      if (root_lo_[j] > root_hi_[j]) {
        sol.status = Status::Infeasible;
        return finish(sol);
      }
    if (!opts_.warm_basis.empty()) lp_.set_basis(opts_.warm_basis);

    Node root;
    root.id = next_id_++;
    auto st = solve_node_lp(true, sol);
    if (st == NodeLp::Unbounded) {
      sol.status = Status::Unbounded;
      return finish(sol);
    }
    if (st == NodeLp::Infeasible) {
      sol.status = Status::Infeasible;
      return finish(sol);
    }
    root.bound = lp_obj();
    if (opts_.diving && fractional() >= 0) dive();
    process(std::move(root));

    bool limited = false;
    bool timed_out = false;
    while (!open_.empty()) {
      if (gap_closed()) break;
      if (stats_.nodes >= opts_.node_limit) {
        limited = true;
        break;
      }
      if (elapsed() > opts_.time_limit) {
        timed_out = true;
        break;
      }
      Node node = std::move(open_.extract(open_.begin()).value());
      if (pruned(node.bound)) continue;
      apply(node);
      lp_.set_basis(node.basis);
      auto s = solve_node_lp(false, sol);
      if (s == NodeLp::Infeasible) {
        log(node, "infeasible");
        continue;
      }
      if (s == NodeLp::Unbounded) throw NumericalError("node relaxation unbounded below a bounded root");
      node.bound = std::max(node.bound, lp_obj());
      process(std::move(node));
    }

    double bound = open_.empty() ? incumbent_obj_ : std::min(incumbent_obj_, open_.begin()->bound);
    if (has_incumbent_) {
      sol.values = incumbent_;
      sol.objective = incumbent_obj_;
      sol.bound = bound;
      sol.mip_gap = rel_gap(incumbent_obj_, bound);
      if (timed_out) sol.status = Status::Limit;
      else if (limited && sol.mip_gap > opts_.gap_tol) sol.status = Status::FeasibleGap;
      else sol.status = Status::Optimal;
    } else {
      sol.bound = bound;
      sol.status = (limited || timed_out) ? Status::Limit : Status::Infeasible;
    }
    return finish(sol);
  }

 private:
  const MipProblem& p_;
  SolveOptions opts_;
  lp::DualSimplex lp_;
  Clock::time_point start_;
  std::vector<int> ints_, prio_;
  std::vector<double> root_lo_, root_hi_, cur_lo_, cur_hi_;
  std::set<Node, NodeOrder> open_;
  long next_id_ = 0;
  bool has_incumbent_ = false;
  double incumbent_obj_ = kInf;
  std::vector<double> incumbent_;
  std::vector<double> x_;
  std::vector<ConeCut> cuts_;
  SolveStats stats_;
  int node_cuts_ = 0;

  [[nodiscard]] double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }
  [[nodiscard]] double lp_obj() const { return lp_.objective() + p_.objective_offset(); }

  static double rel_gap(double inc, double bound) {
    if (!std::isfinite(inc)) return kInf;
    return std::max(0.0, inc - bound) / std::max(1.0, std::abs(inc));
  }

  [[nodiscard]] double cutoff() const {
    if (!has_incumbent_) return kInf;
    double tol = std::max(opts_.gap_tol * std::abs(incumbent_obj_), 1e-9 * std::max(1.0, std::abs(incumbent_obj_)));
    return incumbent_obj_ - tol;
  }
  [[nodiscard]] bool pruned(double bound) const { return bound >= cutoff(); }
  [[nodiscard]] bool gap_closed() const {
    return has_incumbent_ && (open_.empty() || pruned(open_.begin()->bound));
  }

  Solution& finish(Solution& sol) {
    stats_.lp_iterations = lp_.iterations();
    stats_.wall_time = elapsed();
    sol.stats = stats_;
    sol.cuts = cuts_;
    return sol;
  }

  void set_bounds(int j, double lo, double hi) {
    if (cur_lo_[j] == lo && cur_hi_[j] == hi) return;
    cur_lo_[j] = lo;
    cur_hi_[j] = hi;
    lp_.set_col_bounds(j, lo, hi);
  }

  void apply(const Node& node) {
    for (int j : ints_) set_bounds(j, root_lo_[j], root_hi_[j]);
    for (const auto& c : node.changes) set_bounds(c.var, c.lo, c.hi);
  }

  NodeLp lp_solve() {
    auto st = lp_.solve();
    if (st == lp::LpStatus::IterationLimit || st == lp::LpStatus::NumericalFailure) {
      lp_.set_basis({});
      st = lp_.solve();
      if (st == lp::LpStatus::IterationLimit || st == lp::LpStatus::NumericalFailure)
        throw NumericalError(std::string("LP relaxation failed: ") + lp::to_string(st));
    }
    if (st == lp::LpStatus::Infeasible) return NodeLp::Infeasible;
    if (st == lp::LpStatus::Unbounded) return NodeLp::Unbounded;
    x_ = lp_.primal();
    return NodeLp::Solved;
  }

  // Adds cuts for violated cones; returns how many were added.
  int separate() {
    const auto& cones = p_.cones();
    std::vector<lp::SparseRow> rows;
    for (int c = 0; c < static_cast<int>(cones.size()); ++c) {
      const auto& k = cones[c];
      if (cone_violation(x_[k.x], x_[k.y], x_[k.z]) <= opts_.feas_tol) continue;
      auto cut = cone_cut(c, x_[k.x], x_[k.y], x_[k.z]);
      cuts_.push_back(cut);
      lp::SparseRow r;
      for (auto [j, a] : {std::pair{k.x, cut.ax}, std::pair{k.y, cut.ay}, std::pair{k.z, cut.az}}) {
        if (a == 0.0) continue;
        auto it = std::find(r.index.begin(), r.index.end(), j);
        if (it != r.index.end()) r.value[it - r.index.begin()] += a;
        else {
          r.index.push_back(j);
          r.value.push_back(a);
        }
      }
      rows.push_back(std::move(r));
    }
    if (rows.empty()) return 0;
    std::vector<double> lo(rows.size(), -kInf), hi(rows.size(), 0.0);
    lp_.add_rows(rows, lo, hi);
    stats_.cuts += static_cast<long>(rows.size());
    return static_cast<int>(rows.size());
  }

  // LP relaxation with the cut loop. With `unlimited` the loop runs until
  // no cone is violated.
  NodeLp cut_loop(int cap, Solution* root_sol) {
    auto st = lp_solve();
    if (root_sol && root_sol->root_basis.empty()) root_sol->root_basis = lp_.basis();
    int added = 0;
    while (st == NodeLp::Solved && added < cap) {
      if (pruned(lp_obj())) break;
      int k = separate();
      if (k == 0) break;
      added += k;
      st = lp_solve();
    }
    node_cuts_ = added;
    return st;
  }

  NodeLp solve_node_lp(bool root, Solution& sol) {
    return cut_loop(opts_.cuts_per_node, root ? &sol : nullptr);
  }

  [[nodiscard]] bool cones_ok() const {
    for (const auto& k : p_.cones())
      if (cone_violation(x_[k.x], x_[k.y], x_[k.z]) > opts_.feas_tol) return false;
    return true;
  }

  [[nodiscard]] bool is_fractional(int j) const {
    double f = x_[j] - std::floor(x_[j]);
    return f > opts_.int_tol && f < 1.0 - opts_.int_tol;
  }

  // Highest priority among fractional integers, or INT_MIN if integral.
  [[nodiscard]] int top_priority() const {
    int top = std::numeric_limits<int>::min();
    for (int j : ints_)
      if (is_fractional(j)) top = std::max(top, prio_[j]);
    return top;
  }

  // Most fractional integer variable of the top priority, lowest index on
  // ties; -1 if integral.
  [[nodiscard]] int fractional() const {
    const int top = top_priority();
    int best = -1;
    double best_score = opts_.int_tol;
    for (int j : ints_) {
      if (prio_[j] != top) continue;
      double f = x_[j] - std::floor(x_[j]);
      double score = std::min(f, 1.0 - f);
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

  // Fixes the integers at their rounded LP values and re-solves the rest.
  void try_incumbent() {
    std::vector<std::pair<int, std::pair<double, double>>> saved;
    for (int j : ints_) {
      double v = std::round(x_[j]);
      saved.push_back({j, {cur_lo_[j], cur_hi_[j]}});
      set_bounds(j, v, v);
    }
    auto basis = lp_.basis();
    auto st = cut_loop(1 << 20, nullptr);
    if (st == NodeLp::Solved && cones_ok()) {
      auto vals = x_;
      for (int j : ints_) vals[j] = std::round(vals[j]);
      double obj = p_.objective(vals);
      if (obj < incumbent_obj_) {
        incumbent_obj_ = obj;
        incumbent_ = std::move(vals);
        has_incumbent_ = true;
        stats_.incumbent_history.push_back(obj);
      }
    }
    for (auto& [j, b] : saved) set_bounds(j, b.first, b.second);
    lp_.set_basis(basis);
  }

  // Rounds fractional integers of the top priority up until the
  // relaxation is integral.
  void ceil_dive() {
    for (int round = 0; round < 200; ++round) {
      const int top = top_priority();
      bool changed = false;
      for (int j : ints_) {
        if (prio_[j] != top || !is_fractional(j)) continue;
        set_bounds(j, std::min(std::ceil(x_[j]), cur_hi_[j]), cur_hi_[j]);
        changed = true;
      }
      if (!changed) {
        try_incumbent();
        return;
      }
      if (cut_loop(opts_.cuts_per_node, nullptr) != NodeLp::Solved) return;
    }
  }

  // Fixes near-integral values of the top priority at the nearest integer
  // (or the least fractional one when none is near) and re-solves.
  void fix_dive() {
    const std::size_t rounds = 4 * ints_.size() + 10;
    for (std::size_t round = 0; round < rounds; ++round) {
      const int top = top_priority();
      std::vector<int> fix;
      int best = -1;
      double best_score = kInf;
      for (int j : ints_) {
        if (prio_[j] != top || !is_fractional(j)) continue;
        double f = x_[j] - std::floor(x_[j]);
        double score = std::min(f, 1.0 - f);
        if (score <= 0.2) fix.push_back(j);
        else if (score < best_score) {
          best_score = score;
          best = j;
        }
      }
      if (fix.empty() && best < 0) {
        try_incumbent();
        return;
      }
      if (fix.empty()) fix.push_back(best);
      for (int j : fix) {
        double v = std::clamp(std::round(x_[j]), cur_lo_[j], cur_hi_[j]);
        set_bounds(j, v, v);
      }
      if (cut_loop(opts_.cuts_per_node, nullptr) != NodeLp::Solved || pruned(lp_obj())) return;
    }
  }

  void dive() {
    auto lo0 = cur_lo_;
    auto hi0 = cur_hi_;
    auto basis = lp_.basis();
    auto x0 = x_;
    auto restore = [&] {
      for (int j : ints_) set_bounds(j, lo0[j], hi0[j]);
      lp_.set_basis(basis);
      x_ = x0;
    };
    fix_dive();
    restore();
    ceil_dive();
    restore();
  }

  void log(const Node& node, const char* what) const {
    if (!opts_.verbose) return;
    std::clog << "node " << node.id << " depth " << node.depth << " bound " << node.bound << " incumbent "
              << incumbent_obj_ << " cuts " << node_cuts_ << ' ' << what << '\n';
  }

  void process(Node node) {
    ++stats_.nodes;
    int j = fractional();
    // An integral point may still cut through a cone: keep separating.
    while (j < 0 && !cones_ok() && !pruned(node.bound)) {
      if (cut_loop(1 << 20, nullptr) != NodeLp::Solved) {
        log(node, "infeasible");
        return;
      }
      node.bound = std::max(node.bound, lp_obj());
      j = fractional();
    }
    if (pruned(node.bound)) {
      log(node, "pruned");
      return;
    }
    if (j < 0) {
      try_incumbent();
      log(node, "integral");
      return;
    }
    log(node, "branch");
    const double v = x_[j];
    auto basis = lp_.basis();
    Node down{next_id_++, node.depth + 1, node.bound, node.changes, basis};
    down.changes.push_back({j, cur_lo_[j], std::floor(v)});
    Node up{next_id_++, node.depth + 1, node.bound, std::move(node.changes), std::move(basis)};
    up.changes.push_back({j, std::ceil(v), cur_hi_[j]});
    open_.insert(std::move(down));
    open_.insert(std::move(up));
  }
};

std::string mps_col(int j) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "C%07d", j);
  return buf;
}
std::string mps_row(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "R%07d", i);
  return buf;
}
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}
void field_line(std::ostringstream& out, const std::string& a, const std::string& b, const std::string& c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "    %-8s  %-8s  %12s", a.c_str(), b.c_str(), c.c_str());
  out << buf << '\n';
}

}  // namespace

Solution solve(const MipProblem& p, const SolveOptions& opts) {
  p.validate();
  BranchAndBound bb(p, opts);
  return bb.run();
}

std::string export_mps(const MipProblem& p) {
  p.validate();
  std::ostringstream out;
  const auto& vars = p.variables();
  const auto& rows = p.rows();
  out << "NAME          FSUC\n";
  for (const auto& c : p.cones())
    out << "* CONE " << c.name << ' ' << mps_col(c.x) << ' ' << mps_col(c.y) << ' ' << mps_col(c.z) << '\n';
  out << "ROWS\n N  COST\n";
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    const char* s = rows[i].sense == Sense::LessEqual ? "L" : rows[i].sense == Sense::GreaterEqual ? "G" : "E";
    out << ' ' << s << "  " << mps_row(i) << '\n';
  }
  out << "COLUMNS\n";
  auto lp = p.to_lp();
  bool in_int = false;
  int marker = 0;
  for (int j = 0; j < lp.num_cols; ++j) {
    if (vars[j].integer != in_int) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "    M%07d  'MARKER'                 '%s'", marker++, vars[j].integer ? "INTORG" : "INTEND");
      out << buf << '\n';
      in_int = vars[j].integer;
    }
    const std::string col = mps_col(j);
    if (vars[j].cost != 0.0) field_line(out, col, "COST", num(vars[j].cost));
    for (int k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k)
      if (lp.value[k] != 0.0) field_line(out, col, mps_row(lp.row_index[k]), num(lp.value[k]));
    if (vars[j].cost == 0.0 && lp.col_start[j] == lp.col_start[j + 1]) field_line(out, col, "COST", "0");
  }
  if (in_int) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "    M%07d  'MARKER'                 'INTEND'", marker);
    out << buf << '\n';
  }
  out << "RHS\n";
  if (p.objective_offset() != 0.0) field_line(out, "RHS", "COST", num(-p.objective_offset()));
  for (int i = 0; i < static_cast<int>(rows.size()); ++i)
    if (rows[i].rhs != 0.0) field_line(out, "RHS", mps_row(i), num(rows[i].rhs));
  out << "BOUNDS\n";
  for (int j = 0; j < static_cast<int>(vars.size()); ++j) {
    const auto& v = vars[j];
    const std::string col = mps_col(j);
    char buf[96];
    auto bound = [&](const char* kind, const std::string& value) {
      std::snprintf(buf, sizeof buf, " %-2s BND       %-8s  %12s", kind, col.c_str(), value.c_str());
      out << buf << '\n';
    };
    if (v.lo == v.hi) {
      bound("FX", num(v.lo));
      continue;
    }
    if (!std::isfinite(v.lo) && !std::isfinite(v.hi)) {
      bound("FR", "");
      continue;
    }
    if (!std::isfinite(v.lo)) bound("MI", "");
    else if (v.lo != 0.0 || v.integer) bound("LO", num(v.lo));
    if (std::isfinite(v.hi)) bound("UP", num(v.hi));
    else if (v.integer) bound("PL", "");
  }
  out << "ENDATA\n";
  return out.str();
}

std::string export_cone_sidecar(const MipProblem& p) {
  std::ostringstream out;
  out << "# cone x y z  (x*y >= z^2, x,y >= 0)\n";
  for (const auto& c : p.cones())
    out << c.name << ' ' << mps_col(c.x) << ' ' << mps_col(c.y) << ' ' << mps_col(c.z) << '\n';
  return out.str();
}

}  // namespace fsuc::mip
