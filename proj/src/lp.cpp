#include "fsuc/lp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>

#include "sparse_lu.hpp"

namespace fsuc::lp {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
    case LpStatus::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

namespace kernels {

void price_row_serial(std::span<const int> col_start, std::span<const int> row_index,
                      std::span<const double> value, std::span<const double> rho,
                      std::span<const std::int8_t> is_basic, std::span<double> out) {
  const std::size_t n = col_start.size() - 1;
  for (std::size_t j = 0; j < n; ++j) {
    if (is_basic[j]) {
      out[j] = 0.0;
      continue;
    }
    double s = 0.0;
    for (int k = col_start[j]; k < col_start[j + 1]; ++k) s += value[k] * rho[row_index[k]];
    out[j] = s;
  }
}

void price_row_omp(std::span<const int> col_start, std::span<const int> row_index, std::span<const double> value,
                   std::span<const double> rho, std::span<const std::int8_t> is_basic, std::span<double> out) {
  const long n = static_cast<long>(col_start.size()) - 1;
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j) {
    if (is_basic[j]) {
      out[j] = 0.0;
      continue;
    }
    double s = 0.0;
    for (int k = col_start[j]; k < col_start[j + 1]; ++k) s += value[k] * rho[row_index[k]];
    out[j] = s;
  }
}

}  // namespace kernels

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pow2_round(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) return 1.0;
  return std::exp2(std::round(std::log2(s)));
}

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Vec = Eigen::VectorXd;

// LU of the basis at the last refactorization followed by product-form etas.
class BasisFactor {
 public:
  bool factor(const SpMat& b) {
    etas_.clear();
    valid_ = false;
    if (b.rows() == 0) return valid_ = true;
    Eigen::COLAMDOrdering<int> colamd;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
    colamd(b, perm);
    const auto& idx = perm.indices();
    std::vector<int> order(idx.size());
    for (int k = 0; k < idx.size(); ++k) order[idx[k]] = k;
    const auto m = static_cast<std::size_t>(b.rows());
    valid_ = lu_.factor(static_cast<int>(m), {b.outerIndexPtr(), m + 1},
                        {b.innerIndexPtr(), static_cast<std::size_t>(b.nonZeros())},
                        {b.valuePtr(), static_cast<std::size_t>(b.nonZeros())}, order);
    return valid_;
  }

  void ftran(Vec& v) const {
    if (!valid_ || lu_.size() == 0) return;
    lu_.solve({v.data(), static_cast<std::size_t>(v.size())});
    for (const auto& e : etas_) {
      double vr = v[e.r] / e.alpha_r;
      v[e.r] = vr;
      if (vr == 0.0) continue;
      for (std::size_t k = 0; k < e.idx.size(); ++k) v[e.idx[k]] -= e.val[k] * vr;
    }
  }

  void btran(Vec& v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = v[it->r];
      for (std::size_t k = 0; k < it->idx.size(); ++k) s -= it->val[k] * v[it->idx[k]];
      v[it->r] = s / it->alpha_r;
    }
    if (valid_ && lu_.size() > 0) lu_.solve_transpose({v.data(), static_cast<std::size_t>(v.size())});
  }

  // column = B^{-1} a_q in the current basis, pivot position r.
  void update(const Vec& column, int r) {
    Eta e;
    e.r = r;
    e.alpha_r = column[r];
    for (int i = 0; i < column.size(); ++i) {
      if (i == r) continue;
      if (std::abs(column[i]) > 1e-13) {
        e.idx.push_back(i);
        e.val.push_back(column[i]);
      }
    }
    etas_.push_back(std::move(e));
  }

  [[nodiscard]] std::size_t updates() const { return etas_.size(); }

 private:
  struct Eta {
    int r = 0;
    double alpha_r = 1.0;
    std::vector<int> idx;
    std::vector<double> val;
  };
  SparseLu lu_;
  bool valid_ = false;
  std::vector<Eta> etas_;
};

}  // namespace

struct DualSimplex::Impl {
  LpOptions opt;
  int n = 0;  // structurals
  int m = 0;  // rows
  // Scaled column-major A.
  std::vector<int> cstart;
  std::vector<int> rindex;
  std::vector<double> aval;
  std::vector<double> row_scale, col_scale;
  double obj_scale = 1.0;
  double big = 1e6;

  std::vector<double> cost;  // scaled, size n + m (logicals 0)
  std::vector<double> lo, up;
  std::vector<char> art_lo, art_up;  // artificial structural bounds
  std::vector<double> orig_lo, orig_up;  // unscaled boxed structural bounds, for implied row bounds
  std::vector<double> x;
  std::vector<double> d;
  std::vector<VarStatus> status;
  std::vector<int> head;  // basic variable at each position
  std::vector<int> pos;   // position of a basic variable, -1 otherwise
  std::vector<double> weight;

  BasisFactor factor;
  bool factored = false;
  long iters = 0;

  // Work vectors.
  Vec rho, col, tau, flipcol;
  std::vector<double> alpha;  // pivot row over all variables
  std::vector<std::int8_t> basic_flag;

  [[nodiscard]] int total() const { return n + m; }

  void init(const LpData& data) {
    n = data.num_cols;
    m = data.num_rows;
    if (static_cast<int>(data.col_start.size()) != n + 1) throw std::invalid_argument("col_start size mismatch");
    cstart = data.col_start;
    rindex = data.row_index;
    aval = data.value;

    double ref = 1.0;
    for (int j = 0; j < n; ++j) {
      if (std::isfinite(data.col_lo[j])) ref = std::max(ref, std::abs(data.col_lo[j]));
      if (std::isfinite(data.col_hi[j])) ref = std::max(ref, std::abs(data.col_hi[j]));
    }
    for (int i = 0; i < m; ++i) {
      if (std::isfinite(data.row_lo[i])) ref = std::max(ref, std::abs(data.row_lo[i]));
      if (std::isfinite(data.row_hi[i])) ref = std::max(ref, std::abs(data.row_hi[i]));
    }
    big = std::max(1e6, 100.0 * ref);

    orig_lo.resize(n);
    orig_up.resize(n);
    art_lo.assign(n, 0);
    art_up.assign(n, 0);
    for (int j = 0; j < n; ++j) {
      orig_lo[j] = data.col_lo[j];
      orig_up[j] = data.col_hi[j];
      if (orig_lo[j] > orig_up[j]) throw std::invalid_argument("column lower bound exceeds upper bound");
      if (!std::isfinite(orig_lo[j])) {
        orig_lo[j] = std::min(-big, orig_up[j] - big);
        art_lo[j] = 1;
      }
      if (!std::isfinite(orig_up[j])) {
        orig_up[j] = std::max(big, orig_lo[j] + big);
        art_up[j] = 1;
      }
    }

    compute_scaling();

    double cmax = 0.0;
    for (int j = 0; j < n; ++j) cmax = std::max(cmax, std::abs(data.cost[j] * col_scale[j]));
    obj_scale = cmax > 0.0 ? pow2_round(1.0 / cmax) : 1.0;

    cost.assign(n + m, 0.0);
    lo.assign(n + m, 0.0);
    up.assign(n + m, 0.0);
    for (int j = 0; j < n; ++j) {
      cost[j] = data.cost[j] * col_scale[j] * obj_scale;
      lo[j] = orig_lo[j] / col_scale[j];
      up[j] = orig_up[j] / col_scale[j];
    }
    std::vector<std::vector<std::pair<int, double>>> row_terms(m);
    for (int j = 0; j < n; ++j)
      for (int k = data.col_start[j]; k < data.col_start[j + 1]; ++k)
        row_terms[data.row_index[k]].emplace_back(j, data.value[k]);
    for (int i = 0; i < m; ++i) {
      auto [l, u] = implied_row_bounds(row_terms[i], data.row_lo[i], data.row_hi[i]);
      if (l > u) throw std::invalid_argument("row lower bound exceeds upper bound");
      lo[n + i] = l * row_scale[i];
      up[n + i] = u * row_scale[i];
    }
    slack_basis();
  }

  void compute_scaling() {
    row_scale.assign(m, 1.0);
    col_scale.assign(n, 1.0);
    std::vector<double> rmin(m), rmax(m);
    for (int pass = 0; pass < 4; ++pass) {
      std::fill(rmin.begin(), rmin.end(), kInf);
      std::fill(rmax.begin(), rmax.end(), 0.0);
      for (int j = 0; j < n; ++j)
        for (int k = cstart[j]; k < cstart[j + 1]; ++k) {
          double a = std::abs(aval[k] * col_scale[j]);
          if (a == 0.0) continue;
          rmin[rindex[k]] = std::min(rmin[rindex[k]], a);
          rmax[rindex[k]] = std::max(rmax[rindex[k]], a);
        }
      for (int i = 0; i < m; ++i)
        row_scale[i] = rmax[i] > 0.0 ? 1.0 / std::sqrt(rmin[i] * rmax[i]) : 1.0;
      for (int j = 0; j < n; ++j) {
        double cmin = kInf, cmax = 0.0;
        for (int k = cstart[j]; k < cstart[j + 1]; ++k) {
          double a = std::abs(aval[k] * row_scale[rindex[k]]);
          if (a == 0.0) continue;
          cmin = std::min(cmin, a);
          cmax = std::max(cmax, a);
        }
        col_scale[j] = cmax > 0.0 ? 1.0 / std::sqrt(cmin * cmax) : 1.0;
      }
    }
    for (auto& s : row_scale) s = pow2_round(s);
    for (auto& s : col_scale) s = pow2_round(s);
    for (int j = 0; j < n; ++j)
      for (int k = cstart[j]; k < cstart[j + 1]; ++k) aval[k] *= row_scale[rindex[k]] * col_scale[j];
  }

  // Replaces infinite row bounds with (slightly widened) activity bounds
  // implied by the boxed column bounds. Terms are unscaled (column, coef).
  std::pair<double, double> implied_row_bounds(const std::vector<std::pair<int, double>>& terms, double l,
                                               double u) const {
    if (std::isfinite(l) && std::isfinite(u)) return {l, u};
    double amin = 0.0, amax = 0.0;
    for (auto [j, a] : terms) {
      amin += a > 0 ? a * orig_lo[j] : a * orig_up[j];
      amax += a > 0 ? a * orig_up[j] : a * orig_lo[j];
    }
    double pad = 1.0 + 1e-6 * std::max(std::abs(amin), std::abs(amax));
    if (!std::isfinite(l)) l = std::min(amin - pad, std::isfinite(u) ? u - pad : amin - pad);
    if (!std::isfinite(u)) u = std::max(amax + pad, l + pad);
    return {l, u};
  }

  void slack_basis() {
    const int N = total();
    status.assign(N, VarStatus::AtLower);
    x.assign(N, 0.0);
    d.assign(N, 0.0);
    pos.assign(N, -1);
    head.resize(m);
    for (int j = 0; j < n; ++j) {
      status[j] = cost[j] < 0.0 ? VarStatus::AtUpper : VarStatus::AtLower;
      x[j] = status[j] == VarStatus::AtUpper ? up[j] : lo[j];
    }
    for (int i = 0; i < m; ++i) {
      status[n + i] = VarStatus::Basic;
      head[i] = n + i;
      pos[n + i] = i;
    }
    weight.assign(m, 1.0);
    factored = false;
  }

  void column(int j, Vec& out) const {
    out.setZero(m);
    if (j < n) {
      for (int k = cstart[j]; k < cstart[j + 1]; ++k) out[rindex[k]] = aval[k];
    } else {
      out[j - n] = -1.0;
    }
  }

  bool refactor() {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(m) * 3);
    for (int p = 0; p < m; ++p) {
      int j = head[p];
      if (j < n) {
        for (int k = cstart[j]; k < cstart[j + 1]; ++k) trip.emplace_back(rindex[k], p, aval[k]);
      } else {
        trip.emplace_back(j - n, p, -1.0);
      }
    }
    SpMat b(m, m);
    b.setFromTriplets(trip.begin(), trip.end());
    b.makeCompressed();
    factored = factor.factor(b);
    return factored;
  }

  void compute_primal() {
    Vec rhs = Vec::Zero(m);
    for (int j = 0; j < total(); ++j) {
      if (status[j] == VarStatus::Basic) continue;
      double v = x[j];
      if (v == 0.0) continue;
      if (j < n) {
        for (int k = cstart[j]; k < cstart[j + 1]; ++k) rhs[rindex[k]] -= aval[k] * v;
      } else {
        rhs[j - n] += v;
      }
    }
    factor.ftran(rhs);
    for (int p = 0; p < m; ++p) x[head[p]] = rhs[p];
  }

  void compute_duals() {
    Vec y(m);
    for (int p = 0; p < m; ++p) y[p] = cost[head[p]];
    factor.btran(y);
    for (int j = 0; j < n; ++j) {
      if (status[j] == VarStatus::Basic) {
        d[j] = 0.0;
        continue;
      }
      double s = 0.0;
      for (int k = cstart[j]; k < cstart[j + 1]; ++k) s += aval[k] * y[rindex[k]];
      d[j] = cost[j] - s;
    }
    for (int i = 0; i < m; ++i) d[n + i] = status[n + i] == VarStatus::Basic ? 0.0 : y[i];
  }

  // Moves nonbasic variables to the bound their reduced cost prefers.
  bool make_dual_feasible() {
    bool moved = false;
    for (int j = 0; j < total(); ++j) {
      if (status[j] == VarStatus::Basic || lo[j] == up[j]) continue;
      if (status[j] == VarStatus::AtLower && d[j] < -opt.dual_tol) {
        status[j] = VarStatus::AtUpper;
        x[j] = up[j];
        moved = true;
      } else if (status[j] == VarStatus::AtUpper && d[j] > opt.dual_tol) {
        status[j] = VarStatus::AtLower;
        x[j] = lo[j];
        moved = true;
      }
    }
    return moved;
  }

  void snap_nonbasic() {
    for (int j = 0; j < total(); ++j) {
      if (status[j] == VarStatus::AtLower) x[j] = lo[j];
      else if (status[j] == VarStatus::AtUpper) x[j] = up[j];
    }
  }

  bool reinvert() {
    if (!refactor()) return false;
    snap_nonbasic();
    compute_duals();
    if (make_dual_feasible()) {}
    compute_primal();
    return std::all_of(head.begin(), head.end(), [&](int j) { return std::isfinite(x[j]); });
  }

  [[nodiscard]] double infeasibility(int j) const {
    if (x[j] < lo[j] - opt.primal_tol) return lo[j] - x[j];
    if (x[j] > up[j] + opt.primal_tol) return x[j] - up[j];
    return 0.0;
  }

  int choose_leaving(bool bland) const {
    int best = -1;
    double best_score = 0.0;
    int best_var = std::numeric_limits<int>::max();
    for (int p = 0; p < m; ++p) {
      double inf = infeasibility(head[p]);
      if (inf <= 0.0) continue;
      if (bland) {
        if (head[p] < best_var) {
          best_var = head[p];
          best = p;
        }
        continue;
      }
      double score = opt.steepest_edge ? inf * inf / weight[p] : inf;
      if (score > best_score) {
        best_score = score;
        best = p;
      }
    }
    return best;
  }

  void price_row() {
    basic_flag.resize(n);
    for (int j = 0; j < n; ++j) basic_flag[j] = status[j] == VarStatus::Basic ? 1 : 0;
    alpha.resize(total());
    std::span<const double> rho_span(rho.data(), static_cast<std::size_t>(m));
    std::span<double> out(alpha.data(), static_cast<std::size_t>(n));
    if (opt.parallel_pricing)
      kernels::price_row_omp(cstart, rindex, aval, rho_span, basic_flag, out);
    else
      kernels::price_row_serial(cstart, rindex, aval, rho_span, basic_flag, out);
    for (int i = 0; i < m; ++i) alpha[n + i] = status[n + i] == VarStatus::Basic ? 0.0 : -rho[i];
  }

  double objective_scaled() const {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += cost[j] * x[j];
    return s;
  }

  LpStatus run(long max_iter) {
    if (!factored || factor.updates() > 0) {
      if (!reinvert()) {
        slack_basis();
        if (!reinvert()) return LpStatus::NumericalFailure;
      }
    } else {
      snap_nonbasic();
      compute_duals();
      make_dual_feasible();
      compute_primal();
    }

    long local = 0;
    int retries = 0;
    long stall = 0;
    double last_obj = -kInf;
    bool verified = false;
    struct Cand {
      double ratio;
      double abs_alpha;
      int j;
    };
    std::vector<Cand> cands;
    std::vector<int> flips;

    while (true) {
      if (local >= max_iter) return LpStatus::IterationLimit;
      if (static_cast<int>(factor.updates()) >= opt.refactor_interval) {
        if (!reinvert()) {
          if (++retries > 3) return LpStatus::NumericalFailure;
          slack_basis();
          if (!reinvert()) return LpStatus::NumericalFailure;
        }
      }
      const bool bland = stall > 50;
      const int r = choose_leaving(bland);
      if (r < 0) {
        if (factor.updates() > 0 && !verified) {
          verified = true;
          if (!reinvert()) return LpStatus::NumericalFailure;
          continue;
        }
        return LpStatus::Optimal;
      }
      verified = false;
      const int leaving = head[r];
      const bool to_upper = x[leaving] > up[leaving];
      const double target = to_upper ? up[leaving] : lo[leaving];
      double delta = x[leaving] - target;

      rho.setZero(m);
      rho[r] = 1.0;
      factor.btran(rho);
      if (opt.steepest_edge) weight[r] = std::max(rho.squaredNorm(), 1e-12);
      price_row();

      // Candidates: alpha~ = alpha if leaving to upper, -alpha otherwise.
      cands.clear();
      for (int j = 0; j < total(); ++j) {
        if (status[j] == VarStatus::Basic || lo[j] == up[j]) continue;
        double a = to_upper ? alpha[j] : -alpha[j];
        if (std::abs(a) <= opt.pivot_tol) continue;
        if (status[j] == VarStatus::AtLower && a > 0.0) {
          cands.push_back({std::max(d[j], 0.0) / a, a, j});
        } else if (status[j] == VarStatus::AtUpper && a < 0.0) {
          cands.push_back({std::max(-d[j], 0.0) / -a, -a, j});
        }
      }
      if (cands.empty()) {
        if (factor.updates() > 0 && retries < 3) {
          ++retries;
          if (!reinvert()) return LpStatus::NumericalFailure;
          continue;
        }
        return LpStatus::Infeasible;
      }

      int q = -1;
      flips.clear();
      if (bland) {
        double best = kInf;
        for (const auto& c : cands) {
          if (c.ratio < best - 1e-12) {
            best = c.ratio;
            q = c.j;
          } else if (c.ratio <= best + 1e-12 && c.j < q) {
            q = c.j;
          }
        }
      } else {
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
          return a.ratio != b.ratio ? a.ratio < b.ratio : a.j < b.j;
        });
        // Bound-flipping pass: step past breakpoints while the dual slope stays positive.
        double slope = std::abs(delta);
        std::size_t i = 0;
        while (i < cands.size()) {
          const int j = cands[i].j;
          double reduce = cands[i].abs_alpha * (up[j] - lo[j]);
          if (slope - reduce <= opt.primal_tol) break;
          slope -= reduce;
          ++i;
        }
        if (i == cands.size()) {
          if (factor.updates() > 0 && retries < 3) {
            ++retries;
            if (!reinvert()) return LpStatus::NumericalFailure;
            continue;
          }
          return LpStatus::Infeasible;
        }
        // Harris pass over the remaining candidates: largest pivot within tolerance.
        double bound = kInf;
        for (std::size_t k = i; k < cands.size(); ++k) {
          const int j = cands[k].j;
          double dj = status[j] == VarStatus::AtLower ? d[j] : -d[j];
          bound = std::min(bound, (std::max(dj, 0.0) + opt.dual_tol) / cands[k].abs_alpha);
        }
        double best_abs = 0.0;
        for (std::size_t k = i; k < cands.size(); ++k) {
          if (cands[k].ratio > bound) break;
          if (cands[k].abs_alpha > best_abs) {
            best_abs = cands[k].abs_alpha;
            q = cands[k].j;
          }
        }
        for (std::size_t k = 0; k < i; ++k) flips.push_back(cands[k].j);
      }

      // Entering column.
      column(q, col);
      factor.ftran(col);
      const double alpha_rq = col[r];
      if (std::abs(alpha_rq) <= opt.pivot_tol ||
          std::abs(alpha_rq - alpha[q]) > 1e-6 * (1.0 + std::abs(alpha_rq))) {
        if (++retries > 5) return LpStatus::NumericalFailure;
        if (!reinvert()) return LpStatus::NumericalFailure;
        continue;
      }

      // Dual step.
      double dq = d[q];
      double theta_d = dq / alpha[q];
      if (to_upper ? theta_d < 0.0 : theta_d > 0.0) theta_d = 0.0;
      for (int j = 0; j < total(); ++j) {
        if (status[j] == VarStatus::Basic) continue;
        d[j] -= theta_d * alpha[j];
      }
      d[q] = 0.0;
      d[leaving] = -theta_d;

      // Flipped variables move to their opposite bound.
      if (!flips.empty()) {
        flipcol.setZero(m);
        for (int j : flips) {
          double nv = status[j] == VarStatus::AtLower ? up[j] : lo[j];
          double step = nv - x[j];
          status[j] = status[j] == VarStatus::AtLower ? VarStatus::AtUpper : VarStatus::AtLower;
          x[j] = nv;
          if (j < n) {
            for (int k = cstart[j]; k < cstart[j + 1]; ++k) flipcol[rindex[k]] += aval[k] * step;
          } else {
            flipcol[j - n] -= step;
          }
        }
        factor.ftran(flipcol);
        for (int p = 0; p < m; ++p) x[head[p]] -= flipcol[p];
        delta = x[leaving] - target;
      }

      if (opt.steepest_edge) {
        tau = rho;
        factor.ftran(tau);
      }

      // Primal step.
      const double theta_p = delta / alpha_rq;
      for (int p = 0; p < m; ++p) {
        if (col[p] != 0.0) x[head[p]] -= theta_p * col[p];
      }
      x[q] += theta_p;
      x[leaving] = target;

      if (opt.steepest_edge) {
        const double wr = weight[r];
        for (int p = 0; p < m; ++p) {
          if (p == r || col[p] == 0.0) continue;
          double ratio = col[p] / alpha_rq;
          weight[p] = std::max(weight[p] - 2.0 * ratio * tau[p] + ratio * ratio * wr, 1e-4);
        }
        weight[r] = std::max(wr / (alpha_rq * alpha_rq), 1e-4);
      }

      // Basis change.
      status[leaving] = to_upper ? VarStatus::AtUpper : VarStatus::AtLower;
      pos[leaving] = -1;
      status[q] = VarStatus::Basic;
      pos[q] = r;
      head[r] = q;
      factor.update(col, r);
      ++iters;
      ++local;

      double obj = objective_scaled();
      if (obj > last_obj + 1e-12 * (1.0 + std::abs(obj))) {
        last_obj = obj;
        stall = 0;
      } else {
        ++stall;
      }
    }
  }
};

DualSimplex::DualSimplex(const LpData& data, LpOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->opt = options;
  impl_->init(data);
}

DualSimplex::~DualSimplex() = default;

int DualSimplex::num_cols() const { return impl_->n; }
int DualSimplex::num_rows() const { return impl_->m; }
long DualSimplex::iterations() const { return impl_->iters; }

void DualSimplex::add_rows(std::span<const SparseRow> rows, std::span<const double> lo, std::span<const double> hi) {
  auto& s = *impl_;
  if (rows.empty()) return;
  const int n = s.n;
  const int m_old = s.m;
  const int k = static_cast<int>(rows.size());
  // Rebuild the column-major matrix with the new rows appended.
  std::vector<std::vector<std::pair<int, double>>> extra(n);
  std::vector<double> rscale(k, 1.0);
  for (int r = 0; r < k; ++r) {
    double amin = kInf, amax = 0.0;
    for (std::size_t t = 0; t < rows[r].index.size(); ++t) {
      int j = rows[r].index[t];
      if (j < 0 || j >= n) throw std::out_of_range("row references unknown column");
      double a = std::abs(rows[r].value[t] * s.col_scale[j]);
      if (a == 0.0) continue;
      amin = std::min(amin, a);
      amax = std::max(amax, a);
    }
    rscale[r] = amax > 0.0 ? pow2_round(1.0 / std::sqrt(amin * amax)) : 1.0;
    for (std::size_t t = 0; t < rows[r].index.size(); ++t) {
      int j = rows[r].index[t];
      extra[j].emplace_back(m_old + r, rows[r].value[t] * s.col_scale[j] * rscale[r]);
    }
  }
  std::vector<int> cstart(n + 1, 0);
  std::vector<int> rindex;
  std::vector<double> aval;
  rindex.reserve(s.rindex.size() + k * 8);
  aval.reserve(s.aval.size() + k * 8);
  for (int j = 0; j < n; ++j) {
    cstart[j] = static_cast<int>(rindex.size());
    for (int t = s.cstart[j]; t < s.cstart[j + 1]; ++t) {
      rindex.push_back(s.rindex[t]);
      aval.push_back(s.aval[t]);
    }
    for (auto& [i, v] : extra[j]) {
      rindex.push_back(i);
      aval.push_back(v);
    }
  }
  cstart[n] = static_cast<int>(rindex.size());
  s.cstart = std::move(cstart);
  s.rindex = std::move(rindex);
  s.aval = std::move(aval);

  s.m = m_old + k;
  s.row_scale.insert(s.row_scale.end(), rscale.begin(), rscale.end());
  for (int r = 0; r < k; ++r) {
    int i = m_old + r;
    std::vector<std::pair<int, double>> terms;
    for (std::size_t t = 0; t < rows[r].index.size(); ++t) terms.emplace_back(rows[r].index[t], rows[r].value[t]);
    auto [l, u] = s.implied_row_bounds(terms, lo[r], hi[r]);
    s.cost.push_back(0.0);
    s.lo.push_back(l * rscale[r]);
    s.up.push_back(u * rscale[r]);
    // Current activity of the new row.
    double act = 0.0;
    for (std::size_t t = 0; t < rows[r].index.size(); ++t) {
      int j = rows[r].index[t];
      act += rows[r].value[t] * s.col_scale[j] * rscale[r] * s.x[j];
    }
    s.x.push_back(act);
    s.d.push_back(0.0);
    s.status.push_back(VarStatus::Basic);
    s.pos.push_back(i);
    s.head.push_back(n + i);
    s.weight.push_back(1.0);
  }
  s.factored = false;
}

void DualSimplex::set_col_bounds(int col, double lo, double hi) {
  auto& s = *impl_;
  if (col < 0 || col >= s.n) throw std::out_of_range("column index");
  if (lo > hi) throw std::invalid_argument("lower bound exceeds upper bound");
  s.art_lo[col] = !std::isfinite(lo);
  s.art_up[col] = !std::isfinite(hi);
  if (!std::isfinite(lo)) lo = std::min(-s.big, hi - s.big);
  if (!std::isfinite(hi)) hi = std::max(s.big, lo + s.big);
  s.lo[col] = lo / s.col_scale[col];
  s.up[col] = hi / s.col_scale[col];
  if (s.status[col] == VarStatus::AtLower) s.x[col] = s.lo[col];
  else if (s.status[col] == VarStatus::AtUpper) s.x[col] = s.up[col];
}

double DualSimplex::col_lower(int col) const { return impl_->lo[col] * impl_->col_scale[col]; }
double DualSimplex::col_upper(int col) const { return impl_->up[col] * impl_->col_scale[col]; }

LpStatus DualSimplex::solve(long max_iterations) {
  auto& s = *impl_;
  LpStatus st = s.run(max_iterations);
  if (st != LpStatus::Optimal) return st;
  for (int j = 0; j < s.n; ++j) {
    double tol = 1e-6 * s.big / s.col_scale[j];
    if ((s.art_lo[j] && s.x[j] <= s.lo[j] + tol) || (s.art_up[j] && s.x[j] >= s.up[j] - tol))
      return LpStatus::Unbounded;
  }
  return st;
}

double DualSimplex::objective() const {
  const auto& s = *impl_;
  return s.objective_scaled() / s.obj_scale;
}

std::vector<double> DualSimplex::primal() const {
  const auto& s = *impl_;
  std::vector<double> out(s.n);
  for (int j = 0; j < s.n; ++j) out[j] = s.x[j] * s.col_scale[j];
  return out;
}

std::vector<double> DualSimplex::row_activity() const {
  const auto& s = *impl_;
  std::vector<double> out(s.m, 0.0);
  for (int j = 0; j < s.n; ++j)
    for (int k = s.cstart[j]; k < s.cstart[j + 1]; ++k) out[s.rindex[k]] += s.aval[k] * s.x[j];
  for (int i = 0; i < s.m; ++i) out[i] /= s.row_scale[i];
  return out;
}

std::vector<VarStatus> DualSimplex::basis() const { return impl_->status; }

void DualSimplex::set_basis(std::span<const VarStatus> basis) {
  auto& s = *impl_;
  const int N = s.total();
  const int given_rows = static_cast<int>(basis.size()) - s.n;
  int basic = 0;
  bool ok = given_rows >= 0 && given_rows <= s.m;
  if (ok) {
    for (auto v : basis) basic += v == VarStatus::Basic ? 1 : 0;
    basic += s.m - given_rows;
    ok = basic == s.m;
  }
  if (!ok) {
    s.slack_basis();
    return;
  }
  std::vector<VarStatus> st(N);
  for (int j = 0; j < s.n; ++j) st[j] = basis[j];
  for (int i = 0; i < s.m; ++i) st[s.n + i] = i < given_rows ? basis[s.n + i] : VarStatus::Basic;
  int p = 0;
  for (int j = 0; j < N; ++j) {
    s.status[j] = st[j];
    if (st[j] == VarStatus::Basic) {
      s.head[p] = j;
      s.pos[j] = p++;
    } else {
      s.pos[j] = -1;
      s.x[j] = st[j] == VarStatus::AtUpper ? s.up[j] : s.lo[j];
    }
  }
  s.weight.assign(s.m, 1.0);
  s.factored = false;
  if (!s.refactor()) s.slack_basis();
}

}  // namespace fsuc::lp
