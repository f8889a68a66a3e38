#include "sparse_lu.hpp"

#include <cmath>
#include <functional>
#include <queue>

namespace fsuc::lp {

bool SparseLu::factor(int m, std::span<const int> col_start, std::span<const int> row_index,
                      std::span<const double> value, std::span<const int> order, double singular_tol) {
  m_ = m;
  lstart_.assign(1, 0);
  ustart_.assign(1, 0);
  li_.clear();
  lx_.clear();
  ui_.clear();
  ux_.clear();
  udiag_.assign(m, 0.0);
  prow_.assign(m, -1);
  pinv_.assign(m, -1);
  q_.assign(order.begin(), order.end());
  work_.assign(m, 0.0);

  std::vector<double> x(m, 0.0);
  std::vector<char> touched(m, 0);
  std::vector<int> pattern;
  std::priority_queue<int, std::vector<int>, std::greater<>> steps;

  auto touch = [&](int i) {
    if (touched[i]) return;
    touched[i] = 1;
    pattern.push_back(i);
    if (pinv_[i] >= 0) steps.push(pinv_[i]);
  };

  for (int k = 0; k < m; ++k) {
    const int c = q_[k];
    for (int p = col_start[c]; p < col_start[c + 1]; ++p) {
      touch(row_index[p]);
      x[row_index[p]] += value[p];
    }
    // Forward substitution over earlier steps in increasing order.
    while (!steps.empty()) {
      const int s = steps.top();
      steps.pop();
      const double v = x[prow_[s]];
      if (v == 0.0) continue;
      ui_.push_back(s);
      ux_.push_back(v);
      for (int p = lstart_[s]; p < lstart_[s + 1]; ++p) {
        touch(li_[p]);
        x[li_[p]] -= lx_[p] * v;
      }
    }
    int piv = -1;
    double best = 0.0;
    for (int i : pattern) {
      if (pinv_[i] >= 0) continue;
      double a = std::abs(x[i]);
      if (a > best || (a == best && piv >= 0 && i < piv)) {
        best = a;
        piv = i;
      }
    }
    if (piv < 0 || best <= singular_tol) return false;
    const double d = x[piv];
    udiag_[k] = d;
    prow_[k] = piv;
    pinv_[piv] = k;
    for (int i : pattern) {
      if (pinv_[i] < 0 && x[i] != 0.0) {
        li_.push_back(i);
        lx_.push_back(x[i] / d);
      }
      x[i] = 0.0;
      touched[i] = 0;
    }
    pattern.clear();
    lstart_.push_back(static_cast<int>(li_.size()));
    ustart_.push_back(static_cast<int>(ui_.size()));
  }
  return true;
}

void SparseLu::solve(std::span<double> b) const {
  auto& y = work_;
  for (int k = 0; k < m_; ++k) {
    const double v = b[prow_[k]];
    y[k] = v;
    if (v == 0.0) continue;
    for (int p = lstart_[k]; p < lstart_[k + 1]; ++p) b[li_[p]] -= lx_[p] * v;
  }
  for (int k = m_ - 1; k >= 0; --k) {
    const double z = y[k] / udiag_[k];
    y[k] = z;
    if (z == 0.0) continue;
    for (int p = ustart_[k]; p < ustart_[k + 1]; ++p) y[ui_[p]] -= ux_[p] * z;
  }
  for (int k = 0; k < m_; ++k) b[q_[k]] = y[k];
}

void SparseLu::solve_transpose(std::span<double> c) const {
  auto& t = work_;
  for (int k = 0; k < m_; ++k) {
    double s = c[q_[k]];
    for (int p = ustart_[k]; p < ustart_[k + 1]; ++p) s -= ux_[p] * t[ui_[p]];
    t[k] = s / udiag_[k];
  }
  for (int k = m_ - 1; k >= 0; --k) {
    double s = t[k];
    for (int p = lstart_[k]; p < lstart_[k + 1]; ++p) s -= lx_[p] * c[li_[p]];
    c[prow_[k]] = s;
  }
}

}  // namespace fsuc::lp
