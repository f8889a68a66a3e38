#include "fsuc/suc.hpp"

#include <cmath>
#include <string>

#include "fsuc/frequency.hpp"

namespace fsuc {

using mip::kInf;
using mip::Sense;

double node_cost(const ThermalClass& tc, int n_up, int n_sg, double power, double dt) {
  return tc.startup_cost * n_sg + dt * (tc.no_load_cost * n_up + tc.marginal_cost * power);
}

double system_inertia(std::span<const int> n_up, std::span<const ThermalClass> classes, int lost_class) {
  double h = 0.0;
  for (std::size_t g = 0; g < classes.size(); ++g) h += classes[g].inertia_const * classes[g].rated_power * n_up[g];
  if (lost_class >= 0 && n_up[lost_class] > 0) {
    const auto& lc = classes[lost_class];
    h -= lc.inertia_const * lc.rated_power;
  }
  return h;
}

double system_inertia(std::span<const int> n_up, const SystemModel& model) {
  return system_inertia(n_up, model.thermal_classes, model.lost_unit_class());
}

double decision_cost(const SystemModel& model, const NodeDecision& d, double dt) {
  double c = model.voll * d.load_shed * dt;
  for (std::size_t g = 0; g < model.thermal_classes.size(); ++g)
    c += node_cost(model.thermal_classes[g], d.n_up[g], d.n_sg[g], d.power[g], dt);
  return c;
}

namespace {

// A linear expression under construction.
struct Expr {
  std::vector<int> idx;
  std::vector<double> val;
  double constant = 0.0;
  void add(int j, double a) {
    idx.push_back(j);
    val.push_back(a);
  }
};

class Builder {
 public:
  Builder(const SystemModel& model, const ScenarioTree& tree, const RollingState& state,
          const FormulationOptions& opts)
      : m_(model), t_(tree), s_(state), o_(opts) {}

  SucProblem build() {
    const bool unlinked = o_.fixed_pfr_requirement.has_value() || o_.inertia_floor.has_value();
    if (o_.frequency_constraints && o_.fixed_pfr_requirement)
      throw OptionConflictError("fixed_pfr_requirement is only valid with frequency constraints off");
    freq_on_ = o_.frequency_constraints && m_.freq.largest_loss > 0.0;
    service_ = freq_on_ || unlinked;
    nodes_at_depth();
    add_efr();
    for (const auto& n : t_.nodes) add_node(n);
    for (const auto& n : t_.nodes) add_commitment(n);
    if (freq_on_) add_frequency();
    if (unlinked) add_requirements();
    return std::move(p_);
  }

 private:
  const SystemModel& m_;
  const ScenarioTree& t_;
  const RollingState& s_;
  const FormulationOptions& o_;
  SucProblem p_;
  bool freq_on_ = false;
  bool service_ = false;
  std::vector<std::vector<int>> ancestors_;  // [node][k]: ancestor k levels up

  mip::MipProblem& mip() { return p_.mip; }

  void nodes_at_depth() {
    ancestors_.resize(t_.nodes.size());
    for (const auto& n : t_.nodes) ancestors_[n.id] = t_.path_to_root(n.id);
  }

  void add_efr() {
    double fixed = o_.fixed_efr_volume.value_or(0.0);
    const bool free = freq_on_ && !o_.fixed_efr_volume;
    double cap_total = 0.0;
    for (std::size_t s = 0; s < m_.storage.size(); ++s) {
      const auto& st = m_.storage[s];
      double hi = st.efr_capacity;
      double lo = 0.0;
      if (!free) {
        lo = hi = std::min(st.efr_capacity, std::max(0.0, fixed - cap_total));
      }
      cap_total += st.efr_capacity;
      p_.efr.push_back(mip().add_variable("efr_" + st.name, lo, hi));
    }
    if (!free && fixed > cap_total + 1e-9)
      throw OptionConflictError("fixed EFR volume exceeds the storage EFR capability");
  }

  void add_node(const ScenarioNode& n) {
    const double pi = n.probability;
    const double dt = n.interval;
    const std::string tag = "_n" + std::to_string(n.id);
    SucNodeVars v;
    Expr balance;
    for (const auto& tc : m_.thermal_classes) {
      const int N = tc.unit_count;
      const bool fixed = tc.must_run;
      v.n_up.push_back(mip().add_variable("up_" + tc.name + tag, fixed ? N : 0, N, true, pi * dt * tc.no_load_cost));
      mip().set_priority(v.n_up.back(), 1);
      v.n_sg.push_back(
          mip().add_variable("sg_" + tc.name + tag, 0, fixed ? 0 : N, true, pi * tc.startup_cost));
      int pw = mip().add_variable("p_" + tc.name + tag, 0.0, tc.rated_power * N, false, pi * dt * tc.marginal_cost);
      v.power.push_back(pw);
      const bool can_respond = service_ && tc.max_response > 0.0 && tc.response_slope > 0.0;
      int r = mip().add_variable("pfr_" + tc.name + tag, 0.0, can_respond ? tc.max_response * N : 0.0);
      v.pfr.push_back(r);
      int up = v.n_up.back();
      mip().add_row("pmax_" + tc.name + tag, {pw, up}, {1.0, -tc.rated_power}, Sense::LessEqual, 0.0);
      if (tc.min_stable_gen > 0.0)
        mip().add_row("pmin_" + tc.name + tag, {pw, up}, {1.0, -tc.min_stable_gen}, Sense::GreaterEqual, 0.0);
      if (can_respond) {
        mip().add_row("rmax_" + tc.name + tag, {r, up}, {1.0, -tc.max_response}, Sense::LessEqual, 0.0);
        mip().add_row("rslope_" + tc.name + tag, {r, pw, up},
                      {1.0, tc.response_slope, -tc.response_slope * tc.rated_power}, Sense::LessEqual, 0.0);
      }
      balance.add(pw, 1.0);
    }
    for (std::size_t s = 0; s < m_.storage.size(); ++s) {
      const auto& st = m_.storage[s];
      const double root_eta = std::sqrt(st.round_trip_eff);
      int ch = mip().add_variable("ch_" + st.name + tag, 0.0, st.power_cap);
      int dis = mip().add_variable("dis_" + st.name + tag, 0.0, st.power_cap);
      int soc = mip().add_variable("soc_" + st.name + tag, 0.0, st.energy_cap);
      v.charge.push_back(ch);
      v.discharge.push_back(dis);
      v.soc.push_back(soc);
      if (n.parent < 0) {
        mip().add_row("soc_" + st.name + tag, {soc, ch, dis}, {1.0, -root_eta * dt, dt / root_eta}, Sense::Equal,
                      s_.soc[s]);
      } else {
        int prev = p_.nodes[n.parent].soc[s];
        mip().add_row("soc_" + st.name + tag, {soc, prev, ch, dis}, {1.0, -1.0, -root_eta * dt, dt / root_eta},
                      Sense::Equal, 0.0);
      }
      if (st.efr_capacity > 0.0)
        mip().add_row("efrcap_" + st.name + tag, {dis, p_.efr[s]}, {1.0, 1.0}, Sense::LessEqual, st.power_cap);
      if (n.depth == t_.horizon && o_.terminal_soc_fraction > 0.0)
        mip().set_bounds(soc, o_.terminal_soc_fraction * st.energy_cap, st.energy_cap);
      balance.add(dis, 1.0);
      balance.add(ch, -1.0);
    }
    v.wind = mip().add_variable("wind" + tag, 0.0, n.wind_available);
    v.shed = mip().add_variable("shed" + tag, 0.0, n.demand, false, pi * dt * m_.voll);
    v.spill = mip().add_variable("spill" + tag, 0.0, kInf);
    balance.add(v.wind, 1.0);
    balance.add(v.shed, 1.0);
    balance.add(v.spill, -1.0);
    mip().add_row("balance" + tag, balance.idx, balance.val, Sense::Equal, n.demand);
    p_.nodes.push_back(std::move(v));
  }

  // Units of class g whose start-up becomes effective at node n, as an
  // expression (variable or constant from the rolling state).
  Expr arrivals(const ScenarioNode& n, std::size_t g) {
    const int lag = m_.thermal_classes[g].startup_time;
    Expr e;
    if (lag == 0) e.add(p_.nodes[n.id].n_sg[g], 1.0);
    else if (n.depth >= lag) e.add(p_.nodes[ancestors_[n.id][lag]].n_sg[g], 1.0);
    else e.constant = s_.pending[g][n.depth];
    return e;
  }

  // Arrivals `k` hours before node n (k >= 0), reaching into state history.
  Expr arrivals_back(const ScenarioNode& n, std::size_t g, int k) {
    if (k <= n.depth) return arrivals(t_.nodes[ancestors_[n.id][k]], g);
    Expr e;
    const auto& hist = s_.arrivals[g];
    int back = k - n.depth;  // 1 = the hour before the root
    if (back <= static_cast<int>(hist.size())) e.constant = hist[hist.size() - back];
    return e;
  }

  // Shut-downs at the node k hours before n, reaching into state history.
  // Returns false when the node is the free initial root (nothing counted).
  bool shutdowns_back(const ScenarioNode& n, std::size_t g, int k, Expr& e) {
    if (k <= n.depth) {
      const auto& m = t_.nodes[ancestors_[n.id][k]];
      if (m.parent < 0 && s_.initial) return false;
      Expr a = arrivals(m, g);
      for (std::size_t i = 0; i < a.idx.size(); ++i) e.add(a.idx[i], a.val[i]);
      e.constant += a.constant;
      e.add(p_.nodes[m.id].n_up[g], -1.0);
      if (m.parent >= 0) e.add(p_.nodes[m.parent].n_up[g], 1.0);
      else e.constant += s_.n_up[g];
      return true;
    }
    const auto& hist = s_.shutdowns[g];
    int back = k - n.depth;
    if (back <= static_cast<int>(hist.size())) e.constant += hist[hist.size() - back];
    return true;
  }

  void emit(const std::string& name, Expr e, Sense sense, double rhs) {
    mip().add_row(name, std::move(e.idx), std::move(e.val), sense, rhs - e.constant);
  }

  void add_commitment(const ScenarioNode& n) {
    const std::string tag = "_n" + std::to_string(n.id);
    for (std::size_t g = 0; g < m_.thermal_classes.size(); ++g) {
      const auto& tc = m_.thermal_classes[g];
      if (tc.must_run) continue;
      const int up = p_.nodes[n.id].n_up[g];
      const bool free_root = n.parent < 0 && s_.initial;
      if (!free_root) {
        // n_up - n_up(parent) <= arrivals
        Expr e = arrivals(n, g);
        for (double& a : e.val) a = -a;
        e.constant = -e.constant;
        e.add(up, 1.0);
        if (n.parent >= 0) e.add(p_.nodes[n.parent].n_up[g], -1.0);
        else e.constant -= s_.n_up[g];
        emit("start_" + tc.name + tag, std::move(e), Sense::LessEqual, 0.0);
      }
      if (tc.min_up >= 1) {
        Expr e;
        for (int k = 0; k < tc.min_up; ++k) {
          Expr a = arrivals_back(n, g, k);
          for (std::size_t i = 0; i < a.idx.size(); ++i) e.add(a.idx[i], a.val[i]);
          e.constant += a.constant;
        }
        e.add(up, -1.0);
        if (!e.idx.empty() && !(e.idx.size() == 1 && e.constant == 0.0))
          emit("minup_" + tc.name + tag, std::move(e), Sense::LessEqual, 0.0);
      }
      if (tc.min_down >= 1) {
        Expr e;
        e.add(up, 1.0);
        bool any = false;
        for (int k = 0; k < tc.min_down; ++k) any = shutdowns_back(n, g, k, e) || any;
        if (any) emit("mindown_" + tc.name + tag, std::move(e), Sense::LessEqual, tc.unit_count);
      }
    }
  }

  // Inertia expression before removing the lost unit.
  Expr gross_inertia(int node) {
    Expr e;
    for (std::size_t g = 0; g < m_.thermal_classes.size(); ++g) {
      const auto& tc = m_.thermal_classes[g];
      double h = tc.inertia_const * tc.rated_power;
      if (h != 0.0) e.add(p_.nodes[node].n_up[g], h);
    }
    return e;
  }

  [[nodiscard]] double lost_inertia() const {
    int lc = m_.lost_unit_class();
    if (lc < 0) return 0.0;
    return m_.thermal_classes[lc].inertia_const * m_.thermal_classes[lc].rated_power;
  }

  void add_frequency() {
    const auto& fp = m_.freq;
    const double k = 4.0 * fp.delta_f_max;
    const double c = std::sqrt(fp.t_pfr / k);
    const double h_lost = lost_inertia();
    const double h_min = min_inertia_for_rocof(fp);
    p_.z = mip().add_variable("nadir_z", 0.0, kInf);
    {
      Expr e;
      e.add(p_.z, 1.0);
      for (int v : p_.efr) e.add(v, c);
      emit("nadir_z", std::move(e), Sense::Equal, c * fp.largest_loss);
    }
    for (const auto& n : t_.nodes) {
      const std::string tag = "_n" + std::to_string(n.id);
      auto& v = p_.nodes[n.id];
      Expr h = gross_inertia(n.id);
      emit("rocof" + tag, h, Sense::GreaterEqual, h_min + h_lost);

      v.x = mip().add_variable("nadir_x" + tag, 0.0, kInf);
      Expr ex;
      ex.add(v.x, 1.0);
      for (std::size_t i = 0; i < h.idx.size(); ++i) ex.add(h.idx[i], -h.val[i] / fp.f0);
      for (int e : p_.efr) ex.add(e, fp.t_efr / k);
      emit("nadir_x" + tag, std::move(ex), Sense::Equal, -h_lost / fp.f0);

      v.y = mip().add_variable("nadir_y" + tag, 0.0, kInf);
      Expr ey;
      ey.add(v.y, 1.0);
      for (int r : v.pfr) ey.add(r, -1.0);
      emit("nadir_y" + tag, std::move(ey), Sense::Equal, 0.0);
      mip().add_cone("nadir" + tag, v.x, v.y, p_.z);

      Expr q;
      for (int r : v.pfr) q.add(r, 1.0);
      for (int e : p_.efr) q.add(e, 1.0);
      emit("qss" + tag, std::move(q), Sense::GreaterEqual, fp.largest_loss);
    }
  }

  void add_requirements() {
    const double h_lost = lost_inertia();
    for (const auto& n : t_.nodes) {
      const std::string tag = "_n" + std::to_string(n.id);
      if (o_.fixed_pfr_requirement && *o_.fixed_pfr_requirement > 0.0) {
        Expr e;
        for (int r : p_.nodes[n.id].pfr) e.add(r, 1.0);
        emit("pfrreq" + tag, std::move(e), Sense::GreaterEqual, *o_.fixed_pfr_requirement);
      }
      if (o_.inertia_floor && *o_.inertia_floor > 0.0)
        emit("hfloor" + tag, gross_inertia(n.id), Sense::GreaterEqual, *o_.inertia_floor + h_lost);
    }
  }
};

}  // namespace

SucProblem build_suc(const SystemModel& model, const ScenarioTree& tree, const RollingState& state,
                     const FormulationOptions& opts) {
  return Builder(model, tree, state, opts).build();
}

NodeDecision decode(const SucProblem& p, const SystemModel& model, const ScenarioTree& tree,
                    const std::vector<double>& x, int node) {
  const auto& v = p.nodes.at(node);
  const auto& n = tree.nodes.at(node);
  NodeDecision d;
  for (std::size_t g = 0; g < model.thermal_classes.size(); ++g) {
    d.n_up.push_back(static_cast<int>(std::lround(x[v.n_up[g]])));
    d.n_sg.push_back(static_cast<int>(std::lround(x[v.n_sg[g]])));
    d.power.push_back(x[v.power[g]]);
    d.pfr.push_back(x[v.pfr[g]]);
  }
  for (std::size_t s = 0; s < model.storage.size(); ++s) {
    d.charge.push_back(x[v.charge[s]]);
    d.discharge.push_back(x[v.discharge[s]]);
    d.soc.push_back(x[v.soc[s]]);
    d.efr.push_back(x[p.efr[s]]);
  }
  d.wind_available = n.wind_available;
  d.wind_used = x[v.wind];
  d.wind_curtailed = n.wind_available - d.wind_used;
  d.load_shed = x[v.shed];
  d.spill = x[v.spill];
  d.demand = n.demand;
  return d;
}

}  // namespace fsuc
