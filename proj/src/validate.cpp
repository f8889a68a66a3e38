#include "fsuc/validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fsuc/frequency.hpp"

namespace fsuc {

namespace {

class Checker {
 public:
  Checker(const SystemModel& m, const Schedule& s, const SecurityRules& r, double tol)
      : m_(m), s_(s), r_(r), tol_(tol) {}

  std::vector<std::string> run() {
    const std::size_t G = m_.thermal_classes.size();
    starts_.assign(G, {});
    online_.assign(G, {});
    for (std::size_t t = 0; t < s_.hours.size(); ++t) {
      hour_ = static_cast<int>(t);
      const auto& d = s_.hours[t];
      if (d.n_up.size() != G || d.soc.size() != m_.storage.size()) {
        fail("decision vector sizes do not match the model");
        continue;
      }
      check_units(d);
      check_storage(d);
      check_balance(d);
      check_commitment(d);
      check_security(d);
      for (std::size_t g = 0; g < G; ++g) {
        starts_[g].push_back(d.n_sg[g]);
        online_[g].push_back(d.n_up[g]);
      }
    }
    return std::move(out_);
  }

 private:
  const SystemModel& m_;
  const Schedule& s_;
  const SecurityRules& r_;
  double tol_;
  int hour_ = 0;
  std::vector<std::string> out_;
  std::vector<std::vector<int>> starts_, online_;

  void fail(const std::string& what) {
    std::ostringstream os;
    os << "hour " << s_.start_hour + hour_ << ": " << what;
    out_.push_back(os.str());
  }
  [[nodiscard]] bool le(double a, double b) const { return a <= b + tol_ * std::max({1.0, std::abs(a), std::abs(b)}); }

  void check_units(const NodeDecision& d) {
    for (std::size_t g = 0; g < m_.thermal_classes.size(); ++g) {
      const auto& tc = m_.thermal_classes[g];
      const std::string n = tc.name;
      if (d.n_up[g] < 0 || d.n_up[g] > tc.unit_count) fail(n + " n_up out of range");
      if (d.n_sg[g] < 0) fail(n + " negative start-ups");
      if (tc.must_run && d.n_up[g] != tc.unit_count) fail(n + " must-run units offline");
      if (!le(tc.min_stable_gen * d.n_up[g], d.power[g])) fail(n + " below minimum stable generation");
      if (!le(d.power[g], tc.rated_power * d.n_up[g])) fail(n + " above rated power");
      if (!le(0.0, d.pfr[g])) fail(n + " negative PFR");
      if (!le(d.pfr[g], tc.max_response * d.n_up[g])) fail(n + " PFR above max response");
      if (!le(d.pfr[g], tc.response_slope * (tc.rated_power * d.n_up[g] - d.power[g])))
        fail(n + " PFR above slope times headroom");
    }
  }

  void check_storage(const NodeDecision& d) {
    for (std::size_t s = 0; s < m_.storage.size(); ++s) {
      const auto& st = m_.storage[s];
      const std::string n = st.name;
      if (!le(0.0, d.charge[s]) || !le(d.charge[s], st.power_cap)) fail(n + " charge out of range");
      if (!le(0.0, d.discharge[s]) || !le(d.discharge[s], st.power_cap)) fail(n + " discharge out of range");
      if (!le(0.0, d.soc[s]) || !le(d.soc[s], st.energy_cap)) fail(n + " state of charge out of range");
      if (!le(0.0, d.efr[s]) || !le(d.efr[s], st.efr_capacity)) fail(n + " EFR out of range");
      if (st.efr_capacity > 0.0 && !le(d.efr[s] + d.discharge[s], st.power_cap)) fail(n + " EFR plus discharge above cap");
      double prev = hour_ == 0 ? s_.initial_state.soc[s] : s_.hours[hour_ - 1].soc[s];
      double eta = std::sqrt(st.round_trip_eff);
      double expect = prev + eta * d.charge[s] - d.discharge[s] / eta;
      if (std::abs(expect - d.soc[s]) > tol_ * std::max(1.0, st.energy_cap)) fail(n + " state of charge discontinuity");
    }
  }

  void check_balance(const NodeDecision& d) {
    const int hour = s_.start_hour + hour_;
    double demand = m_.demand_series.at(hour);
    double avail = m_.wind_capacity * m_.wind_cf_series.at(hour);
    if (std::abs(d.demand - demand) > tol_ * std::max(1.0, demand)) fail("demand differs from the actual series");
    if (!le(d.wind_used, avail) || !le(0.0, d.wind_used)) fail("wind used outside [0, available]");
    if (!le(0.0, d.load_shed) || !le(d.load_shed, demand)) fail("load shed out of range");
    if (!le(0.0, d.spill)) fail("negative spill");
    double supply = d.wind_used + d.load_shed - d.spill;
    for (double p : d.power) supply += p;
    for (std::size_t s = 0; s < m_.storage.size(); ++s) supply += d.discharge[s] - d.charge[s];
    if (std::abs(supply - demand) > tol_ * std::max(1.0, demand)) fail("power balance violated");
  }

  // Start-ups decided at schedule hour t - lag, or pending in the initial state.
  [[nodiscard]] int arrivals_at(std::size_t g, int t) const {
    const int lag = m_.thermal_classes[g].startup_time;
    const int src = t - lag;
    if (src >= 0) return lag == 0 ? s_.hours[t].n_sg[g] : starts_[g][src];
    // Pending queue of the initial state: index t arrives t hours in.
    const auto& pend = s_.initial_state.pending[g];
    return t < static_cast<int>(pend.size()) ? pend[t] : 0;
  }

  [[nodiscard]] int prev_online(std::size_t g, int t) const {
    return t == 0 ? s_.initial_state.n_up[g] : s_.hours[t - 1].n_up[g];
  }

  // Arrivals/shut-downs at schedule hour t, including pre-schedule history.
  [[nodiscard]] int arrivals_hist(std::size_t g, int t) const {
    if (t >= 0) {
      if (t == 0 && s_.initial_state.initial) return 0;
      return arrivals_at(g, t);
    }
    const auto& h = s_.initial_state.arrivals[g];
    int back = -t;
    return back <= static_cast<int>(h.size()) ? h[h.size() - back] : 0;
  }
  [[nodiscard]] int shutdowns_hist(std::size_t g, int t) const {
    if (t >= 0) {
      if (t == 0 && s_.initial_state.initial) return 0;
      return std::max(0, prev_online(g, t) + arrivals_at(g, t) - s_.hours[t].n_up[g]);
    }
    const auto& h = s_.initial_state.shutdowns[g];
    int back = -t;
    return back <= static_cast<int>(h.size()) ? h[h.size() - back] : 0;
  }

  void check_commitment(const NodeDecision& d) {
    for (std::size_t g = 0; g < m_.thermal_classes.size(); ++g) {
      const auto& tc = m_.thermal_classes[g];
      if (tc.must_run) continue;
      const int t = hour_;
      if (!(t == 0 && s_.initial_state.initial)) {
        if (d.n_up[g] - prev_online(g, t) > arrivals_at(g, t)) fail(tc.name + " units online without a start-up");
      }
      if (tc.min_up >= 1) {
        int recent = 0;
        for (int k = 0; k < tc.min_up; ++k) recent += arrivals_hist(g, t - k);
        if (recent > d.n_up[g]) fail(tc.name + " minimum up time violated");
      }
      if (tc.min_down >= 1) {
        int down = 0;
        for (int k = 0; k < tc.min_down; ++k) down += shutdowns_hist(g, t - k);
        if (d.n_up[g] + down > tc.unit_count) fail(tc.name + " minimum down time violated");
      }
    }
  }

  [[nodiscard]] double inertia(const NodeDecision& d) const {
    double h = 0.0;
    for (std::size_t g = 0; g < m_.thermal_classes.size(); ++g) {
      const auto& tc = m_.thermal_classes[g];
      double unit = tc.inertia_const * tc.rated_power;
      h += unit * d.n_up[g];
      bool lost = m_.largest_infeed_class.empty() ? (m_.freq.largest_loss > 0.0 && tc.rated_power == m_.freq.largest_loss)
                                                  : tc.name == m_.largest_infeed_class;
      if (lost && d.n_up[g] > 0) h -= unit;
    }
    return h;
  }

  void check_security(const NodeDecision& d) {
    double pfr = 0.0, efr = 0.0;
    for (double v : d.pfr) pfr += v;
    for (double v : d.efr) efr += v;
    const double h = inertia(d);
    const auto& fp = m_.freq;
    if (r_.frequency && fp.largest_loss > 0.0) {
      if (!le(min_inertia_for_rocof(fp), h)) fail("inertia below the RoCoF floor");
      const double u = fp.largest_loss - efr;
      const double rhs = u * u * fp.t_pfr / (4.0 * fp.delta_f_max);
      if (check_nadir({h, efr, pfr}, fp) < -1e2 * tol_ * std::max(1.0, rhs)) fail("nadir condition violated");
      if (!check_qss(efr, pfr, fp.largest_loss - tol_ * fp.largest_loss)) fail("q-s-s condition violated");
    }
    if (r_.pfr_volume && !le(*r_.pfr_volume, pfr)) fail("PFR below the procured volume");
    if (r_.efr_volume && std::abs(efr - *r_.efr_volume) > tol_ * std::max(1.0, *r_.efr_volume))
      fail("EFR differs from the procured volume");
    if (r_.inertia_floor && !le(*r_.inertia_floor, h)) fail("inertia below the procured floor");
  }
};

}  // namespace

std::vector<std::string> check_schedule(const SystemModel& model, const Schedule& schedule, const SecurityRules& rules,
                                        double tol) {
  return Checker(model, schedule, rules, tol).run();
}

}  // namespace fsuc
