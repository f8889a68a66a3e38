#include <doctest.h>

#include <cmath>

#include "fsuc/frequency.hpp"
#include "fsuc/suc.hpp"

using namespace fsuc;

namespace {

ScenarioTree one_node(double demand, double wind = 0.0) {
  ScenarioTree t;
  ScenarioNode n;
  n.demand = demand;
  n.wind_available = wind;
  t.nodes.push_back(n);
  t.horizon = 0;
  return t;
}

SystemModel ccgt_only() {
  SystemModel m;
  m.thermal_classes = {gb_thermal_classes(1800)[1]};
  return m;
}

mip::Solution exact(const SucProblem& p) {
  mip::SolveOptions o;
  o.gap_tol = 0.0;
  return mip::solve(p.mip, o);
}

ScenarioTree gb_tree(const SystemModel& m, int hour, int horizon) {
  TreeConfig cfg;
  cfg.horizon = horizon;
  return build_tree(tree_input(m, hour, cfg), cfg);
}

// Probability-weighted cost of every node from decoded values.
double recomputed_objective(const SucProblem& p, const SystemModel& m, const ScenarioTree& t,
                            const std::vector<double>& x) {
  double total = 0.0;
  for (const auto& n : t.nodes) {
    auto d = decode(p, m, t, x, n.id);
    double c = m.voll * d.load_shed * n.interval;
    for (std::size_t g = 0; g < m.thermal_classes.size(); ++g) {
      const auto& tc = m.thermal_classes[g];
      c += tc.startup_cost * x[p.nodes[n.id].n_sg[g]] +
           n.interval * (tc.no_load_cost * x[p.nodes[n.id].n_up[g]] + tc.marginal_cost * d.power[g]);
    }
    total += n.probability * c;
  }
  return total;
}

}  // namespace

TEST_CASE("node cost") {
  auto cls = gb_thermal_classes(1800);
  CHECK(node_cost(cls[1], 10, 2, 3000.0, 1.0) == 239090.0);
  CHECK(node_cost(cls[1], 0, 0, 0.0, 1.0) == 0.0);
  CHECK(node_cost(cls[0], 4, 0, 7200.0, 1.0) == 72000.0);
  CHECK(node_cost(cls[1], 10, 2, 3000.0, 0.5) == 20000.0 + 0.5 * 219090.0);
}

TEST_CASE("system inertia excludes the lost unit") {
  auto m = gb_system(50000, 1800, 1);
  CHECK(system_inertia(std::vector<int>{0, 92, 0}, m.thermal_classes, -1) == 230000.0);
  CHECK(system_inertia(std::vector<int>{0, 0, 0}, m) == 0.0);
  CHECK(system_inertia(std::vector<int>{4, 0, 0}, m) == 27000.0);
  CHECK(system_inertia(std::vector<int>{4, 92, 0}, m) == 257000.0);
  auto cur = gb_system(25000, 1320, 1);
  CHECK(system_inertia(std::vector<int>{1, 10, 2}, cur) == 10 * 2500.0 + 2 * 500.0);
}

TEST_CASE("600 MW on one CCGT class needs two units") {
  auto m = ccgt_only();
  const auto& c = m.thermal_classes[0];
  auto t = one_node(600.0);
  auto p = build_suc(m, t, RollingState::start(m), {});
  auto s = exact(p);
  REQUIRE(s.status == mip::Status::Optimal);
  auto d = decode(p, m, t, s.values, 0);
  // Enumerate the unit count; the free first hour makes start-ups costless.
  double best = mip::kInf;
  int arg = -1;
  for (int n = 0; n <= 3; ++n) {
    double lo = n * c.min_stable_gen, hi = n * c.rated_power;
    double gen = std::clamp(600.0, lo, hi);
    double spill = std::max(0.0, gen - 600.0);
    (void)spill;
    double cost = n * c.no_load_cost + c.marginal_cost * gen + m.voll * std::max(0.0, 600.0 - hi);
    if (cost < best) {
      best = cost;
      arg = n;
    }
  }
  CHECK(arg == 2);
  CHECK(d.n_up[0] == 2);
  CHECK(s.objective == doctest::Approx(2 * 7809.0 + 47.0 * 600.0).epsilon(1e-9));
  CHECK(s.objective == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("zero demand with nothing committed costs nothing") {
  auto m = ccgt_only();
  auto t = one_node(0.0);
  auto p = build_suc(m, t, RollingState::start(m), {});
  auto s = exact(p);
  REQUIRE(s.status == mip::Status::Optimal);
  CHECK(s.objective == 0.0);
  for (double v : s.values) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("forcing inertia to the RoCoF floor with 200 MW EFR needs 4.6 GW of PFR") {
  // Inertia comes from a fixed block; response from inertia-free units.
  SystemModel m;
  m.thermal_classes = {
      ThermalClass{.name = "lost", .unit_count = 1, .rated_power = 1800.0, .min_stable_gen = 1.0, .must_run = true},
      ThermalClass{.name = "block", .unit_count = 36, .rated_power = 500.0, .min_stable_gen = 1.0, .inertia_const = 5.0, .must_run = true},
      ThermalClass{.name = "resp",
                   .unit_count = 100,
                   .rated_power = 100.0,
                   .min_stable_gen = 1e-3,
                   .no_load_cost = 1.0,
                   .max_response = 100.0,
                   .response_slope = 1.0},
  };
  m.storage = {StorageUnit{.name = "bat", .power_cap = 200.0, .energy_cap = 100.0, .efr_capacity = 200.0}};
  m.freq.largest_loss = 1800.0;
  m.largest_infeed_class = "lost";
  validate(m);
  auto t = one_node(0.0);
  FormulationOptions o;
  o.frequency_constraints = true;
  o.fixed_efr_volume = 200.0;
  o.terminal_soc_fraction = 0.0;
  auto p = build_suc(m, t, RollingState::start(m), o);
  for (int r : p.nodes[0].pfr) p.mip.set_cost(r, 1e-3);
  auto s = exact(p);
  REQUIRE(s.status == mip::Status::Optimal);
  auto d = decode(p, m, t, s.values, 0);
  CHECK(system_inertia(d.n_up, m) == 90000.0);
  double pfr = d.pfr[0] + d.pfr[1] + d.pfr[2];
  const auto& fp = m.freq;
  double oracle = (1600.0 * 1600.0 * fp.t_pfr / (4 * fp.delta_f_max)) /
                  (90000.0 / fp.f0 - 200.0 * fp.t_efr / (4 * fp.delta_f_max));
  CHECK(pfr == doctest::Approx(4604.0).epsilon(1e-3));
  CHECK(pfr == doctest::Approx(oracle).epsilon(1e-5));
  CHECK(d.n_up[2] == 47);
}

TEST_CASE("frequency constraints and a fixed PFR requirement conflict") {
  auto m = gb_system(50000, 1800, 1);
  auto t = gb_tree(m, 500, 2);
  FormulationOptions o;
  o.frequency_constraints = true;
  o.fixed_pfr_requirement = 1000.0;
  CHECK_THROWS_AS(build_suc(m, t, RollingState::start(m), o), OptionConflictError);
  FormulationOptions big;
  big.fixed_efr_volume = 500.0;
  CHECK_THROWS_AS(build_suc(m, t, RollingState::start(m), big), OptionConflictError);
}

TEST_CASE("objective equals the recomputed expected cost") {
  auto m = gb_system(50000, 1800, 1);
  for (bool freq : {false, true}) {
    CAPTURE(freq);
    auto t = gb_tree(m, 2000, 24);
    FormulationOptions o;
    o.frequency_constraints = freq;
    auto p = build_suc(m, t, RollingState::start(m), o);
    mip::SolveOptions so;
    so.node_limit = 20;
    auto s = mip::solve(p.mip, so);
    REQUIRE_FALSE(s.values.empty());
    CHECK(p.mip.max_violation(s.values) <= 1e-6);
    double re = recomputed_objective(p, m, t, s.values);
    CHECK(std::abs(re - s.objective) <= 1e-6 * std::abs(s.objective));
  }
}

TEST_CASE("decoded nodes of a co-optimized solve are frequency secure") {
  for (auto [wind, loss] : {std::pair{50000.0, 1800.0}, std::pair{25000.0, 1320.0}}) {
    auto m = gb_system(wind, loss, 1);
    const auto& fp = m.freq;
    auto t = gb_tree(m, 4000, 24);
    FormulationOptions o;
    o.frequency_constraints = true;
    auto p = build_suc(m, t, RollingState::start(m), o);
    mip::SolveOptions so;
    so.node_limit = 20;
    auto s = mip::solve(p.mip, so);
    REQUIRE_FALSE(s.values.empty());
    for (const auto& n : t.nodes) {
      auto d = decode(p, m, t, s.values, n.id);
      ServicePoint sp{system_inertia(d.n_up, m), 0.0, 0.0};
      for (double v : d.efr) sp.efr += v;
      for (double v : d.pfr) sp.pfr += v;
      CHECK(sp.efr <= 200.0 + 1e-9);
      CHECK(sp.inertia >= min_inertia_for_rocof(fp) * (1 - 1e-9));
      CHECK(check_nadir(sp, fp) >= -1e-4 * sp.pfr * sp.inertia / fp.f0);
      CHECK(check_qss(sp.efr, sp.pfr * (1 + 1e-9), fp.largest_loss));
      auto traj = simulate_post_fault(sp, fp, 1e-2);
      CHECK(traj.nadir_dev <= fp.delta_f_max + 2e-3);
      CHECK(traj.initial_rocof <= fp.rocof_max + 1e-6);
    }
  }
}

TEST_CASE("scaling every probability leaves the decisions unchanged") {
  auto m = gb_system(50000, 1800, 1);
  auto t = gb_tree(m, 3000, 6);
  FormulationOptions o;
  o.frequency_constraints = true;
  auto p = build_suc(m, t, RollingState::start(m), o);
  auto scaled_tree = t;
  for (auto& n : scaled_tree.nodes) n.probability *= 2.5;
  auto q = build_suc(m, scaled_tree, RollingState::start(m), o);
  mip::SolveOptions so;
  so.gap_tol = 1e-9;
  so.node_limit = 5000;
  auto a = mip::solve(p.mip, so), b = mip::solve(q.mip, so);
  REQUIRE(a.status == mip::Status::Optimal);
  REQUIRE(b.status == mip::Status::Optimal);
  CHECK(b.objective == doctest::Approx(2.5 * a.objective).epsilon(1e-7));
  for (const auto& n : t.nodes) {
    auto da = decode(p, m, t, a.values, n.id), db = decode(q, m, scaled_tree, b.values, n.id);
    CHECK(da.n_up == db.n_up);
    CHECK(da.n_sg == db.n_sg);
  }
}

TEST_CASE("unlinked rows hold at every node") {
  auto m = gb_system(50000, 1800, 1);
  auto t = gb_tree(m, 6000, 24);
  FormulationOptions o;
  o.fixed_efr_volume = 200.0;
  o.fixed_pfr_requirement = 4604.3;
  o.inertia_floor = 90000.0;
  auto p = build_suc(m, t, RollingState::start(m), o);
  mip::SolveOptions so;
  so.node_limit = 20;
  auto s = mip::solve(p.mip, so);
  REQUIRE_FALSE(s.values.empty());
  for (const auto& n : t.nodes) {
    auto d = decode(p, m, t, s.values, n.id);
    double pfr = 0.0;
    for (double v : d.pfr) pfr += v;
    CHECK(pfr >= 4604.3 - 1e-5);
    CHECK(system_inertia(d.n_up, m) >= 90000.0);
    CHECK(d.efr[0] + d.efr[1] == doctest::Approx(200.0));
    CHECK(d.n_up[1] >= 93);  // ceil(4604.3 / 50) CCGTs at most 50 MW each
  }
}
