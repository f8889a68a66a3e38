#include <doctest.h>

#include <cmath>

#include "fsuc/frequency.hpp"
#include "fsuc/strategies.hpp"
#include "fsuc/validate.hpp"

using namespace fsuc;

namespace {

MonthRun month_with_inertia(const std::vector<std::vector<int>>& n_up) {
  MonthRun mr;
  mr.month = 1;
  for (const auto& u : n_up) {
    NodeDecision d;
    d.n_up = u;
    mr.schedule.hours.push_back(d);
  }
  return mr;
}

// Hand evaluation of the nadir and q-s-s conditions.
double pfr_oracle(double h, double efr, const FrequencyParams& fp) {
  double k = 4.0 * fp.delta_f_max;
  double nadir = (fp.largest_loss - efr) * (fp.largest_loss - efr) * fp.t_pfr / k / (h / fp.f0 - efr * fp.t_efr / k);
  return std::max(nadir, fp.largest_loss - efr);
}

// A small system whose must-run block carries ample inertia and whose store
// covers the whole loss with fast response.
SystemModel slack_frequency_model() {
  SystemModel m;
  m.thermal_classes = {
      ThermalClass{.name = "block",
                   .unit_count = 2,
                   .rated_power = 400.0,
                   .min_stable_gen = 100.0,
                   .marginal_cost = 5.0,
                   .inertia_const = 50.0,
                   .must_run = true},
      ThermalClass{.name = "gas",
                   .unit_count = 10,
                   .rated_power = 100.0,
                   .min_stable_gen = 40.0,
                   .no_load_cost = 300.0,
                   .marginal_cost = 40.0,
                   .startup_cost = 1000.0,
                   .startup_time = 2,
                   .min_up = 2,
                   .min_down = 1,
                   .inertia_const = 5.0},
  };
  m.storage = {StorageUnit{.name = "bat", .power_cap = 100.0, .energy_cap = 10.0, .round_trip_eff = 0.9,
                           .efr_capacity = 50.0}};
  m.freq.largest_loss = 20.0;
  m.wind_capacity = 300.0;
  auto p = synth_year(4, 900.0, 300.0);
  m.demand_series = std::move(p.demand);
  m.wind_cf_series = std::move(p.wind_cf);
  validate(m);
  return m;
}

RunConfig quick() {
  RunConfig cfg;
  cfg.tree.horizon = 6;
  return cfg;
}

}  // namespace

TEST_CASE("response requirement below the RoCoF floor") {
  auto m = gb_system(50000, 1800, 1);
  auto req = compute_response_requirement(month_with_inertia({{4, 10, 0}, {4, 30, 0}}), m, 200.0);
  CHECK(req.inertia_floor == 90000.0);
  CHECK(req.efr_volume == 200.0);
  CHECK(req.pfr_volume == doctest::Approx(4604.0).epsilon(1e-3));
  CHECK(req.pfr_volume == doctest::Approx(pfr_oracle(90000.0, 200.0, m.freq)).epsilon(1e-12));
}

TEST_CASE("response requirement above the RoCoF floor") {
  auto m = gb_system(50000, 1800, 1);
  auto req = compute_response_requirement(month_with_inertia({{0, 92, 0}, {4, 100, 0}}), m, 200.0);
  CHECK(req.inertia_floor == 230000.0);
  CHECK(req.pfr_volume == doctest::Approx(1763.0).epsilon(5e-4));
  CHECK(req.pfr_volume == doctest::Approx(pfr_oracle(230000.0, 200.0, m.freq)).epsilon(1e-12));
  CHECK(req.pfr_volume > m.freq.largest_loss - 200.0);
  auto all_efr = compute_response_requirement(month_with_inertia({{4, 10, 0}}), m, 1800.0);
  CHECK(all_efr.pfr_volume == 0.0);
  CHECK_THROWS_AS(compute_response_requirement(MonthRun{}, m, 200.0), std::invalid_argument);
}

TEST_CASE("requirement satisfies the security conditions at its floor") {
  for (double loss : {1320.0, 1800.0}) {
    auto m = gb_system(25000, loss, 1);
    for (double efr : {0.0, 100.0, 200.0, 1000.0}) {
      for (int ccgt : {0, 30, 60, 90}) {
        auto req = compute_response_requirement(month_with_inertia({{1, ccgt, 0}}), m, efr);
        ServicePoint sp{req.inertia_floor, req.efr_volume, req.pfr_volume};
        CHECK(req.inertia_floor >= min_inertia_for_rocof(m.freq));
        CHECK(check_nadir(sp, m.freq) >= -1e-6 * req.pfr_volume);
        CHECK(check_qss(sp.efr, sp.pfr * (1 + 1e-12), loss));
      }
    }
  }
}

TEST_CASE("overprocurement ratio") {
  FrequencyParams fp;
  fp.largest_loss = 1800.0;
  RunResult r;
  r.inertia.assign(5, 230000.0);
  CHECK(overprocurement_ratio(r, fp) == doctest::Approx(230.0 / 90.0));
  CHECK(overprocurement_ratio(r, fp) == doctest::Approx(2.5).epsilon(0.04));
  r.inertia.assign(3, 90000.0);
  CHECK(overprocurement_ratio(r, fp) == 1.0);
  fp.largest_loss = 0.0;
  CHECK_THROWS_AS(overprocurement_ratio(r, fp), std::domain_error);
  CHECK_THROWS_AS(overprocurement_ratio(RunResult{}, FrequencyParams{.largest_loss = 1.0}), std::invalid_argument);
}

TEST_CASE("zero-demand month costs only the must-run output") {
  auto m = gb_system(50000, 1800, 1);
  std::fill(m.demand_series.begin(), m.demand_series.end(), 0.0);
  std::fill(m.wind_cf_series.begin(), m.wind_cf_series.end(), 0.0);
  auto r = run_energy_only(m, {2}, quick());
  REQUIRE(r.hours.size() == 168);
  CHECK(r.total_cost() == doctest::Approx(4 * 1800.0 * 10.0 * month_hours(2)).epsilon(1e-9));
  CHECK(r.cost.startup == 0.0);
  CHECK(r.cost.no_load == 0.0);
  CHECK(r.cost.shed == 0.0);
}

TEST_CASE("cost breakdown adds up and matches the decision cost") {
  auto m = gb_system(25000, 1320, 2);
  RunConfig cfg = quick();
  auto r = run_energy_only(m, {7}, cfg);
  REQUIRE(r.hours.size() == 168);
  CHECK(r.decisions.size() == r.hours.size());
  CHECK(r.inertia.size() == r.hours.size());
  CHECK(r.pfr.size() == r.hours.size());
  CHECK(r.solves.size() == r.hours.size());
  double total = 0.0;
  for (std::size_t t = 0; t < r.hours.size(); ++t) {
    CHECK(r.hourly_cost[t].total() == doctest::Approx(decision_cost(m, r.decisions[t], 1.0)).epsilon(1e-12));
    CHECK(r.hours[t] == month_start_hour(7) + 168 + static_cast<int>(t));
    total += r.scale[t] * r.hourly_cost[t].total();
  }
  CHECK(r.scale.front() == doctest::Approx(31.0 * 24 / 168));
  CHECK(r.total_cost() == doctest::Approx(total).epsilon(1e-9));
  CHECK(r.month_cost(7) == doctest::Approx(total).epsilon(1e-9));
  CHECK(r.month_cost(8) == 0.0);
  CHECK(check_schedule(m, r.months[0].schedule).empty());
}

TEST_CASE("slack frequency constraints cost nothing") {
  auto m = slack_frequency_model();
  RunConfig cfg = quick();
  auto eo = run_energy_only(m, {4}, cfg);
  auto co = run_cooptimized(m, {4}, cfg);
  double fs = cost_of_frequency_services(co, eo);
  CHECK(std::abs(fs) <= 2.0 * cfg.solver.gap * eo.total_cost());
}

TEST_CASE("co-optimized dominates unlinked on a future-system week") {
  auto m = gb_system(50000, 1800, 1);
  RunConfig cfg = quick();
  auto eo = run_energy_only(m, {5}, cfg);
  auto co = run_cooptimized(m, {5}, cfg);
  auto un = run_unlinked(m, {5}, cfg, &eo);
  const double allowance = 2.0 * cfg.solver.gap;
  CHECK(co.total_cost() <= un.total_cost() * (1.0 + allowance));
  CHECK(cost_of_frequency_services(co, eo) >= -allowance * eo.total_cost());
  CHECK(cost_of_frequency_services(un, eo) > cost_of_frequency_services(co, eo));

  REQUIRE(un.months[0].requirement.has_value());
  const auto req = *un.months[0].requirement;
  CHECK(req.efr_volume == 200.0);
  SecurityRules rules{.pfr_volume = req.pfr_volume, .efr_volume = req.efr_volume, .inertia_floor = req.inertia_floor};
  CHECK(check_schedule(m, un.months[0].schedule, rules).empty());
  CHECK(check_schedule(m, co.months[0].schedule, {.frequency = true}).empty());
  for (std::size_t t = 0; t < un.hours.size(); ++t) {
    CHECK(un.decisions[t].n_up[1] >= static_cast<int>(std::ceil(req.pfr_volume / 50.0)));
    CHECK(co.efr[t] <= 200.0 + 1e-9);
    for (const auto* r : {&co, &un}) {
      ServicePoint sp{r->inertia[t], r->efr[t], r->pfr[t]};
      auto traj = simulate_post_fault(sp, m.freq, 1e-2);
      CHECK(traj.nadir_dev <= m.freq.delta_f_max + 2e-3);
      CHECK(traj.initial_rocof <= m.freq.rocof_max + 1e-6);
    }
  }
  CHECK_THROWS_AS(cost_of_frequency_services(co, run_energy_only(m, {6}, cfg)), std::invalid_argument);
}
