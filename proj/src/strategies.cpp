#include "fsuc/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "fsuc/frequency.hpp"

namespace fsuc {

namespace {

constexpr int kWeek = 168;

FormulationOptions energy_only_options() {
  FormulationOptions o;
  o.fixed_efr_volume = 0.0;
  return o;
}

}  // namespace

CostBreakdown& CostBreakdown::operator+=(const CostBreakdown& o) {
  startup += o.startup;
  no_load += o.no_load;
  marginal += o.marginal;
  shed += o.shed;
  return *this;
}

CostBreakdown cost_breakdown(const SystemModel& model, const NodeDecision& d, double dt) {
  CostBreakdown c;
  for (std::size_t g = 0; g < model.thermal_classes.size(); ++g) {
    const auto& tc = model.thermal_classes[g];
    c.startup += tc.startup_cost * d.n_sg[g];
    c.no_load += dt * tc.no_load_cost * d.n_up[g];
    c.marginal += dt * tc.marginal_cost * d.power[g];
  }
  c.shed = dt * model.voll * d.load_shed;
  return c;
}

double RunResult::month_cost(int month) const {
  double c = 0.0;
  for (std::size_t t = 0; t < hours.size(); ++t)
    if (month_of_hour(hours[t]) == month) c += scale[t] * hourly_cost[t].total();
  return c;
}

Planner make_planner(const SystemModel& model, const FormulationOptions& opts, const SolverSettings& settings,
                     std::vector<SolveRecord>* log) {
  auto warm = std::make_shared<std::vector<lp::VarStatus>>();
  return [&model, opts, settings, log, warm](const ScenarioTree& tree, const RollingState& state) {
    auto p = build_suc(model, tree, state, opts);
    mip::SolveOptions so;
    so.gap_tol = settings.gap;
    so.node_limit = settings.node_limit;
    so.time_limit = settings.time_limit;
    so.warm_basis = *warm;
    auto sol = mip::solve(p.mip, so);
    if (sol.values.empty() || sol.status == mip::Status::Infeasible || sol.status == mip::Status::Unbounded)
      throw SolverFailure("hour " + std::to_string(tree.nodes.front().hour_index) + ": solver returned " +
                          mip::to_string(sol.status));
    *warm = std::move(sol.root_basis);
    if (log) log->push_back({sol.status, sol.mip_gap, sol.stats.nodes});
    StepResult r;
    r.root = decode(p, model, tree, sol.values, 0);
    r.cost = decision_cost(model, r.root, tree.nodes.front().interval);
    return r;
  };
}

MonthRun run_month(const SystemModel& model, int month, const FormulationOptions& opts, const RunConfig& cfg,
                   std::vector<SolveRecord>* log) {
  MonthRun mr;
  mr.month = month;
  const int len = month_hours(month);
  const int steps = cfg.full_month ? len : kWeek;
  mr.start_hour = month_start_hour(month) + (cfg.full_month ? 0 : kWeek);
  mr.scale = static_cast<double>(len) / steps;
  auto planner = make_planner(model, opts, cfg.solver, log);
  mr.schedule = rolling_plan(model, planner, mr.start_hour, steps, cfg.tree, RollingState::start(model));
  return mr;
}

RunResult collect(std::string label, const SystemModel& model, std::vector<MonthRun> months,
                  std::vector<SolveRecord> solves) {
  RunResult r;
  r.label = std::move(label);
  r.solves = std::move(solves);
  for (const auto& mr : months) {
    const auto& s = mr.schedule;
    for (std::size_t t = 0; t < s.hours.size(); ++t) {
      const auto& d = s.hours[t];
      r.hours.push_back(s.start_hour + static_cast<int>(t));
      r.decisions.push_back(d);
      r.scale.push_back(mr.scale);
      auto c = cost_breakdown(model, d);
      r.hourly_cost.push_back(c);
      CostBreakdown scaled{c.startup * mr.scale, c.no_load * mr.scale, c.marginal * mr.scale, c.shed * mr.scale};
      r.cost += scaled;
      r.inertia.push_back(system_inertia(d.n_up, model));
      double pfr = 0.0, efr = 0.0;
      for (double v : d.pfr) pfr += v;
      for (double v : d.efr) efr += v;
      r.pfr.push_back(pfr);
      r.efr.push_back(efr);
    }
  }
  r.months = std::move(months);
  return r;
}

RunResult run_energy_only(const SystemModel& model, const std::vector<int>& months, const RunConfig& cfg) {
  std::vector<MonthRun> runs;
  std::vector<SolveRecord> log;
  for (int m : months) runs.push_back(run_month(model, m, energy_only_options(), cfg, &log));
  return collect("energy-only", model, std::move(runs), std::move(log));
}

RunResult run_cooptimized(const SystemModel& model, const std::vector<int>& months, const RunConfig& cfg) {
  FormulationOptions o;
  o.frequency_constraints = true;
  if (cfg.efr_mode == EfrMode::None) o.fixed_efr_volume = 0.0;
  if (cfg.efr_mode == EfrMode::Fixed) o.fixed_efr_volume = cfg.efr_volume;
  std::vector<MonthRun> runs;
  std::vector<SolveRecord> log;
  for (int m : months) runs.push_back(run_month(model, m, o, cfg, &log));
  return collect("co-optimized", model, std::move(runs), std::move(log));
}

ResponseRequirement compute_response_requirement(const MonthRun& energy_only, const SystemModel& model,
                                                 double efr_volume) {
  const auto& hours = energy_only.schedule.hours;
  if (hours.empty()) throw std::invalid_argument("energy-only run has no hours");
  double floor = std::numeric_limits<double>::infinity();
  for (const auto& d : hours) floor = std::min(floor, system_inertia(d.n_up, model));
  ResponseRequirement r;
  r.efr_volume = efr_volume;
  r.inertia_floor = std::max(floor, min_inertia_for_rocof(model.freq));
  const double loss = model.freq.largest_loss;
  r.pfr_volume = loss > 0.0 ? std::max(min_pfr_for_nadir(r.inertia_floor, efr_volume, model.freq),
                                       std::max(0.0, loss - efr_volume))
                            : 0.0;
  return r;
}

RunResult run_unlinked(const SystemModel& model, const std::vector<int>& months, const RunConfig& cfg,
                       const RunResult* energy_only) {
  std::vector<MonthRun> runs;
  std::vector<SolveRecord> log;
  for (int m : months) {
    MonthRun base;
    const MonthRun* eo = nullptr;
    if (energy_only) {
      auto it = std::find_if(energy_only->months.begin(), energy_only->months.end(),
                             [&](const MonthRun& r) { return r.month == m; });
      if (it != energy_only->months.end()) eo = &*it;
    }
    if (!eo) {
      base = run_month(model, m, energy_only_options(), cfg);
      eo = &base;
    }
    auto req = compute_response_requirement(*eo, model, cfg.efr_volume);
    FormulationOptions o;
    o.fixed_efr_volume = req.efr_volume;
    o.fixed_pfr_requirement = req.pfr_volume;
    o.inertia_floor = req.inertia_floor;
    MonthRun mr = run_month(model, m, o, cfg, &log);
    mr.requirement = req;
    runs.push_back(std::move(mr));
  }
  return collect("unlinked", model, std::move(runs), std::move(log));
}

double cost_of_frequency_services(const RunResult& strategy, const RunResult& energy_only) {
  if (strategy.hours != energy_only.hours) throw std::invalid_argument("runs cover different hours");
  return strategy.total_cost() - energy_only.total_cost();
}

double cost_of_frequency_services(const SystemModel& model, const std::vector<int>& months, Strategy strategy,
                                  const RunConfig& cfg) {
  auto eo = run_energy_only(model, months, cfg);
  switch (strategy) {
    case Strategy::EnergyOnly: return 0.0;
    case Strategy::Cooptimized: return cost_of_frequency_services(run_cooptimized(model, months, cfg), eo);
    case Strategy::Unlinked: return cost_of_frequency_services(run_unlinked(model, months, cfg, &eo), eo);
  }
  return 0.0;
}

double overprocurement_ratio(const RunResult& run, const FrequencyParams& fp) {
  if (run.inertia.empty()) throw std::invalid_argument("run has no hours");
  const double floor = min_inertia_for_rocof(fp);
  if (!(floor > 0.0)) throw std::domain_error("RoCoF floor is zero: no largest loss");
  double s = 0.0;
  for (double h : run.inertia) s += h / floor;
  return s / static_cast<double>(run.inertia.size());
}

}  // namespace fsuc
