#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsuc/mip.hpp"
#include "fsuc/scenario.hpp"
#include "fsuc/suc.hpp"
#include "fsuc/system_model.hpp"

namespace fsuc {

// A rolling step ended without a usable incumbent.
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverSettings {
  double gap = 1e-3;
  long node_limit = 20;  // per step; keeps runs deterministic
  double time_limit = std::numeric_limits<double>::infinity();  // s per step
};

enum class EfrMode { None, Fixed, Optimized };

struct RunConfig {
  TreeConfig tree;
  SolverSettings solver;
  bool full_month = false;  // otherwise the second week of each month, scaled
  EfrMode efr_mode = EfrMode::Optimized;
  double efr_volume = 200.0;  // MW, for fixed EFR and the unlinked pipeline
};

struct CostBreakdown {
  double startup = 0.0;
  double no_load = 0.0;
  double marginal = 0.0;
  double shed = 0.0;
  [[nodiscard]] double total() const { return startup + no_load + marginal + shed; }
  CostBreakdown& operator+=(const CostBreakdown& o);
};

CostBreakdown cost_breakdown(const SystemModel& model, const NodeDecision& d, double dt = 1.0);

struct ResponseRequirement {
  double inertia_floor = 0.0;  // MW*s
  double pfr_volume = 0.0;     // MW
  double efr_volume = 0.0;     // MW
};

struct MonthRun {
  int month = 0;
  int start_hour = 0;
  double scale = 1.0;  // month hours / simulated hours
  Schedule schedule;
  std::optional<ResponseRequirement> requirement;  // unlinked runs only
};

struct SolveRecord {
  mip::Status status = mip::Status::Optimal;
  double gap = 0.0;
  long nodes = 0;
};

// Hour-level series are concatenated over months in run order.
struct RunResult {
  std::string label;
  std::vector<MonthRun> months;
  std::vector<int> hours;  // absolute hour of each committed decision
  std::vector<NodeDecision> decisions;
  std::vector<double> scale;  // per hour, the month scale
  std::vector<CostBreakdown> hourly_cost;
  std::vector<double> inertia, pfr, efr;  // per hour, MW*s and MW
  std::vector<SolveRecord> solves;
  CostBreakdown cost;  // scaled

  [[nodiscard]] double total_cost() const { return cost.total(); }
  [[nodiscard]] double month_cost(int month) const;
};

// Per-step solve callback: builds the SUC, solves it and decodes the root.
Planner make_planner(const SystemModel& model, const FormulationOptions& opts, const SolverSettings& settings,
                     std::vector<SolveRecord>* log = nullptr);

// Rolls one month (or its representative week) with fixed formulation options.
MonthRun run_month(const SystemModel& model, int month, const FormulationOptions& opts, const RunConfig& cfg,
                   std::vector<SolveRecord>* log = nullptr);

RunResult run_energy_only(const SystemModel& model, const std::vector<int>& months, const RunConfig& cfg);
RunResult run_cooptimized(const SystemModel& model, const std::vector<int>& months, const RunConfig& cfg);

// Energy-only floor lifted to the RoCoF floor, then the PFR volume that
// meets the nadir and q-s-s conditions at that floor.
ResponseRequirement compute_response_requirement(const MonthRun& energy_only, const SystemModel& model,
                                                 double efr_volume);

// Energy-only pass, requirement, then the month re-run under fixed volumes.
// A precomputed energy-only run for the same months is reused when given.
RunResult run_unlinked(const SystemModel& model, const std::vector<int>& months, const RunConfig& cfg,
                       const RunResult* energy_only = nullptr);

enum class Strategy { EnergyOnly, Cooptimized, Unlinked };

// Strategy cost minus energy-only cost, same seed and trace.
double cost_of_frequency_services(const RunResult& strategy, const RunResult& energy_only);
double cost_of_frequency_services(const SystemModel& model, const std::vector<int>& months, Strategy strategy,
                                  const RunConfig& cfg);

// Mean over hours of realised inertia over the RoCoF floor.
double overprocurement_ratio(const RunResult& run, const FrequencyParams& fp);

// Assembles the hour-level series of a run from its months.
RunResult collect(std::string label, const SystemModel& model, std::vector<MonthRun> months,
                  std::vector<SolveRecord> solves);

}  // namespace fsuc
