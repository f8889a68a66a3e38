#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fsuc/mip.hpp"
#include "fsuc/scenario.hpp"
#include "fsuc/system_model.hpp"

namespace fsuc {

struct OptionConflictError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct FormulationOptions {
  bool frequency_constraints = false;
  std::optional<double> fixed_pfr_requirement;  // MW, unlinked mode
  std::optional<double> fixed_efr_volume;       // MW; energy-only mode fixes 0
  std::optional<double> inertia_floor;          // MW*s, unlinked mode
  // Leaves must end with at least this share of each store's energy.
  double terminal_soc_fraction = 0.5;
};

// Start-up, no-load and marginal cost of one class at one node, GBP.
double node_cost(const ThermalClass& tc, int n_up, int n_sg, double power, double dt);

// Sum of H * rating * n_up, less one unit of the lost class when it is online.
double system_inertia(std::span<const int> n_up, std::span<const ThermalClass> classes, int lost_class);
double system_inertia(std::span<const int> n_up, const SystemModel& model);

// Thermal costs plus load shedding at VoLL for one node.
double decision_cost(const SystemModel& model, const NodeDecision& d, double dt);

struct SucNodeVars {
  std::vector<int> n_up, n_sg, power, pfr;
  std::vector<int> charge, discharge, soc;
  int wind = -1, shed = -1, spill = -1;
  int x = -1, y = -1;  // cone sides, -1 without frequency rows
};

struct SucProblem {
  mip::MipProblem mip;
  std::vector<SucNodeVars> nodes;
  std::vector<int> efr;  // root-stage, per storage unit
  int z = -1;
};

SucProblem build_suc(const SystemModel& model, const ScenarioTree& tree, const RollingState& state,
                     const FormulationOptions& opts);

NodeDecision decode(const SucProblem& p, const SystemModel& model, const ScenarioTree& tree,
                    const std::vector<double>& x, int node);

}  // namespace fsuc
