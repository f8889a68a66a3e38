#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fsuc/system_model.hpp"

namespace fsuc {

struct InvalidQuantileError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct WeightSumError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ScenarioNode {
  int id = 0;
  int parent = -1;           // -1 for the root
  double probability = 1.0;  // of reaching the node
  double interval = 1.0;     // h
  int hour_index = 0;        // absolute hour
  int depth = 0;             // hours after the root
  int branch = 0;            // quantile index, 0 before branching
  double wind_available = 0.0;  // MW
  double demand = 0.0;          // MW
};

// Nodes are topologically ordered with the root first.
struct ScenarioTree {
  std::vector<ScenarioNode> nodes;
  int horizon = 0;
  int branch_stage = 1;

  [[nodiscard]] std::vector<int> leaves() const;
  // Node ids on the path from `id` up to the root, `id` first.
  [[nodiscard]] std::vector<int> path_to_root(int id) const;
};

// AR(1) on the wind capacity factor around a slowly varying mean.
struct ErrorModel {
  double persistence = 0.95;
  double innovation_sd = 0.15 * 0.31224989991991992;  // 0.15 marginal sd at phi = 0.95
  int mean_window = 720;                              // h of history used for the mean
};

struct TreeConfig {
  std::vector<double> quantiles{0.01, 0.5, 0.99};
  std::vector<double> weights;  // empty: midpoint rule
  int horizon = 24;
  int branch_stage = 1;
  ErrorModel error;
};

// Branch masses from quantile midpoints: [0, (q1+q2)/2], ..., [(q_{K-1}+q_K)/2, 1].
std::vector<double> midpoint_weights(std::span<const double> quantiles);

struct TreeInput {
  int hour = 0;                   // absolute hour of the root
  double wind_cf_now = 0.0;       // realised capacity factor at the root
  double mean_cf = 0.0;           // level the forecast reverts to
  std::span<const double> demand; // MW, hours hour .. hour + horizon
  double wind_capacity = 0.0;     // MW
};

ScenarioTree build_tree(const TreeInput& in, const TreeConfig& cfg);

// Tree input for `hour` from the model's series; the reversion mean is the
// average capacity factor over the trailing error.mean_window hours.
TreeInput tree_input(const SystemModel& model, int hour, const TreeConfig& cfg);

void write_tree_csv(const std::filesystem::path& path, const ScenarioTree& tree);

// Committed decision for one node.
struct NodeDecision {
  std::vector<int> n_up, n_sg;       // per thermal class
  std::vector<double> power, pfr;    // per thermal class, MW
  std::vector<double> charge, discharge, soc, efr;  // per storage unit
  double wind_available = 0.0;
  double wind_used = 0.0;
  double wind_curtailed = 0.0;
  double load_shed = 0.0;
  double spill = 0.0;  // must-run output above demand
  double demand = 0.0;
};

// Inter-temporal state carried between rolling steps.
struct RollingState {
  bool initial = true;  // commitment at the first hour is free
  std::vector<int> n_up;                   // per class, previous hour
  std::vector<std::vector<int>> pending;   // [class][k]: start-ups arriving k hours after the next root
  std::vector<std::vector<int>> arrivals;  // [class]: past arrivals, most recent last
  std::vector<std::vector<int>> shutdowns; // [class]: past shut-downs, most recent last
  std::vector<double> soc;                 // MWh per storage unit

  // Storage at 50%, nothing pending.
  static RollingState start(const SystemModel& model);
  // Arrivals at the root of the next step for class g.
  [[nodiscard]] int arriving_now(std::size_t g) const;
};

struct StepResult {
  NodeDecision root;
  double cost = 0.0;  // realised cost of the root hour
};

using Planner = std::function<StepResult(const ScenarioTree&, const RollingState&)>;

struct Schedule {
  int start_hour = 0;
  std::vector<NodeDecision> hours;
  std::vector<double> costs;
  RollingState initial_state;
  RollingState final_state;
};

// Applies a committed root decision to the state.
void advance_state(RollingState& state, const SystemModel& model, const NodeDecision& root);

Schedule rolling_plan(const SystemModel& model, const Planner& planner, int start_hour, int n_steps,
                      const TreeConfig& cfg, RollingState state);

}  // namespace fsuc
