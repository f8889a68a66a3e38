#include "fsuc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <boost/math/distributions/normal.hpp>

namespace fsuc {

std::vector<int> ScenarioTree::leaves() const {
  std::vector<char> has_child(nodes.size(), 0);
  for (const auto& n : nodes)
    if (n.parent >= 0) has_child[n.parent] = 1;
  std::vector<int> out;
  for (const auto& n : nodes)
    if (!has_child[n.id]) out.push_back(n.id);
  return out;
}

std::vector<int> ScenarioTree::path_to_root(int id) const {
  std::vector<int> out;
  for (int k = id; k >= 0; k = nodes[k].parent) out.push_back(k);
  return out;
}

namespace {

void check_quantiles(std::span<const double> q) {
  if (q.empty()) throw InvalidQuantileError("at least one quantile is required");
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!(q[i] > 0.0 && q[i] < 1.0)) throw InvalidQuantileError("quantiles must lie strictly inside (0, 1)");
    if (i > 0 && !(q[i] > q[i - 1])) throw InvalidQuantileError("quantiles must be strictly increasing");
  }
}

}  // namespace

std::vector<double> midpoint_weights(std::span<const double> quantiles) {
  check_quantiles(quantiles);
  const std::size_t k = quantiles.size();
  std::vector<double> w(k);
  double lower = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double upper = i + 1 < k ? 0.5 * (quantiles[i] + quantiles[i + 1]) : 1.0;
    w[i] = upper - lower;
    lower = upper;
  }
  return w;
}

ScenarioTree build_tree(const TreeInput& in, const TreeConfig& cfg) {
  check_quantiles(cfg.quantiles);
  std::vector<double> weights = cfg.weights.empty() ? midpoint_weights(cfg.quantiles) : cfg.weights;
  if (weights.size() != cfg.quantiles.size())
    throw WeightSumError("weights and quantiles differ in length");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw WeightSumError("weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw WeightSumError("weights sum to " + std::to_string(sum) + ", not 1");
  if (cfg.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (cfg.branch_stage < 1 || cfg.branch_stage > cfg.horizon)
    throw std::invalid_argument("branch_stage must lie in [1, horizon]");
  if (in.demand.size() < static_cast<std::size_t>(cfg.horizon) + 1)
    throw std::invalid_argument("demand forecast shorter than the horizon");

  const auto& em = cfg.error;
  const boost::math::normal normal;
  std::vector<double> z(cfg.quantiles.size());
  for (std::size_t b = 0; b < z.size(); ++b) z[b] = boost::math::quantile(normal, cfg.quantiles[b]);

  auto wind_at = [&](int depth, double zq) {
    double decay = std::pow(em.persistence, depth);
    double mean = in.mean_cf + decay * (in.wind_cf_now - in.mean_cf);
    double var = 0.0;
    for (int i = 0; i < depth; ++i) var += std::pow(em.persistence, 2 * i);
    double cf = std::clamp(mean + zq * em.innovation_sd * std::sqrt(var), 0.0, 1.0);
    return cf * in.wind_capacity;
  };

  ScenarioTree tree;
  tree.horizon = cfg.horizon;
  tree.branch_stage = cfg.branch_stage;
  auto add = [&](int parent, double prob, int depth, int branch, double wind) {
    ScenarioNode n;
    n.id = static_cast<int>(tree.nodes.size());
    n.parent = parent;
    n.probability = prob;
    n.interval = 1.0;
    n.hour_index = in.hour + depth;
    n.depth = depth;
    n.branch = branch;
    n.wind_available = wind;
    n.demand = in.demand[depth];
    tree.nodes.push_back(n);
    return n.id;
  };
  int last = add(-1, 1.0, 0, 0, std::clamp(in.wind_cf_now, 0.0, 1.0) * in.wind_capacity);
  for (int d = 1; d < cfg.branch_stage; ++d) last = add(last, 1.0, d, 0, wind_at(d, 0.0));
  const int trunk = last;
  for (std::size_t b = 0; b < weights.size(); ++b) {
    int parent = trunk;
    for (int d = cfg.branch_stage; d <= cfg.horizon; ++d)
      parent = add(parent, weights[b], d, static_cast<int>(b), wind_at(d, z[b]));
  }
  return tree;
}

TreeInput tree_input(const SystemModel& model, int hour, const TreeConfig& cfg) {
  const auto& cf = model.wind_cf_series;
  if (hour < 0 || static_cast<std::size_t>(hour + cfg.horizon) >= model.hours())
    throw std::out_of_range("series do not cover hour " + std::to_string(hour) + " plus the horizon");
  int from = std::max(0, hour - cfg.error.mean_window + 1);
  double sum = 0.0;
  for (int t = from; t <= hour; ++t) sum += cf[t];
  TreeInput in;
  in.hour = hour;
  in.wind_cf_now = cf[hour];
  in.mean_cf = sum / (hour - from + 1);
  in.demand = std::span<const double>(model.demand_series).subspan(hour, cfg.horizon + 1);
  in.wind_capacity = model.wind_capacity;
  return in;
}

void write_tree_csv(const std::filesystem::path& path, const ScenarioTree& tree) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(12);
  out << "node,parent,prob,hour,wind,demand\n";
  for (const auto& n : tree.nodes)
    out << n.id << ',' << n.parent << ',' << n.probability << ',' << n.hour_index << ',' << n.wind_available << ','
        << n.demand << '\n';
}

RollingState RollingState::start(const SystemModel& model) {
  RollingState s;
  const auto g = model.thermal_classes.size();
  s.n_up.assign(g, 0);
  s.pending.resize(g);
  s.arrivals.resize(g);
  s.shutdowns.resize(g);
  for (std::size_t k = 0; k < g; ++k) s.pending[k].assign(model.thermal_classes[k].startup_time, 0);
  for (const auto& st : model.storage) s.soc.push_back(0.5 * st.energy_cap);
  return s;
}

int RollingState::arriving_now(std::size_t g) const { return pending[g].empty() ? 0 : pending[g].front(); }

void advance_state(RollingState& s, const SystemModel& model, const NodeDecision& root) {
  for (std::size_t g = 0; g < model.thermal_classes.size(); ++g) {
    const auto& tc = model.thermal_classes[g];
    int arrived = tc.startup_time == 0 ? root.n_sg[g] : s.arriving_now(g);
    int down = s.initial ? 0 : s.n_up[g] + arrived - root.n_up[g];
    if (s.initial) arrived = 0;
    s.arrivals[g].push_back(arrived);
    s.shutdowns[g].push_back(std::max(0, down));
    const std::size_t keep = static_cast<std::size_t>(std::max({tc.min_up, tc.min_down, 1}));
    if (s.arrivals[g].size() > keep) s.arrivals[g].erase(s.arrivals[g].begin());
    if (s.shutdowns[g].size() > keep) s.shutdowns[g].erase(s.shutdowns[g].begin());
    if (!s.pending[g].empty()) {
      s.pending[g].erase(s.pending[g].begin());
      s.pending[g].push_back(root.n_sg[g]);
    }
    s.n_up[g] = root.n_up[g];
  }
  s.soc = root.soc;
  s.initial = false;
}

Schedule rolling_plan(const SystemModel& model, const Planner& planner, int start_hour, int n_steps,
                      const TreeConfig& cfg, RollingState state) {
  if (n_steps < 0) throw std::invalid_argument("n_steps must be >= 0");
  if (static_cast<std::size_t>(start_hour + n_steps + cfg.horizon) > model.hours())
    throw std::out_of_range("actual trace does not cover the rolling window and horizon");
  Schedule out;
  out.start_hour = start_hour;
  out.initial_state = state;
  for (int step = 0; step < n_steps; ++step) {
    const int hour = start_hour + step;
    auto tree = build_tree(tree_input(model, hour, cfg), cfg);
    StepResult r = planner(tree, state);
    advance_state(state, model, r.root);
    out.hours.push_back(std::move(r.root));
    out.costs.push_back(r.cost);
  }
  out.final_state = std::move(state);
  return out;
}

}  // namespace fsuc
