#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsuc/strategies.hpp"
#include "fsuc/system_model.hpp"

namespace fsuc {

// Hourly result files that do not cover the same hours.
struct MismatchedCoverageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ExperimentSpec {
  std::string scenario = "co-opt-2";  // unlink-1, unlink-2, co-opt-1, co-opt-2 or custom
  std::vector<int> months{1};
  double wind_capacity = 50000.0;  // MW
  double largest_loss = 1800.0;    // MW
  EfrMode efr = EfrMode::Optimized;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "results";
  bool sensitivity_grid = false;
  RunConfig run;
  std::optional<std::filesystem::path> config;  // system JSON; replaces the GB model
};

// Named scenarios pin wind and loss; custom keeps them. Throws ConfigError.
ExperimentSpec resolve(ExperimentSpec spec);

// Strategies a scenario runs besides the energy-only baseline.
std::vector<Strategy> strategies_for(const std::string& scenario);

std::string strategy_name(Strategy s);

struct ExperimentOutput {
  std::vector<RunResult> runs;  // energy-only first
  std::vector<std::filesystem::path> files;  // relative to out_dir
};

// Runs the spec and writes its report files into spec.out_dir. Files are
// staged in a sibling directory and moved in only on success.
ExperimentOutput run_experiment(const ExperimentSpec& spec);

// Hourly CSV of one run: one row per committed hour.
std::string hourly_csv(const RunResult& r, const SystemModel& model);

struct HourlyFile {
  std::vector<int> hours;
  std::vector<int> months;
  std::vector<double> scale;
  std::vector<double> total_cost;
};
HourlyFile read_hourly_csv(const std::filesystem::path& path);

struct MonthDelta {
  int month = 0;
  double cost_a = 0.0, cost_b = 0.0;
  double delta = 0.0;  // b - a
  std::optional<double> fs_a, fs_b, fs_change_pct;  // with a baseline
};

struct Comparison {
  std::vector<MonthDelta> months;
  MonthDelta annual;  // month 0
};

// Scaled monthly cost of b minus a. A baseline (the energy-only run on the
// same trace) turns both into frequency-service costs.
Comparison compare_runs(const std::filesystem::path& a, const std::filesystem::path& b,
                        const std::optional<std::filesystem::path>& baseline = {});
std::string comparison_csv(const Comparison& c);

}  // namespace fsuc
