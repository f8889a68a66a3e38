#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fsuc/experiment.hpp"
#include "fsuc/suc.hpp"

using namespace fsuc;
namespace fs = std::filesystem;

namespace {

// A few CCGT-like units, a fast peaker, a must-run block that sets the loss
// and a small battery.
SystemModel small_system() {
  SystemModel m;
  m.thermal_classes = {
      ThermalClass{.name = "base",
                   .unit_count = 1,
                   .rated_power = 150.0,
                   .min_stable_gen = 150.0,
                   .marginal_cost = 10.0,
                   .inertia_const = 5.0,
                   .must_run = true},
      ThermalClass{.name = "ccgt",
                   .unit_count = 8,
                   .rated_power = 200.0,
                   .min_stable_gen = 100.0,
                   .no_load_cost = 2000.0,
                   .marginal_cost = 45.0,
                   .startup_cost = 4000.0,
                   .startup_time = 2,
                   .min_up = 3,
                   .min_down = 1,
                   .inertia_const = 6.0,
                   .max_response = 40.0,
                   .response_slope = 0.5},
      ThermalClass{.name = "ocgt",
                   .unit_count = 6,
                   .rated_power = 50.0,
                   .min_stable_gen = 20.0,
                   .no_load_cost = 1500.0,
                   .marginal_cost = 150.0,
                   .inertia_const = 5.0,
                   .max_response = 10.0,
                   .response_slope = 0.5},
  };
  m.storage = {StorageUnit{.name = "bat", .power_cap = 40.0, .energy_cap = 40.0, .round_trip_eff = 0.9,
                           .efr_capacity = 40.0}};
  m.freq.largest_loss = 150.0;
  m.largest_infeed_class = "base";
  m.wind_capacity = 800.0;
  auto p = synth_year(3, 1200.0, 800.0);
  m.demand_series = std::move(p.demand);
  m.wind_cf_series = std::move(p.wind_cf);
  validate(m);
  return m;
}

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / name) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
};

fs::path write_config(const fs::path& dir, const SystemModel& m) {
  auto p = dir / "system.json";
  std::ofstream(p) << serialize_system(m);
  return p;
}

ExperimentSpec small_spec(const fs::path& config, const fs::path& out) {
  ExperimentSpec s;
  s.scenario = "custom";
  s.months = {3, 9};
  s.config = config;
  s.out_dir = out;
  s.run.tree.horizon = 6;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_rows(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(f, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("named scenarios pin the system") {
  ExperimentSpec s;
  s.scenario = "unlink-1";
  s.wind_capacity = 1.0;
  s.largest_loss = 2.0;
  auto r = resolve(s);
  CHECK(r.wind_capacity == 25000.0);
  CHECK(r.largest_loss == 1320.0);
  s.scenario = "co-opt-2";
  r = resolve(s);
  CHECK(r.wind_capacity == 50000.0);
  CHECK(r.largest_loss == 1800.0);
  CHECK(strategies_for("co-opt-2") == std::vector<Strategy>{Strategy::Cooptimized});
  CHECK(strategies_for("unlink-2") == std::vector<Strategy>{Strategy::Unlinked});
  CHECK(strategies_for("custom").size() == 2);
  s.scenario = "custom";
  r = resolve(s);
  CHECK(r.wind_capacity == 1.0);
  CHECK(r.largest_loss == 2.0);
}

TEST_CASE("bad specs are config errors") {
  ExperimentSpec s;
  s.scenario = "co-opt-3";
  CHECK_THROWS_AS(resolve(s), ConfigError);
  s.scenario = "custom";
  s.months = {0};
  CHECK_THROWS_AS(resolve(s), ConfigError);
  s.months = {};
  CHECK_THROWS_AS(resolve(s), ConfigError);
  s.months = {2, 2};
  CHECK_THROWS_AS(resolve(s), ConfigError);
  s.months = {2};
  s.run.solver.gap = -1.0;
  CHECK_THROWS_AS(resolve(s), ConfigError);
  s.run.solver.gap = 1e-3;
  s.scenario = "unlink-1";
  s.config = "x.json";
  CHECK_THROWS_AS(resolve(s), ConfigError);
}

TEST_CASE("custom run writes consistent, reproducible reports") {
  Scratch tmp("fsuc_experiment_test");
  auto cfg = write_config(tmp.dir, small_system());
  auto spec = small_spec(cfg, tmp.dir / "a");
  spec.sensitivity_grid = false;
  auto out = run_experiment(spec);
  REQUIRE(out.runs.size() == 3);
  for (const char* f : {"hourly_energy-only.csv", "hourly_co-optimized.csv", "hourly_unlinked.csv",
                        "monthly_summary.csv", "annual_summary.json"})
    CHECK(fs::exists(tmp.dir / "a" / f));
  CHECK_FALSE(fs::exists(tmp.dir / ".a.partial"));

  // Monthly summary equals the recomputation from the hourly files.
  std::map<std::pair<std::string, int>, double> from_hourly;
  for (const char* label : {"energy-only", "co-optimized", "unlinked"}) {
    auto h = read_hourly_csv(tmp.dir / "a" / (std::string("hourly_") + label + ".csv"));
    CHECK(h.hours.size() == 2 * 168);
    for (std::size_t t = 0; t < h.hours.size(); ++t) from_hourly[{label, h.months[t]}] += h.scale[t] * h.total_cost[t];
  }
  auto rows = read_rows(tmp.dir / "a" / "monthly_summary.csv");
  REQUIRE(rows.size() == 1 + 3 * 2);
  CHECK(rows[0][8] == "total");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double total = std::stod(rows[i][8]);
    double expect = from_hourly[{rows[i][1], std::stoi(rows[i][0])}];
    CHECK(std::abs(total - expect) <= 1e-6 * std::abs(expect));
    double parts = std::stod(rows[i][4]) + std::stod(rows[i][5]) + std::stod(rows[i][6]) + std::stod(rows[i][7]);
    CHECK(std::abs(total - parts) <= 1e-6 * std::abs(total));
  }

  auto j = nlohmann::json::parse(slurp(tmp.dir / "a" / "annual_summary.json"));
  CHECK(j["strategies"].size() == 3);
  CHECK(j["unlinked_requirements"].size() == 2);
  CHECK(j["strategies"]["co-optimized"]["max_nadir_hz"].get<double>() <= 0.8 + 2e-3);
  CHECK(j["strategies"]["unlinked"]["total_cost"].get<double>() >=
        j["strategies"]["co-optimized"]["total_cost"].get<double>() * (1 - 2e-3));
  CHECK(j.contains("trajectories"));

  // Same spec again: byte-identical files.
  spec.out_dir = tmp.dir / "b";
  auto again = run_experiment(spec);
  REQUIRE(again.files == out.files);
  for (const auto& f : out.files) CHECK(slurp(tmp.dir / "a" / f) == slurp(tmp.dir / "b" / f));

  // Comparisons.
  auto eo = tmp.dir / "a" / "hourly_energy-only.csv";
  auto co = tmp.dir / "a" / "hourly_co-optimized.csv";
  auto un = tmp.dir / "a" / "hourly_unlinked.csv";
  auto same = compare_runs(co, tmp.dir / "b" / "hourly_co-optimized.csv");
  for (const auto& m : same.months) CHECK(m.delta == 0.0);
  CHECK(same.annual.delta == 0.0);
  auto premium = compare_runs(co, un, eo);
  REQUIRE(premium.months.size() == 2);
  for (const auto& m : premium.months) {
    CHECK(m.delta == doctest::Approx(from_hourly[{"unlinked", m.month}] - from_hourly[{"co-optimized", m.month}]));
    REQUIRE(m.fs_a.has_value());
    CHECK(*m.fs_a == doctest::Approx(from_hourly[{"co-optimized", m.month}] - from_hourly[{"energy-only", m.month}]));
  }
  CHECK(comparison_csv(premium).rfind("month,cost_a,cost_b,delta", 0) == 0);

  // Extra month on one side.
  auto spec3 = spec;
  spec3.months = {3};
  spec3.out_dir = tmp.dir / "c";
  run_experiment(spec3);
  CHECK_THROWS_AS(compare_runs(tmp.dir / "c" / "hourly_co-optimized.csv", co), MismatchedCoverageError);
  CHECK_THROWS_AS(compare_runs(co, un, tmp.dir / "c" / "hourly_energy-only.csv"), MismatchedCoverageError);
}

TEST_CASE("failed runs leave no output behind") {
  Scratch tmp("fsuc_experiment_fail");
  auto m = small_system();
  m.storage.clear();
  auto cfg = write_config(tmp.dir, m);
  auto spec = small_spec(cfg, tmp.dir / "out");
  spec.months = {3};
  spec.efr = EfrMode::Fixed;  // 200 MW with no EFR provider
  CHECK_THROWS_AS(run_experiment(spec), OptionConflictError);
  CHECK_FALSE(fs::exists(tmp.dir / "out"));
  CHECK_FALSE(fs::exists(tmp.dir / ".out.partial"));
}

TEST_CASE("hourly CSV reader rejects malformed files") {
  Scratch tmp("fsuc_hourly_reader");
  auto p = tmp.dir / "h.csv";
  std::ofstream(p) << "hour,month,scale\n1,1,1\n";
  CHECK_THROWS_AS(read_hourly_csv(p), ConfigError);
  std::ofstream(p) << "hour,month,scale,total_cost\n1,1,1\n";
  CHECK_THROWS_AS(read_hourly_csv(p), ConfigError);
  std::ofstream(p) << "hour,month,scale,total_cost\n1,1,x,3\n";
  CHECK_THROWS_AS(read_hourly_csv(p), ConfigError);
  CHECK_THROWS_AS(read_hourly_csv(tmp.dir / "missing.csv"), ConfigError);
}
