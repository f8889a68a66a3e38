// fsuc: scenario runs and result comparison.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fsuc/experiment.hpp"
#include "fsuc/suc.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kSolverFailure = 3;

// "1,3,5-7" or "all".
std::vector<int> parse_months(const std::string& text) {
  if (text == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      auto dash = part.find('-');
      if (dash == std::string::npos) {
        out.push_back(std::stoi(part));
      } else {
        int a = std::stoi(part.substr(0, dash)), b = std::stoi(part.substr(dash + 1));
        if (b < a) throw fsuc::ConfigError("bad month range " + part);
        for (int m = a; m <= b; ++m) out.push_back(m);
      }
    } catch (const std::logic_error&) {
      throw fsuc::ConfigError("bad month list '" + text + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-secured stochastic unit commitment experiments"};
  app.require_subcommand(1);

  fsuc::ExperimentSpec spec;
  if (const char* env = std::getenv("FSUC_OUT_DIR")) spec.out_dir = env;
  std::string months = "1", efr = "optimized", config;
  double time_limit = 0.0;

  auto* run = app.add_subcommand("run", "Run a scenario and write its reports");
  run->add_option("--scenario", spec.scenario, "unlink-1, unlink-2, co-opt-1, co-opt-2 or custom")
      ->check(CLI::IsMember({"unlink-1", "unlink-2", "co-opt-1", "co-opt-2", "custom"}));
  run->add_option("--months", months, "month list such as 1,2,6-8 or all");
  run->add_option("--wind-capacity-mw", spec.wind_capacity, "custom scenario wind capacity");
  run->add_option("--largest-loss-mw", spec.largest_loss, "custom scenario largest loss");
  run->add_option("--efr", efr, "none, fixed-200 or optimized")
      ->check(CLI::IsMember({"none", "fixed-200", "optimized"}));
  run->add_option("--seed", spec.seed, "synthetic profile seed");
  run->add_option("--config", config, "system JSON for the custom scenario");
  run->add_flag("--sensitivity-grid", spec.sensitivity_grid, "also run the wind x loss grid");
  run->add_flag("--full-month", spec.run.full_month, "simulate whole months instead of one week each");
  run->add_option("--out", spec.out_dir, "output directory (default $FSUC_OUT_DIR or ./results)");
  run->add_option("--gap", spec.run.solver.gap, "relative MIP gap per step");
  run->add_option("--time-limit", time_limit, "seconds per step; makes runs timing dependent");
  run->add_option("--node-limit", spec.run.solver.node_limit, "branch-and-bound nodes per step");

  std::string a, b, baseline, out_file;
  auto* cmp = app.add_subcommand("compare", "Cost deltas between two hourly result files");
  cmp->add_option("a", a, "hourly CSV")->required();
  cmp->add_option("b", b, "hourly CSV")->required();
  cmp->add_option("--baseline", baseline, "energy-only hourly CSV for frequency-service costs");
  cmp->add_option("--out", out_file, "write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) {
      spec.months = parse_months(months);
      spec.efr = efr == "none" ? fsuc::EfrMode::None : efr == "fixed-200" ? fsuc::EfrMode::Fixed
                                                                           : fsuc::EfrMode::Optimized;
      if (!config.empty()) spec.config = config;
      if (time_limit > 0.0) spec.run.solver.time_limit = time_limit;
      auto out = fsuc::run_experiment(spec);
      for (const auto& f : out.files) std::cout << (spec.out_dir / f).string() << '\n';
      for (const auto& r : out.runs) std::cout << r.label << " total cost " << r.total_cost() << '\n';
    } else {
      auto c = fsuc::compare_runs(a, b, baseline.empty() ? std::nullopt : std::optional<std::filesystem::path>(baseline));
      auto text = fsuc::comparison_csv(c);
      if (out_file.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(out_file);
        f << text;
        if (!f) throw fsuc::ConfigError("cannot write " + out_file);
      }
    }
  } catch (const fsuc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fsuc::MismatchedCoverageError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fsuc::OptionConflictError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "pipeline failure: " << e.what() << '\n';
    return kSolverFailure;
  }
  return 0;
}
