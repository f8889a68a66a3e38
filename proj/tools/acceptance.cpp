// Acceptance checks 1-9. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "fsuc/experiment.hpp"
#include "fsuc/frequency.hpp"
#include "fsuc/mip.hpp"
#include "fsuc/strategies.hpp"
#include "fsuc/suc.hpp"
#include "tiny_uc.hpp"

using namespace fsuc;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kPfrRelTol = 1e-3;          // criterion 2
constexpr double kRatioTol = 0.1;            // criterion 3
constexpr double kOdeTol = 1e-3;             // criterion 4, Hz
constexpr double kBindingTol = 2e-3;         // criterion 4, Hz
constexpr double kObjRelTol = 1e-6;          // criterion 5
constexpr double kNadirSlack = 2e-3;         // criterion 8, Hz
constexpr double kRocofSlack = 1e-6;         // criterion 8, Hz/s
constexpr double kPremiumFloor = 0.5;        // criterion 7

FrequencyParams gb(double loss) {
  FrequencyParams fp;
  fp.largest_loss = loss;
  return fp;
}

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void criterion_1() {
  double h = min_inertia_for_rocof(gb(1800.0));
  report(1, h == 90000.0, fmt("H_min = %.6f MW s (want 90000 exactly)", h));
}

void criterion_2() {
  double pfr = min_pfr_for_nadir(90000.0, 200.0, gb(1800.0));
  report(2, std::abs(pfr - 4604.0) <= kPfrRelTol * 4604.0, fmt("PFR = %.3f MW (want 4604 +- 0.1%%)", pfr));
}

void criterion_3() {
  double pfr = min_pfr_for_nadir(90000.0, 200.0, gb(1800.0));
  int ccgt = static_cast<int>(std::ceil(pfr / 50.0));
  auto model = gb_system(50000, 1800, 1);
  double h = system_inertia(std::vector<int>{0, 92, 0}, model);
  RunResult r;
  r.inertia.assign(24, h);
  double ratio = overprocurement_ratio(r, model.freq);
  bool ok = (ccgt == 92 || ccgt == 93) && std::abs(h - 230000.0) <= 2500.0 && std::abs(ratio - 2.5) <= kRatioTol;
  report(3, ok, fmt("CCGTs %d, inertia %.0f MW s, overprocurement %.4f", ccgt, h, ratio));
}

void criterion_4() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (double loss : {1320.0, 1800.0}) {
    const auto fp = gb(loss);
    std::vector<ServicePoint> pts;
    for (int i = 0; i < 500; ++i) {
      double h = min_inertia_for_rocof(fp) * (1.0 + 3.0 * u(rng));
      double efr = loss * u(rng);
      double pfr = (loss - efr) * (1.0 + 4.0 * u(rng)) + 1.0;
      pts.push_back({h, efr, pfr});
    }
    std::vector<double> sim(pts.size());
    kernels::batch_nadir_omp(pts, fp, 1e-3, sim);
    for (std::size_t i = 0; i < pts.size(); ++i) worst = std::max(worst, std::abs(sim[i] - analytic_nadir(pts[i], fp)));
  }
  const auto fp = gb(1800.0);
  double worst_binding = 0.0;
  int binding = 0;
  while (binding < 200) {
    double h = 90000.0 * (1.0 + 3.0 * u(rng));
    double efr = 1800.0 * u(rng);
    double pfr;
    try {
      pfr = min_pfr_for_nadir(h, efr, fp);
    } catch (const InfeasibleInertiaError&) {
      continue;
    }
    ServicePoint sp{h, efr, pfr};
    if (!check_qss(efr, pfr, fp.largest_loss) || response_crossing_time(sp, fp) <= fp.t_efr) continue;
    worst_binding = std::max(worst_binding, std::abs(simulate_post_fault(sp, fp).nadir_dev - fp.delta_f_max));
    ++binding;
  }
  report(4, worst <= kOdeTol && worst_binding <= kBindingTol,
         fmt("1000 points max |ODE - analytic| = %.2e Hz; %d binding points max |nadir - 0.8| = %.2e Hz", worst,
             binding, worst_binding));
}

void criterion_5() {
  std::mt19937_64 rng(5);
  mip::SolveOptions o;
  o.gap_tol = 0.0;
  int bad = 0, max_ints = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    auto in = tiny::random_instance(rng);
    auto p = tiny::build(in);
    max_ints = std::max(max_ints, p.num_integer());
    auto s = mip::solve(p, o);
    double oracle = tiny::brute_force(in);
    double rel = std::abs(s.objective - oracle) / std::max(1.0, std::abs(oracle));
    worst = std::max(worst, rel);
    bad += s.status != mip::Status::Optimal || rel > kObjRelTol || p.num_integer() > 12;
  }
  report(5, bad == 0, fmt("50 instances, <= %d integer vars, max rel. error %.2e, %d mismatches", max_ints, worst, bad));
}

struct ConfigRuns {
  std::string name;
  SystemModel model;
  RunResult eo, co, un;
};

void criteria_6_to_8(const RunConfig& cfg) {
  std::vector<ConfigRuns> configs;
  std::vector<int> months{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  const auto t0 = std::chrono::steady_clock::now();
  for (auto [name, wind, loss] : {std::tuple{"current", 25000.0, 1320.0}, std::tuple{"future", 50000.0, 1800.0}}) {
    ConfigRuns c{name, gb_system(wind, loss, 1), {}, {}, {}};
    std::vector<MonthRun> eo_months, co_months, un_months;
    std::vector<SolveRecord> eo_log, co_log, un_log;
    for (int m : months) {
      FormulationOptions energy;
      energy.fixed_efr_volume = 0.0;
      eo_months.push_back(run_month(c.model, m, energy, cfg, &eo_log));
      FormulationOptions co;
      co.frequency_constraints = true;
      co_months.push_back(run_month(c.model, m, co, cfg, &co_log));
      auto req = compute_response_requirement(eo_months.back(), c.model, cfg.efr_volume);
      FormulationOptions un;
      un.fixed_efr_volume = req.efr_volume;
      un.fixed_pfr_requirement = req.pfr_volume;
      un.inertia_floor = req.inertia_floor;
      un_months.push_back(run_month(c.model, m, un, cfg, &un_log));
      un_months.back().requirement = req;
      double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::fprintf(stderr, "  %s month %2d done (%.0f s)\n", name, m, s);
    }
    c.eo = collect("energy-only", c.model, std::move(eo_months), std::move(eo_log));
    c.co = collect("co-optimized", c.model, std::move(co_months), std::move(co_log));
    c.un = collect("unlinked", c.model, std::move(un_months), std::move(un_log));
    configs.push_back(std::move(c));
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // 6: dominance per month and config.
  const double allowance = 2.0 * cfg.solver.gap;
  int violations = 0;
  double worst_margin = -1e300;
  for (const auto& c : configs)
    for (int m : months) {
      double co = c.co.month_cost(m), un = c.un.month_cost(m);
      double margin = (co - un) / un;
      worst_margin = std::max(worst_margin, margin);
      if (co > un * (1.0 + allowance)) {
        ++violations;
        std::fprintf(stderr, "  dominance fails: %s month %d co %.6e un %.6e\n", c.name.c_str(), m, co, un);
      }
    }
  report(6, violations == 0,
         fmt("24 month-configs, worst (co - un)/un = %.4f (allowance %.4f), %d violations, %.0f s", worst_margin,
             allowance, violations, wall));

  // 7: savings and premium ordering.
  auto fs_cost = [](const RunResult& r, const RunResult& eo) { return r.total_cost() - eo.total_cost(); };
  const auto& cur = configs[0];
  const auto& fut = configs[1];
  double save_cur = cur.un.total_cost() - cur.co.total_cost();
  double save_fut = fut.un.total_cost() - fut.co.total_cost();
  double prem_cur = fs_cost(cur.un, cur.eo) / fs_cost(cur.co, cur.eo) - 1.0;
  double prem_fut = fs_cost(fut.un, fut.eo) / fs_cost(fut.co, fut.eo) - 1.0;
  report(7, save_fut > save_cur && prem_fut > prem_cur && prem_fut > kPremiumFloor,
         fmt("savings future %.3e > current %.3e GBP/yr; premium future %.1f%% > current %.1f%%, floor %.0f%%",
             save_fut, save_cur, 100 * prem_fut, 100 * prem_cur, 100 * kPremiumFloor));

  // 8: post-fault replay of every committed hour of the secured runs.
  long hours = 0, bad = 0;
  double worst_nadir = 0.0, worst_rocof = 0.0;
  for (const auto& c : configs) {
    const auto& fp = c.model.freq;
    for (const RunResult* r : {&c.co, &c.un}) {
      std::vector<ServicePoint> pts;
      for (std::size_t t = 0; t < r->hours.size(); ++t) pts.push_back({r->inertia[t], r->efr[t], r->pfr[t]});
      std::vector<double> nadir(pts.size());
      kernels::batch_nadir_omp(pts, fp, 1e-3, nadir);
      for (std::size_t t = 0; t < pts.size(); ++t) {
        double rocof = fp.f0 * fp.largest_loss / (2.0 * pts[t].inertia);
        worst_nadir = std::max(worst_nadir, nadir[t]);
        worst_rocof = std::max(worst_rocof, rocof);
        bad += nadir[t] > fp.delta_f_max + kNadirSlack || rocof > fp.rocof_max + kRocofSlack;
        ++hours;
      }
    }
  }
  report(8, bad == 0 && hours > 0,
         fmt("%ld hours replayed, max nadir %.5f Hz, max RoCoF %.6f Hz/s, %ld insecure", hours, worst_nadir,
             worst_rocof, bad));
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void criterion_9(const fs::path& scratch) {
  ExperimentSpec spec;
  spec.scenario = "unlink-1";
  spec.months = {1};
  spec.seed = 7;
  spec.out_dir = scratch / "run_a";
  fs::remove_all(scratch / "run_a");
  fs::remove_all(scratch / "run_b");
  auto a = run_experiment(spec);
  spec.out_dir = scratch / "run_b";
  auto b = run_experiment(spec);
  bool ok = a.files == b.files && !a.files.empty();
  std::size_t bytes = 0;
  for (const auto& f : a.files) {
    auto x = slurp(scratch / "run_a" / f), y = slurp(scratch / "run_b" / f);
    bytes += x.size();
    if (x != y) {
      ok = false;
      std::fprintf(stderr, "  %s differs\n", f.string().c_str());
    }
  }
  report(9, ok, fmt("unlink-1, month 1, seed 7 run twice: %zu files, %zu bytes, identical: %s", a.files.size(), bytes,
                    ok ? "yes" : "no"));
}

}  // namespace

int main(int argc, char** argv) {
  fs::path scratch = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "fsuc_acceptance";
  fs::create_directories(scratch);
  RunConfig cfg;  // representative weeks, gap 1e-3, 20 nodes per step, EFR 200 MW
  try {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criteria_6_to_8(cfg);
    criterion_9(scratch);
  } catch (const std::exception& e) {
    std::printf("aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
