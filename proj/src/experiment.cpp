#include "fsuc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fsuc/frequency.hpp"

namespace fsuc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Named {
  const char* name;
  Strategy strategy;
  double wind, loss;
};
constexpr Named kNamed[] = {
    {"unlink-1", Strategy::Unlinked, 25000.0, 1320.0},
    {"unlink-2", Strategy::Unlinked, 50000.0, 1800.0},
    {"co-opt-1", Strategy::Cooptimized, 25000.0, 1320.0},
    {"co-opt-2", Strategy::Cooptimized, 50000.0, 1800.0},
};

const Named* find_named(const std::string& s) {
  for (const auto& n : kNamed)
    if (s == n.name) return &n;
  return nullptr;
}

// 200 MW, or the whole EFR capability of a smaller fleet.
double unlinked_efr(const ExperimentSpec& spec, const SystemModel& model) {
  if (spec.efr == EfrMode::None) return 0.0;
  double cap = 0.0;
  for (const auto& st : model.storage) cap += st.efr_capacity;
  return std::min(spec.run.efr_volume, cap);
}

SystemModel make_model(const ExperimentSpec& spec) {
  if (spec.config) return load_system_file(*spec.config);
  return gb_system(spec.wind_capacity, spec.largest_loss, spec.seed);
}

struct Runs {
  RunResult energy_only;
  std::vector<std::pair<Strategy, RunResult>> others;
};

Runs run_all(const SystemModel& model, const std::vector<int>& months, const std::vector<Strategy>& strategies,
             RunConfig cfg, double efr_unlinked) {
  Runs r;
  r.energy_only = run_energy_only(model, months, cfg);
  for (Strategy s : strategies) {
    if (s == Strategy::Cooptimized) r.others.emplace_back(s, run_cooptimized(model, months, cfg));
    if (s == Strategy::Unlinked) {
      RunConfig u = cfg;
      u.efr_volume = efr_unlinked;
      r.others.emplace_back(s, run_unlinked(model, months, u, &r.energy_only));
    }
  }
  return r;
}

// Index of the lowest-inertia hour, earliest on ties.
std::size_t weakest_hour(const RunResult& r) {
  return static_cast<std::size_t>(std::min_element(r.inertia.begin(), r.inertia.end()) - r.inertia.begin());
}

std::vector<double> hourly_nadirs(const RunResult& r, const FrequencyParams& fp) {
  std::vector<ServicePoint> pts;
  for (std::size_t t = 0; t < r.hours.size(); ++t) pts.push_back({r.inertia[t], r.efr[t], r.pfr[t]});
  std::vector<double> out(pts.size());
  kernels::batch_nadir_omp(pts, fp, 1e-2, out);
  return out;
}

json breakdown_json(const CostBreakdown& c) {
  return {{"startup", c.startup}, {"no_load", c.no_load}, {"marginal", c.marginal}, {"shed", c.shed},
          {"total", c.total()}};
}

json run_json(const RunResult& r, const RunResult& eo, const SystemModel& model, bool secure) {
  json j;
  j["total_cost"] = r.total_cost();
  j["breakdown"] = breakdown_json(r.cost);
  j["frequency_service_cost"] = r.total_cost() - eo.total_cost();
  double hmin = *std::min_element(r.inertia.begin(), r.inertia.end());
  double hsum = 0.0;
  for (double h : r.inertia) hsum += h;
  j["min_inertia"] = hmin;
  j["mean_inertia"] = hsum / static_cast<double>(r.inertia.size());
  if (model.freq.largest_loss > 0.0) j["overprocurement_ratio"] = overprocurement_ratio(r, model.freq);
  if (secure && model.freq.largest_loss > 0.0) {
    auto nadir = hourly_nadirs(r, model.freq);
    j["max_nadir_hz"] = *std::max_element(nadir.begin(), nadir.end());
  }
  long optimal = 0;
  double worst = 0.0;
  for (const auto& s : r.solves) {
    optimal += s.status == mip::Status::Optimal;
    worst = std::max(worst, s.gap);
  }
  j["solver"] = {{"steps", r.solves.size()}, {"optimal", optimal}, {"max_gap", worst}};
  return j;
}

class Staging {
 public:
  explicit Staging(const fs::path& out) : out_(out) {
    auto parent = out.has_parent_path() ? out.parent_path() : fs::path(".");
    dir_ = parent / ("." + out.filename().string() + ".partial");
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Staging() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  Staging(const Staging&) = delete;
  Staging& operator=(const Staging&) = delete;

  void write(const fs::path& rel, const std::string& text) {
    auto p = dir_ / rel;
    fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("cannot write " + p.string());
    files_.push_back(rel);
  }
  [[nodiscard]] fs::path path(const fs::path& rel) {
    files_.push_back(rel);
    fs::create_directories((dir_ / rel).parent_path());
    return dir_ / rel;
  }

  std::vector<fs::path> commit() {
    fs::create_directories(out_);
    for (const auto& rel : files_) {
      fs::create_directories((out_ / rel).parent_path());
      fs::rename(dir_ / rel, out_ / rel);
    }
    return files_;
  }

 private:
  fs::path out_, dir_;
  std::vector<fs::path> files_;
};

std::string monthly_csv(const Runs& runs, const std::vector<int>& months) {
  std::ostringstream o;
  o << "month,strategy,simulated_hours,scale,startup,no_load,marginal,shed,total,frequency_service_cost\n";
  auto rows = [&](const RunResult& r) {
    for (int m : months) {
      CostBreakdown c;
      int n = 0;
      double scale = 0.0;
      for (std::size_t t = 0; t < r.hours.size(); ++t) {
        if (month_of_hour(r.hours[t]) != m) continue;
        const auto& h = r.hourly_cost[t];
        c += CostBreakdown{h.startup * r.scale[t], h.no_load * r.scale[t], h.marginal * r.scale[t],
                           h.shed * r.scale[t]};
        scale = r.scale[t];
        ++n;
      }
      o << m << ',' << r.label << ',' << n << ',' << num(scale) << ',' << num(c.startup) << ',' << num(c.no_load)
        << ',' << num(c.marginal) << ',' << num(c.shed) << ',' << num(c.total()) << ','
        << num(r.month_cost(m) - runs.energy_only.month_cost(m)) << '\n';
    }
  };
  rows(runs.energy_only);
  for (const auto& [s, r] : runs.others) rows(r);
  return o.str();
}

struct Cell {
  double wind, loss;
  double eo = 0.0, co = 0.0, un = 0.0;
};

void run_grid(const ExperimentSpec& spec, std::vector<Cell>& cells) {
  std::vector<std::exception_ptr> errors(cells.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < cells.size(); ++i) {
    try {
      auto model = gb_system(cells[i].wind, cells[i].loss, spec.seed);
      auto r = run_all(model, spec.months, {Strategy::Cooptimized, Strategy::Unlinked}, spec.run,
                       unlinked_efr(spec, model));
      cells[i].eo = r.energy_only.total_cost();
      cells[i].co = r.others[0].second.total_cost();
      cells[i].un = r.others[1].second.total_cost();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

ExperimentSpec resolve(ExperimentSpec spec) {
  if (const auto* n = find_named(spec.scenario)) {
    spec.wind_capacity = n->wind;
    spec.largest_loss = n->loss;
    if (spec.config) throw ConfigError("--config is only valid with the custom scenario");
  } else if (spec.scenario != "custom") {
    throw ConfigError("unknown scenario '" + spec.scenario + "'");
  }
  if (spec.months.empty()) throw ConfigError("no months selected");
  for (int m : spec.months)
    if (m < 1 || m > 12) throw ConfigError("month " + std::to_string(m) + " outside 1..12");
  auto sorted = spec.months;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw ConfigError("repeated month");
  if (!(spec.wind_capacity >= 0.0)) throw ConfigError("wind capacity must be >= 0");
  if (!(spec.largest_loss >= 0.0)) throw ConfigError("largest loss must be >= 0");
  if (!(spec.run.solver.gap >= 0.0)) throw ConfigError("gap must be >= 0");
  if (!(spec.run.solver.time_limit > 0.0)) throw ConfigError("time limit must be > 0");
  if (spec.run.solver.node_limit < 1) throw ConfigError("node limit must be >= 1");
  if (spec.out_dir.empty()) throw ConfigError("empty output directory");
  spec.run.efr_mode = spec.efr;
  return spec;
}

std::vector<Strategy> strategies_for(const std::string& scenario) {
  if (const auto* n = find_named(scenario)) return {n->strategy};
  return {Strategy::Cooptimized, Strategy::Unlinked};
}

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::EnergyOnly: return "energy-only";
    case Strategy::Cooptimized: return "co-optimized";
    case Strategy::Unlinked: return "unlinked";
  }
  return "";
}

std::string hourly_csv(const RunResult& r, const SystemModel& model) {
  std::ostringstream o;
  o << "hour,month,scale,demand,wind_available,wind_used,wind_curtailed,load_shed,spill";
  for (const auto& tc : model.thermal_classes)
    o << ",n_up_" << tc.name << ",n_sg_" << tc.name << ",power_" << tc.name << ",pfr_" << tc.name;
  for (const auto& st : model.storage)
    o << ",charge_" << st.name << ",discharge_" << st.name << ",soc_" << st.name << ",efr_" << st.name;
  o << ",inertia,pfr_total,efr_total,startup_cost,no_load_cost,marginal_cost,shed_cost,total_cost\n";
  for (std::size_t t = 0; t < r.hours.size(); ++t) {
    const auto& d = r.decisions[t];
    o << r.hours[t] << ',' << month_of_hour(r.hours[t]) << ',' << num(r.scale[t]) << ',' << num(d.demand) << ','
      << num(d.wind_available) << ',' << num(d.wind_used) << ',' << num(d.wind_curtailed) << ','
      << num(d.load_shed) << ',' << num(d.spill);
    for (std::size_t g = 0; g < model.thermal_classes.size(); ++g)
      o << ',' << d.n_up[g] << ',' << d.n_sg[g] << ',' << num(d.power[g]) << ',' << num(d.pfr[g]);
    for (std::size_t s = 0; s < model.storage.size(); ++s)
      o << ',' << num(d.charge[s]) << ',' << num(d.discharge[s]) << ',' << num(d.soc[s]) << ',' << num(d.efr[s]);
    const auto& c = r.hourly_cost[t];
    o << ',' << num(r.inertia[t]) << ',' << num(r.pfr[t]) << ',' << num(r.efr[t]) << ',' << num(c.startup) << ','
      << num(c.no_load) << ',' << num(c.marginal) << ',' << num(c.shed) << ',' << num(c.total()) << '\n';
  }
  return o.str();
}

ExperimentOutput run_experiment(const ExperimentSpec& raw) {
  const ExperimentSpec spec = resolve(raw);
  const SystemModel model = make_model(spec);
  const auto strategies = strategies_for(spec.scenario);

  Staging stage(spec.out_dir);
  Runs runs = run_all(model, spec.months, strategies, spec.run, unlinked_efr(spec, model));

  stage.write("hourly_energy-only.csv", hourly_csv(runs.energy_only, model));
  for (const auto& [s, r] : runs.others) stage.write("hourly_" + r.label + ".csv", hourly_csv(r, model));
  stage.write("monthly_summary.csv", monthly_csv(runs, spec.months));

  json summary;
  summary["scenario"] = spec.scenario;
  summary["seed"] = spec.seed;
  summary["months"] = spec.months;
  summary["wind_capacity_mw"] = model.wind_capacity;
  summary["largest_loss_mw"] = model.freq.largest_loss;
  summary["representative_week"] = !spec.run.full_month;
  summary["efr_mode"] = spec.efr == EfrMode::None ? "none" : spec.efr == EfrMode::Fixed ? "fixed-200" : "optimized";
  summary["strategies"]["energy-only"] = run_json(runs.energy_only, runs.energy_only, model, false);
  const RunResult* co = nullptr;
  const RunResult* un = nullptr;
  for (const auto& [s, r] : runs.others) {
    summary["strategies"][r.label] = run_json(r, runs.energy_only, model, true);
    (s == Strategy::Cooptimized ? co : un) = &r;
  }
  if (un) {
    json reqs = json::array();
    for (const auto& mr : un->months)
      reqs.push_back({{"month", mr.month},
                      {"inertia_floor", mr.requirement->inertia_floor},
                      {"pfr_volume", mr.requirement->pfr_volume},
                      {"efr_volume", mr.requirement->efr_volume}});
    summary["unlinked_requirements"] = reqs;
  }
  if (co && un) {
    const double eo = runs.energy_only.total_cost();
    summary["cooptimization_savings"] = un->total_cost() - co->total_cost();
    const double fs_co = co->total_cost() - eo;
    if (fs_co > 0.0) summary["unlinked_premium"] = (un->total_cost() - eo) / fs_co - 1.0;
  }

  if (model.freq.largest_loss > 0.0) {
    for (const auto& [s, r] : runs.others) {
      std::size_t t = weakest_hour(r);
      auto traj = simulate_post_fault({r.inertia[t], r.efr[t], r.pfr[t]}, model.freq, 1e-2);
      auto rel = fs::path("trajectories") / (r.label + "_hour" + std::to_string(r.hours[t]) + ".csv");
      write_trajectory_csv(stage.path(rel), traj);
      summary["trajectories"][r.label] = {{"hour", r.hours[t]}, {"file", rel.generic_string()},
                                          {"nadir_hz", traj.nadir_dev}, {"initial_rocof", traj.initial_rocof}};
    }
  }

  if (spec.sensitivity_grid) {
    std::vector<Cell> cells{{25000, 1320}, {25000, 1800}, {50000, 1320}, {50000, 1800}};
    run_grid(spec, cells);
    std::ostringstream o;
    o << "wind_capacity_mw,largest_loss_mw,strategy,frequency_service_cost\n";
    for (const auto& c : cells) {
      o << num(c.wind) << ',' << num(c.loss) << ",co-optimized," << num(c.co - c.eo) << '\n';
      o << num(c.wind) << ',' << num(c.loss) << ",unlinked," << num(c.un - c.eo) << '\n';
    }
    stage.write("sensitivity.csv", o.str());
  }

  stage.write("annual_summary.json", summary.dump(2) + "\n");

  ExperimentOutput out;
  out.files = stage.commit();
  out.runs.push_back(std::move(runs.energy_only));
  for (auto& [s, r] : runs.others) out.runs.push_back(std::move(r));
  return out;
}

HourlyFile read_hourly_csv(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw ConfigError(path.string() + ": empty file");
  auto head = split_csv_line(line);
  auto col = [&](const std::string& name) {
    auto it = std::find(head.begin(), head.end(), name);
    if (it == head.end()) throw ConfigError(path.string() + ": missing column " + name);
    return static_cast<std::size_t>(it - head.begin());
  };
  const auto ch = col("hour"), cm = col("month"), cs = col("scale"), cc = col("total_cost");
  HourlyFile out;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != head.size())
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": wrong number of fields");
    try {
      out.hours.push_back(std::stoi(cells[ch]));
      out.months.push_back(std::stoi(cells[cm]));
      out.scale.push_back(std::stod(cells[cs]));
      out.total_cost.push_back(std::stod(cells[cc]));
    } catch (const std::logic_error&) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": bad number");
    }
  }
  return out;
}

Comparison compare_runs(const fs::path& a, const fs::path& b, const std::optional<fs::path>& baseline) {
  auto fa = read_hourly_csv(a), fb = read_hourly_csv(b);
  if (fa.hours != fb.hours) throw MismatchedCoverageError(a.string() + " and " + b.string() + " cover different hours");
  std::optional<HourlyFile> fbase;
  if (baseline) {
    fbase = read_hourly_csv(*baseline);
    if (fbase->hours != fa.hours)
      throw MismatchedCoverageError(baseline->string() + " covers different hours from the compared runs");
  }
  std::map<int, MonthDelta> by_month;
  std::map<int, double> base_cost;
  for (std::size_t t = 0; t < fa.hours.size(); ++t) {
    auto& m = by_month[fa.months[t]];
    m.month = fa.months[t];
    m.cost_a += fa.scale[t] * fa.total_cost[t];
    m.cost_b += fb.scale[t] * fb.total_cost[t];
    if (fbase) base_cost[fa.months[t]] += fbase->scale[t] * fbase->total_cost[t];
  }
  Comparison c;
  double base_total = 0.0;
  auto finish = [&](MonthDelta& m, double base) {
    m.delta = m.cost_b - m.cost_a;
    if (!fbase) return;
    m.fs_a = m.cost_a - base;
    m.fs_b = m.cost_b - base;
    if (*m.fs_a != 0.0) m.fs_change_pct = 100.0 * (*m.fs_b - *m.fs_a) / *m.fs_a;
  };
  for (auto& [month, m] : by_month) {
    finish(m, base_cost[month]);
    c.annual.cost_a += m.cost_a;
    c.annual.cost_b += m.cost_b;
    base_total += base_cost[month];
    c.months.push_back(m);
  }
  finish(c.annual, base_total);
  return c;
}

std::string comparison_csv(const Comparison& c) {
  std::ostringstream o;
  o << "month,cost_a,cost_b,delta,fs_cost_a,fs_cost_b,fs_change_pct\n";
  auto row = [&](const std::string& label, const MonthDelta& m) {
    o << label << ',' << num(m.cost_a) << ',' << num(m.cost_b) << ',' << num(m.delta) << ','
      << (m.fs_a ? num(*m.fs_a) : "") << ',' << (m.fs_b ? num(*m.fs_b) : "") << ','
      << (m.fs_change_pct ? num(*m.fs_change_pct) : "") << '\n';
  };
  for (const auto& m : c.months) row(std::to_string(m.month), m);
  row("annual", c.annual);
  return o.str();
}

}  // namespace fsuc
