#include "fsuc/system_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

namespace fsuc {

using nlohmann::json;

namespace {

constexpr std::array<int, 12> kMonthDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

double number_or(const json& obj, const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
  return it->get<double>();
}

double required_number(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing key '" + key + "'");
  if (!it->is_number()) throw ConfigError(where + ": key '" + key + "' must be a number");
  return it->get<double>();
}

int integer_or(const json& obj, const char* key, int fallback) {
  double v = number_or(obj, key, fallback);
  if (v != std::floor(v)) throw ConfigError(std::string("key '") + key + "' must be an integer");
  return static_cast<int>(v);
}

ThermalClass parse_thermal(const json& j, std::size_t index) {
  const std::string where = "thermal_classes[" + std::to_string(index) + "]";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  ThermalClass tc;
  tc.name = j.value("name", where);
  double count = required_number(j, "unit_count", where);
  if (count != std::floor(count)) throw ConfigError(where + ": unit_count must be an integer");
  tc.unit_count = static_cast<int>(count);
  tc.rated_power = required_number(j, "rated_power_mw", where);
  tc.min_stable_gen = required_number(j, "min_stable_gen_mw", where);
  tc.no_load_cost = number_or(j, "no_load_cost_gbp_per_h", 0.0);
  tc.marginal_cost = number_or(j, "marginal_cost_gbp_per_mwh", 0.0);
  // Table I lists start-up data for nuclear as "n/a"; null reads as zero.
  tc.startup_cost = number_or(j, "startup_cost_gbp", 0.0);
  tc.startup_time = integer_or(j, "startup_time_h", 0);
  tc.min_up = integer_or(j, "min_up_h", 0);
  tc.min_down = integer_or(j, "min_down_h", 0);
  tc.inertia_const = number_or(j, "inertia_const_s", 0.0);
  tc.max_response = number_or(j, "max_response_mw", 0.0);
  tc.response_slope = number_or(j, "response_slope", 0.0);
  tc.must_run = j.value("must_run", false);
  return tc;
}

StorageUnit parse_storage(const json& j, std::size_t index) {
  const std::string where = "storage[" + std::to_string(index) + "]";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  StorageUnit s;
  s.name = j.value("name", where);
  s.power_cap = required_number(j, "power_cap_mw", where);
  s.energy_cap = required_number(j, "energy_cap_mwh", where);
  s.round_trip_eff = required_number(j, "round_trip_eff", where);
  s.efr_capacity = number_or(j, "efr_capacity_mw", 0.0);
  return s;
}

std::vector<double> number_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(where + ": expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

int SystemModel::lost_unit_class() const {
  for (std::size_t g = 0; g < thermal_classes.size(); ++g) {
    const auto& tc = thermal_classes[g];
    if (!largest_infeed_class.empty()) {
      if (tc.name == largest_infeed_class) return static_cast<int>(g);
    } else if (freq.largest_loss > 0.0 && tc.rated_power == freq.largest_loss) {
      return static_cast<int>(g);
    }
  }
  return -1;
}

void validate(const SystemModel& model) {
  for (std::size_t g = 0; g < model.thermal_classes.size(); ++g) {
    const auto& tc = model.thermal_classes[g];
    const std::string w = "thermal_classes[" + std::to_string(g) + "] (" + tc.name + ")";
    if (tc.unit_count < 0) fail(w + ".unit_count", "must be >= 0");
    if (!(tc.rated_power > 0.0)) fail(w + ".rated_power_mw", "must be > 0");
    if (!(tc.min_stable_gen > 0.0)) fail(w + ".min_stable_gen_mw", "must be > 0");
    if (tc.min_stable_gen > tc.rated_power)
      fail(w + ".min_stable_gen_mw", "must not exceed rated_power_mw");
    if (tc.no_load_cost < 0.0) fail(w + ".no_load_cost_gbp_per_h", "must be >= 0");
    if (tc.marginal_cost < 0.0) fail(w + ".marginal_cost_gbp_per_mwh", "must be >= 0");
    if (tc.startup_cost < 0.0) fail(w + ".startup_cost_gbp", "must be >= 0");
    if (tc.startup_time < 0) fail(w + ".startup_time_h", "must be >= 0");
    if (tc.min_up < 0) fail(w + ".min_up_h", "must be >= 0");
    if (tc.min_down < 0) fail(w + ".min_down_h", "must be >= 0");
    if (tc.inertia_const < 0.0) fail(w + ".inertia_const_s", "must be >= 0");
    if (tc.max_response < 0.0) fail(w + ".max_response_mw", "must be >= 0");
    if (tc.max_response > tc.rated_power) fail(w + ".max_response_mw", "must not exceed rated_power_mw");
    if (tc.response_slope < 0.0 || tc.response_slope > 1.0) fail(w + ".response_slope", "must lie in [0, 1]");
  }
  for (std::size_t s = 0; s < model.storage.size(); ++s) {
    const auto& su = model.storage[s];
    const std::string w = "storage[" + std::to_string(s) + "] (" + su.name + ")";
    if (su.power_cap < 0.0) fail(w + ".power_cap_mw", "must be >= 0");
    if (!(su.energy_cap > 0.0)) fail(w + ".energy_cap_mwh", "must be > 0");
    if (!(su.round_trip_eff > 0.0 && su.round_trip_eff <= 1.0))
      fail(w + ".round_trip_eff", "must lie in (0, 1]");
    if (su.efr_capacity < 0.0) fail(w + ".efr_capacity_mw", "must be >= 0");
    if (su.efr_capacity > su.power_cap) fail(w + ".efr_capacity_mw", "must not exceed power_cap_mw");
  }
  const auto& f = model.freq;
  if (!(f.f0 > 0.0)) fail("frequency.f0_hz", "must be > 0");
  if (!(f.rocof_max > 0.0)) fail("frequency.rocof_max_hz_per_s", "must be > 0");
  if (!(f.delta_f_max > 0.0)) fail("frequency.delta_f_max_hz", "must be > 0");
  if (!(f.t_pfr > 0.0)) fail("frequency.t_pfr_s", "must be > 0");
  if (!(f.t_efr > 0.0)) fail("frequency.t_efr_s", "must be > 0");
  if (!(f.t_efr < f.t_pfr)) fail("frequency.t_efr_s", "must be smaller than t_pfr_s");
  if (f.largest_loss < 0.0) fail("frequency.largest_loss_mw", "must be >= 0");
  if (model.wind_capacity < 0.0) fail("wind_capacity_mw", "must be >= 0");
  if (model.voll < 0.0) fail("voll_gbp_per_mwh", "must be >= 0");
  if (!model.largest_infeed_class.empty() && model.lost_unit_class() < 0)
    fail("largest_infeed_class", "names no thermal class");
  if (model.demand_series.size() != model.wind_cf_series.size())
    fail("series", "demand and wind series lengths differ (" + std::to_string(model.demand_series.size()) +
                       " vs " + std::to_string(model.wind_cf_series.size()) + ")");
  for (std::size_t t = 0; t < model.demand_series.size(); ++t) {
    if (!(model.demand_series[t] >= 0.0)) fail("series.demand[" + std::to_string(t) + "]", "must be >= 0");
    double cf = model.wind_cf_series[t];
    if (!(cf >= 0.0 && cf <= 1.0)) fail("series.wind_cf[" + std::to_string(t) + "]", "must lie in [0, 1]");
  }
}

SystemModel load_system(const std::string& config_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("parse error: top level must be an object");

  SystemModel m;
  try {
    if (auto it = doc.find("frequency"); it != doc.end()) {
      const json& f = *it;
      m.freq.f0 = number_or(f, "f0_hz", m.freq.f0);
      m.freq.rocof_max = number_or(f, "rocof_max_hz_per_s", m.freq.rocof_max);
      m.freq.delta_f_max = number_or(f, "delta_f_max_hz", m.freq.delta_f_max);
      m.freq.t_pfr = number_or(f, "t_pfr_s", m.freq.t_pfr);
      m.freq.t_efr = number_or(f, "t_efr_s", m.freq.t_efr);
      m.freq.largest_loss = number_or(f, "largest_loss_mw", m.freq.largest_loss);
    }
    m.wind_capacity = number_or(doc, "wind_capacity_mw", 0.0);
    m.voll = number_or(doc, "voll_gbp_per_mwh", m.voll);
    m.largest_infeed_class = doc.value("largest_infeed_class", std::string{});
    if (auto it = doc.find("thermal_classes"); it != doc.end()) {
      if (!it->is_array()) throw ConfigError("thermal_classes: expected an array");
      for (std::size_t i = 0; i < it->size(); ++i) m.thermal_classes.push_back(parse_thermal((*it)[i], i));
    }
    if (auto it = doc.find("storage"); it != doc.end()) {
      if (!it->is_array()) throw ConfigError("storage: expected an array");
      for (std::size_t i = 0; i < it->size(); ++i) m.storage.push_back(parse_storage((*it)[i], i));
    }

    if (auto it = doc.find("synthetic"); it != doc.end()) {
      const json& s = *it;
      auto seed = static_cast<std::uint64_t>(number_or(s, "seed", 1.0));
      double mean = number_or(s, "mean_demand_mw", 43000.0);
      if (!(mean > 0.0)) throw ValidationError("synthetic.mean_demand_mw: must be > 0");
      Profiles p = synth_year(seed, mean, m.wind_capacity, integer_or(s, "pad_hours", 48));
      m.demand_series = std::move(p.demand);
      m.wind_cf_series = std::move(p.wind_cf);
    } else if (auto it2 = doc.find("series"); it2 != doc.end()) {
      const json& s = *it2;
      if (s.contains("demand_mw")) {
        m.demand_series = number_array(s["demand_mw"], "series.demand_mw");
      } else if (s.contains("demand_csv")) {
        auto path = base_dir / s["demand_csv"].get<std::string>();
        if (!std::filesystem::exists(path)) throw MissingSeriesError("series.demand_csv: no such file " + path.string());
        m.demand_series = read_series_csv(path);
      }
      if (s.contains("wind_cf")) {
        m.wind_cf_series = number_array(s["wind_cf"], "series.wind_cf");
      } else if (s.contains("wind_cf_csv")) {
        auto path = base_dir / s["wind_cf_csv"].get<std::string>();
        if (!std::filesystem::exists(path)) throw MissingSeriesError("series.wind_cf_csv: no such file " + path.string());
        m.wind_cf_series = read_series_csv(path);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  validate(m);
  return m;
}

SystemModel load_system_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return load_system(buf.str(), path.parent_path());
}

std::string serialize_system(const SystemModel& m) {
  json doc;
  doc["frequency"] = {{"f0_hz", m.freq.f0},
                      {"rocof_max_hz_per_s", m.freq.rocof_max},
                      {"delta_f_max_hz", m.freq.delta_f_max},
                      {"t_pfr_s", m.freq.t_pfr},
                      {"t_efr_s", m.freq.t_efr},
                      {"largest_loss_mw", m.freq.largest_loss}};
  doc["wind_capacity_mw"] = m.wind_capacity;
  doc["voll_gbp_per_mwh"] = m.voll;
  if (!m.largest_infeed_class.empty()) doc["largest_infeed_class"] = m.largest_infeed_class;
  doc["thermal_classes"] = json::array();
  for (const auto& tc : m.thermal_classes) {
    doc["thermal_classes"].push_back({{"name", tc.name},
                                      {"unit_count", tc.unit_count},
                                      {"rated_power_mw", tc.rated_power},
                                      {"min_stable_gen_mw", tc.min_stable_gen},
                                      {"no_load_cost_gbp_per_h", tc.no_load_cost},
                                      {"marginal_cost_gbp_per_mwh", tc.marginal_cost},
                                      {"startup_cost_gbp", tc.startup_cost},
                                      {"startup_time_h", tc.startup_time},
                                      {"min_up_h", tc.min_up},
                                      {"min_down_h", tc.min_down},
                                      {"inertia_const_s", tc.inertia_const},
                                      {"max_response_mw", tc.max_response},
                                      {"response_slope", tc.response_slope},
                                      {"must_run", tc.must_run}});
  }
  doc["storage"] = json::array();
  for (const auto& s : m.storage) {
    doc["storage"].push_back({{"name", s.name},
                              {"power_cap_mw", s.power_cap},
                              {"energy_cap_mwh", s.energy_cap},
                              {"round_trip_eff", s.round_trip_eff},
                              {"efr_capacity_mw", s.efr_capacity}});
  }
  doc["series"] = {{"demand_mw", m.demand_series}, {"wind_cf", m.wind_cf_series}};
  return doc.dump(2);
}

int month_hours(int month) {
  if (month < 1 || month > 12) throw std::out_of_range("month must be in 1..12");
  return kMonthDays[month - 1] * 24;
}

int month_start_hour(int month) {
  if (month < 1 || month > 12) throw std::out_of_range("month must be in 1..12");
  int h = 0;
  for (int m = 1; m < month; ++m) h += month_hours(m);
  return h;
}

int month_of_hour(int hour) {
  int h = hour;
  for (int m = 1; m <= 12; ++m) {
    if (h < month_hours(m)) return m;
    h -= month_hours(m);
  }
  return 12;
}

namespace {

// Demand relative to the January level.
double seasonal_demand_factor(int month) {
  double phase = 2.0 * std::numbers::pi * (month - 1) / 12.0;
  return 1.0 - 0.125 * (1.0 - std::cos(phase));
}

double mean_wind_cf(int month) {
  double phase = 2.0 * std::numbers::pi * (month - 1) / 12.0;
  return 0.36 + 0.10 * std::cos(phase);
}

// Evening peak, overnight trough, lower weekends.
double daily_shape(int hour_of_year) {
  int hod = hour_of_year % 24;
  int dow = (hour_of_year / 24) % 7;
  double h = static_cast<double>(hod);
  double shape = 1.0 + 0.16 * std::cos(2.0 * std::numbers::pi * (h - 18.0) / 24.0) +
                 0.06 * std::cos(4.0 * std::numbers::pi * (h - 10.0) / 24.0);
  if (dow >= 5) shape *= 0.92;
  return shape;
}

}  // namespace

Profiles synth_year(std::uint64_t seed, double mean_demand, double wind_capacity, int pad_hours) {
  (void)wind_capacity;
  if (!(mean_demand > 0.0)) throw std::invalid_argument("mean_demand must be > 0");
  if (pad_hours < 0) throw std::invalid_argument("pad_hours must be >= 0");
  const int year = 8760;
  const int total = year + pad_hours;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Wind: AR(1) deviation around a monthly mean, clipped to [0, 1].
  constexpr double kPhi = 0.95;
  constexpr double kMarginalSd = 0.15;
  const double innov = kMarginalSd * std::sqrt(1.0 - kPhi * kPhi);
  // Demand noise: small multiplicative AR(1).
  constexpr double kDemPhi = 0.8;
  const double dem_innov = 0.02 * std::sqrt(1.0 - kDemPhi * kDemPhi);

  Profiles p;
  p.demand.resize(total);
  p.wind_cf.resize(total);
  double e = 0.0;
  double d = 0.0;
  for (int t = 0; t < total; ++t) {
    int month = t < year ? month_of_hour(t) : 12;
    e = kPhi * e + innov * normal(rng);
    d = kDemPhi * d + dem_innov * normal(rng);
    p.wind_cf[t] = std::clamp(mean_wind_cf(month) + e, 0.0, 1.0);
    p.demand[t] = daily_shape(t) * (1.0 + d);
  }
  // Scale each month so it averages its seasonal target exactly. The pad
  // continues December's scaling.
  double dec_scale = 1.0;
  for (int m = 1; m <= 12; ++m) {
    int start = month_start_hour(m);
    int len = month_hours(m);
    double sum = 0.0;
    for (int t = start; t < start + len; ++t) sum += p.demand[t];
    double scale = mean_demand * seasonal_demand_factor(m) / (sum / len);
    for (int t = start; t < start + len; ++t) p.demand[t] *= scale;
    dec_scale = scale;
  }
  for (int t = year; t < total; ++t) p.demand[t] *= dec_scale;
  return p;
}

Profiles synth_profiles(std::uint64_t seed, const std::vector<int>& months, double mean_demand,
                        double wind_capacity) {
  Profiles year = synth_year(seed, mean_demand, wind_capacity, 0);
  Profiles out;
  for (int m : months) {
    int start = month_start_hour(m);
    int len = month_hours(m);
    out.demand.insert(out.demand.end(), year.demand.begin() + start, year.demand.begin() + start + len);
    out.wind_cf.insert(out.wind_cf.end(), year.wind_cf.begin() + start, year.wind_cf.begin() + start + len);
  }
  if (wind_capacity == 0.0) std::fill(out.wind_cf.begin(), out.wind_cf.end(), 0.0);
  return out;
}

std::vector<double> read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingSeriesError("cannot open series " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty series file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "hour,value") throw ConfigError(path.string() + ": header must be 'hour,value'");
  std::vector<double> values;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 'hour,value'");
    try {
      std::size_t used = 0;
      long hour = std::stol(line.substr(0, comma), &used);
      if (hour != static_cast<long>(values.size()))
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": hours must be consecutive from 0");
      values.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::logic_error&) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  return values;
}

void write_series_csv(const std::filesystem::path& path, const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "hour,value\n";
  out.precision(17);
  for (std::size_t t = 0; t < values.size(); ++t) out << t << ',' << values[t] << '\n';
}

std::vector<ThermalClass> gb_thermal_classes(double largest_loss) {
  ThermalClass nuclear{.name = "nuclear",
                       .unit_count = 4,
                       .rated_power = 1800.0,
                       .min_stable_gen = 1800.0,
                       .no_load_cost = 0.0,
                       .marginal_cost = 10.0,
                       .startup_cost = 0.0,
                       .startup_time = 0,
                       .min_up = 0,
                       .min_down = 0,
                       .inertia_const = 5.0,
                       .max_response = 0.0,
                       .response_slope = 0.0,
                       .must_run = true};
  if (largest_loss != nuclear.rated_power) {
    nuclear.unit_count = 1;
    nuclear.rated_power = largest_loss;
    nuclear.min_stable_gen = largest_loss;
  }
  ThermalClass ccgt{.name = "ccgt",
                    .unit_count = 100,
                    .rated_power = 500.0,
                    .min_stable_gen = 250.0,
                    .no_load_cost = 7809.0,
                    .marginal_cost = 47.0,
                    .startup_cost = 10000.0,
                    .startup_time = 4,
                    .min_up = 4,
                    .min_down = 1,
                    .inertia_const = 5.0,
                    .max_response = 50.0,
                    .response_slope = 0.5};
  ThermalClass ocgt{.name = "ocgt",
                    .unit_count = 30,
                    .rated_power = 100.0,
                    .min_stable_gen = 50.0,
                    .no_load_cost = 8000.0,
                    .marginal_cost = 200.0,
                    .startup_cost = 0.0,
                    .startup_time = 0,
                    .min_up = 0,
                    .min_down = 0,
                    .inertia_const = 5.0,
                    .max_response = 20.0,
                    .response_slope = 0.5};
  std::vector<ThermalClass> out;
  if (largest_loss > 0.0) out.push_back(nuclear);
  out.push_back(ccgt);
  out.push_back(ocgt);
  return out;
}

std::vector<StorageUnit> gb_storage() {
  return {StorageUnit{.name = "pumped_hydro", .power_cap = 2600.0, .energy_cap = 10000.0, .round_trip_eff = 0.75},
          StorageUnit{.name = "battery",
                      .power_cap = 250.0,
                      .energy_cap = 1000.0,
                      .round_trip_eff = 0.96,
                      .efr_capacity = 200.0}};
}

SystemModel gb_system(double wind_capacity, double largest_loss, std::uint64_t seed, double mean_demand) {
  SystemModel m;
  m.thermal_classes = gb_thermal_classes(largest_loss);
  m.storage = gb_storage();
  m.freq.largest_loss = largest_loss;
  m.wind_capacity = wind_capacity;
  if (largest_loss > 0.0) m.largest_infeed_class = "nuclear";
  Profiles p = synth_year(seed, mean_demand, wind_capacity);
  m.demand_series = std::move(p.demand);
  m.wind_cf_series = std::move(p.wind_cf);
  validate(m);
  return m;
}

}  // namespace fsuc
