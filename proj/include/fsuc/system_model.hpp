#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace fsuc {

// Errors raised while reading or validating a system configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : ConfigError {
  using ConfigError::ConfigError;
};
struct MissingSeriesError : ConfigError {
  using ConfigError::ConfigError;
};

// One aggregated thermal technology. Power in MW per unit, costs in GBP.
struct ThermalClass {
  std::string name;
  int unit_count = 0;
  double rated_power = 0.0;     // MW per unit
  double min_stable_gen = 0.0;  // MW per unit
  double no_load_cost = 0.0;    // GBP/h per online unit
  double marginal_cost = 0.0;   // GBP/MWh
  double startup_cost = 0.0;    // GBP per start
  int startup_time = 0;         // h between start decision and availability
  int min_up = 0;               // h
  int min_down = 0;             // h
  double inertia_const = 0.0;   // s
  double max_response = 0.0;    // MW per unit
  double response_slope = 0.0;  // fraction of headroom deliverable as response
  bool must_run = false;        // every unit online every hour

  bool operator==(const ThermalClass&) const = default;
};

struct StorageUnit {
  std::string name;
  double power_cap = 0.0;       // MW
  double energy_cap = 0.0;      // MWh
  double round_trip_eff = 1.0;  // fraction in (0, 1]
  double efr_capacity = 0.0;    // MW, 0 if not an EFR provider

  bool operator==(const StorageUnit&) const = default;
};

// Post-fault security parameters.
struct FrequencyParams {
  double f0 = 50.0;           // Hz
  double rocof_max = 0.5;     // Hz/s
  double delta_f_max = 0.8;   // Hz
  double t_pfr = 10.0;        // s
  double t_efr = 1.0;         // s
  double largest_loss = 0.0;  // MW

  bool operator==(const FrequencyParams&) const = default;
};

// Immutable after load; share read-only between workers.
struct SystemModel {
  std::vector<ThermalClass> thermal_classes;
  std::vector<StorageUnit> storage;
  FrequencyParams freq;
  double wind_capacity = 0.0;  // MW
  double voll = 30000.0;       // GBP/MWh
  // Class holding the largest infeed; its own inertia is lost with the fault.
  // Empty means "the class whose unit rating equals freq.largest_loss", if any.
  std::string largest_infeed_class;
  std::vector<double> demand_series;   // MW, hourly, hour 0 = 1 Jan 00:00
  std::vector<double> wind_cf_series;  // capacity factor, hourly

  bool operator==(const SystemModel&) const = default;

  // Index of the class whose unit is the largest infeed, or -1.
  [[nodiscard]] int lost_unit_class() const;
  [[nodiscard]] std::size_t hours() const { return demand_series.size(); }
};

// Throws ValidationError naming the first violated invariant.
void validate(const SystemModel& model);

// Parses a JSON configuration document. Relative series paths resolve against
// base_dir. A "synthetic" section requests bundled profiles instead of files.
SystemModel load_system(const std::string& config_text,
                        const std::filesystem::path& base_dir = {});
SystemModel load_system_file(const std::filesystem::path& path);

// Serializes the full model, series inlined, in the format load_system reads.
std::string serialize_system(const SystemModel& model);

struct Profiles {
  std::vector<double> demand;   // MW
  std::vector<double> wind_cf;  // [0, 1]
};

// Synthetic demand and wind for the given calendar months (1..12), concatenated
// in the order given. Deterministic for a seed. Each January block averages
// mean_demand. With wind_capacity == 0 the capacity factors are all zero.
Profiles synth_profiles(std::uint64_t seed, const std::vector<int>& months, double mean_demand,
                        double wind_capacity);

// Full-year synthetic profiles plus `pad_hours` of extra hours after 31 Dec so a
// look-ahead horizon can run past the last month.
Profiles synth_year(std::uint64_t seed, double mean_demand, double wind_capacity,
                    int pad_hours = 48);

// Calendar helpers for a non-leap year.
int month_hours(int month);
int month_start_hour(int month);
int month_of_hour(int hour);

// Time series CSV with header `hour,value`.
std::vector<double> read_series_csv(const std::filesystem::path& path);
void write_series_csv(const std::filesystem::path& path, const std::vector<double>& values);

// Table I of the GB study. The nuclear row is sized for the given largest loss:
// the Table I fleet (4 x 1800 MW) when the loss equals its rating, otherwise one
// must-run unit rated at the loss.
std::vector<ThermalClass> gb_thermal_classes(double largest_loss);
std::vector<StorageUnit> gb_storage();

// GB model with synthetic year-long profiles.
SystemModel gb_system(double wind_capacity, double largest_loss, std::uint64_t seed,
                      double mean_demand = 43000.0);

}  // namespace fsuc
