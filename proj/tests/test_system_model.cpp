#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>

#include <json.hpp>

#include "fsuc/system_model.hpp"

using namespace fsuc;

namespace {

const std::filesystem::path kConfigs = std::filesystem::path(FSUC_SOURCE_DIR) / "configs";

double mean(const std::vector<double>& v, std::size_t from, std::size_t n) {
  return std::accumulate(v.begin() + from, v.begin() + from + n, 0.0) / n;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("Table I config loads three classes") {
  auto m = load_system_file(kConfigs / "future.json");
  REQUIRE(m.thermal_classes.size() == 3);
  CHECK(m.thermal_classes[0].unit_count == 4);
  CHECK(m.thermal_classes[1].unit_count == 100);
  CHECK(m.thermal_classes[2].unit_count == 30);
  const auto& ccgt = m.thermal_classes[1];
  CHECK(ccgt.rated_power == 500.0);
  CHECK(ccgt.min_stable_gen == 250.0);
  CHECK(ccgt.no_load_cost == 7809.0);
  CHECK(ccgt.marginal_cost == 47.0);
  CHECK(ccgt.startup_cost == 10000.0);
  CHECK(ccgt.startup_time == 4);
  CHECK(ccgt.max_response == 50.0);
  CHECK(ccgt.response_slope == 0.5);
  // Null start-up fields read as zero.
  CHECK(m.thermal_classes[0].startup_cost == 0.0);
  CHECK(m.thermal_classes[0].must_run);
  CHECK(m.lost_unit_class() == 0);
}

TEST_CASE("bundled configs match the built-in GB systems") {
  auto future = load_system_file(kConfigs / "future.json");
  CHECK(future == gb_system(50000.0, 1800.0, 1));
  auto current = load_system_file(kConfigs / "current.json");
  CHECK(current == gb_system(25000.0, 1320.0, 1));
  REQUIRE(current.thermal_classes[0].unit_count == 1);
  CHECK(current.thermal_classes[0].rated_power == 1320.0);
}

TEST_CASE("empty config is a valid empty model") {
  auto m = load_system("{}");
  CHECK(m.thermal_classes.empty());
  CHECK(m.storage.empty());
  CHECK(m.hours() == 0);
  auto z = load_system(R"({"series": {"demand_mw": [0, 0], "wind_cf": [0, 0]}})");
  CHECK(z.hours() == 2);
}

TEST_CASE("malformed text and missing series are reported") {
  CHECK_THROWS_AS(load_system("{not json"), ConfigError);
  CHECK_THROWS_AS(load_system("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(load_system(R"({"series": {"demand_csv": "nope.csv", "wind_cf": []}})", "/nonexistent"),
                  MissingSeriesError);
  CHECK_THROWS_AS(load_system(R"({"thermal_classes": [{"name": "x", "unit_count": 1}]})"), ConfigError);
}

TEST_CASE("min_stable_gen above rated_power names the field") {
  auto doc = nlohmann::json::parse(read_text(kConfigs / "future.json"));
  doc["thermal_classes"][1]["min_stable_gen_mw"] = 600;
  try {
    load_system(doc.dump());
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("min_stable_gen_mw") != std::string::npos);
  }
}

TEST_CASE("every type invariant is rejected at load time") {
  const auto base = nlohmann::json::parse(read_text(kConfigs / "future.json"));
  using Edit = std::function<void(nlohmann::json&)>;
  const std::vector<std::pair<const char*, Edit>> cases{
      {"unit_count", [](auto& d) { d["thermal_classes"][1]["unit_count"] = -1; }},
      {"rated_power_mw", [](auto& d) { d["thermal_classes"][1]["rated_power_mw"] = 0; }},
      {"min_stable_gen_mw", [](auto& d) { d["thermal_classes"][1]["min_stable_gen_mw"] = 0; }},
      {"no_load_cost", [](auto& d) { d["thermal_classes"][1]["no_load_cost_gbp_per_h"] = -1; }},
      {"marginal_cost", [](auto& d) { d["thermal_classes"][1]["marginal_cost_gbp_per_mwh"] = -1; }},
      {"startup_cost", [](auto& d) { d["thermal_classes"][1]["startup_cost_gbp"] = -1; }},
      {"inertia_const", [](auto& d) { d["thermal_classes"][1]["inertia_const_s"] = -1; }},
      {"max_response_mw", [](auto& d) { d["thermal_classes"][1]["max_response_mw"] = 501; }},
      {"response_slope", [](auto& d) { d["thermal_classes"][1]["response_slope"] = 1.5; }},
      {"efr_capacity_mw", [](auto& d) { d["storage"][1]["efr_capacity_mw"] = 300; }},
      {"energy_cap_mwh", [](auto& d) { d["storage"][0]["energy_cap_mwh"] = 0; }},
      {"round_trip_eff", [](auto& d) { d["storage"][0]["round_trip_eff"] = 1.2; }},
      {"t_efr_s", [](auto& d) { d["frequency"]["t_efr_s"] = 12; }},
      {"f0_hz", [](auto& d) { d["frequency"]["f0_hz"] = 0; }},
      {"largest_loss_mw", [](auto& d) { d["frequency"]["largest_loss_mw"] = -5; }},
      {"series", [](auto& d) {
         d.erase("synthetic");
         d["series"] = {{"demand_mw", {1, 2}}, {"wind_cf", {0.5}}};
       }},
      {"wind_cf", [](auto& d) {
         d.erase("synthetic");
         d["series"] = {{"demand_mw", {1}}, {"wind_cf", {1.5}}};
       }},
      {"demand", [](auto& d) {
         d.erase("synthetic");
         d["series"] = {{"demand_mw", {-1}}, {"wind_cf", {0.5}}};
       }},
  };
  for (const auto& [field, edit] : cases) {
    CAPTURE(field);
    auto doc = base;
    edit(doc);
    try {
      load_system(doc.dump());
      FAIL("accepted an invalid model");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  }
}

TEST_CASE("serialize then load round-trips") {
  auto m = gb_system(25000.0, 1320.0, 3);
  auto again = load_system(serialize_system(m));
  CHECK(again == m);
  CHECK(serialize_system(again) == serialize_system(m));
}

TEST_CASE("series CSV round-trips and rejects bad headers") {
  auto dir = std::filesystem::temp_directory_path() / "fsuc_series_test";
  std::filesystem::create_directories(dir);
  std::vector<double> v{0.0, 1.5, 1e-9, 43000.123456789};
  write_series_csv(dir / "s.csv", v);
  CHECK(read_series_csv(dir / "s.csv") == v);
  std::ofstream(dir / "bad.csv") << "t,v\n0,1\n";
  CHECK_THROWS_AS(read_series_csv(dir / "bad.csv"), ConfigError);
  std::ofstream(dir / "gap.csv") << "hour,value\n0,1\n2,1\n";
  CHECK_THROWS_AS(read_series_csv(dir / "gap.csv"), ConfigError);
  CHECK_THROWS_AS(read_series_csv(dir / "none.csv"), MissingSeriesError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("synthetic January demand averages the requested mean") {
  auto p = synth_profiles(1, {1}, 43000.0, 25000.0);
  REQUIRE(p.demand.size() == 744);
  CHECK(std::abs(mean(p.demand, 0, 744) - 43000.0) <= 215.0);
  for (std::uint64_t seed : {2u, 3u, 99u}) {
    auto q = synth_profiles(seed, {1, 7}, 30000.0, 1.0);
    CHECK(std::abs(mean(q.demand, 0, 744) - 30000.0) <= 150.0);
  }
}

TEST_CASE("synthetic profiles are deterministic and bounded") {
  auto a = synth_profiles(5, {1, 2, 12}, 43000.0, 50000.0);
  auto b = synth_profiles(5, {1, 2, 12}, 43000.0, 50000.0);
  CHECK(a.demand == b.demand);
  CHECK(a.wind_cf == b.wind_cf);
  auto c = synth_profiles(6, {1, 2, 12}, 43000.0, 50000.0);
  CHECK(a.wind_cf != c.wind_cf);
  CHECK(a.demand.size() == static_cast<std::size_t>(month_hours(1) + month_hours(2) + month_hours(12)));
  CHECK(std::all_of(a.wind_cf.begin(), a.wind_cf.end(), [](double x) { return x >= 0.0 && x <= 1.0; }));
  CHECK(std::all_of(a.demand.begin(), a.demand.end(), [](double x) { return x >= 0.0; }));
}

TEST_CASE("zero wind capacity gives zero wind") {
  auto p = synth_profiles(1, {3}, 43000.0, 0.0);
  CHECK(std::all_of(p.wind_cf.begin(), p.wind_cf.end(), [](double x) { return x == 0.0; }));
}

TEST_CASE("calendar helpers") {
  int total = 0;
  for (int m = 1; m <= 12; ++m) {
    CHECK(month_start_hour(m) == total);
    CHECK(month_of_hour(total) == m);
    CHECK(month_of_hour(total + month_hours(m) - 1) == m);
    total += month_hours(m);
  }
  CHECK(total == 8760);
  CHECK_THROWS_AS(month_hours(13), std::out_of_range);
}
