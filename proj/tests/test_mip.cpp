#include <doctest.h>

#include <cmath>
#include <random>

#include "fsuc/mip.hpp"
#include "tiny_uc.hpp"

using namespace fsuc::mip;

TEST_CASE("one-row LP") {
  MipProblem p;
  int x = p.add_variable("x", -kInf, kInf, false, 1.0);
  p.add_row("r", {x}, {1.0}, Sense::GreaterEqual, 3.0);
  auto s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(3.0));
}

TEST_CASE("knapsack against enumeration") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> w(1, 20), v(1, 30);
  for (int trial = 0; trial < 30; ++trial) {
    MipProblem p;
    std::vector<int> wt, val;
    std::vector<int> idx;
    std::vector<double> coef;
    for (int i = 0; i < 10; ++i) {
      wt.push_back(w(rng));
      val.push_back(v(rng));
      idx.push_back(p.add_variable("b" + std::to_string(i), 0, 1, true, -val.back()));
      coef.push_back(wt.back());
    }
    int cap = 40;
    p.add_row("cap", idx, coef, Sense::LessEqual, cap);
    int best = 0;
    for (int mask = 0; mask < 1024; ++mask) {
      int tw = 0, tv = 0;
      for (int i = 0; i < 10; ++i)
        if (mask >> i & 1) {
          tw += wt[i];
          tv += val[i];
        }
      if (tw <= cap) best = std::max(best, tv);
    }
    SolveOptions o;
    o.gap_tol = 0.0;
    auto s = solve(p, o);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(-best));
    CHECK(p.max_violation(s.values) <= 1e-6);
  }
}

TEST_CASE("tiny unit commitment matches exhaustive enumeration") {
  std::mt19937_64 rng(2024);
  SolveOptions o;
  o.gap_tol = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    auto in = tiny::random_instance(rng);
    auto p = tiny::build(in);
    REQUIRE(p.num_integer() <= 12);
    double expect = tiny::brute_force(in);
    auto s = solve(p, o);
    INFO("trial " << trial);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(expect).epsilon(1e-6));
    CHECK(p.max_violation(s.values) <= 1e-6);
    CHECK(s.mip_gap <= 1e-9);
  }
}

TEST_CASE("two-unit two-hour instance") {
  tiny::Instance in;
  in.classes.push_back({2, 250, 500, 7809, 47, 10000, 0, 0});
  in.demand = {600, 300};
  in.voll = 30000;
  auto p = tiny::build(in);
  SolveOptions o;
  o.gap_tol = 0.0;
  auto s = solve(p, o);
  REQUIRE(s.status == Status::Optimal);
  // Hand check: two units then one, 600 > 500 forces both in hour 0.
  double expect = 2 * 10000 + 2 * 7809 + 47 * 600 + 7809 + 47 * 300;
  CHECK(s.objective == doctest::Approx(expect));
  CHECK(tiny::brute_force(in) == doctest::Approx(expect));
}

TEST_CASE("rotated cone at the nadir data point") {
  MipProblem p;
  int x = p.add_variable("x", 1.7375, 1.7375);
  int y = p.add_variable("y", 0.0, kInf, false, 1.0);
  int z = p.add_variable("z", 2.8284, 2.8284);
  p.add_cone("nadir", x, y, z);
  auto s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(2.8284 * 2.8284 / 1.7375).epsilon(1e-6));
  CHECK(std::round(s.objective * 1000.0) / 1000.0 == doctest::Approx(4.604));
  CHECK(cone_violation(s.values[x], s.values[y], s.values[z]) <= 1e-6);
  CHECK(s.stats.cuts > 0);
}

namespace {

// min c'x over a box with a cone x0*x1 >= x2^2 and a few integers.
MipProblem random_cone_problem(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MipProblem p;
  int x = p.add_variable("x", 0.0, 1.0 + 20.0 * u(rng), true, 1.0 + 3.0 * u(rng));
  int y = p.add_variable("y", 0.0, 30.0, false, 1.0 + 3.0 * u(rng));
  int z = p.add_variable("z", -10.0, 10.0, false, 0.0);
  int w = p.add_variable("w", 0.0, 5.0, true, -1.0);
  p.add_row("link", {z, w}, {1.0, -1.0}, Sense::Equal, 1.0 + 4.0 * u(rng));
  p.add_cone("k", x, y, z);
  return p;
}

}  // namespace

TEST_CASE("stored cuts are valid for the cone") {
  std::mt19937_64 rng(99);
  std::vector<ConeCut> all;
  for (int i = 0; i < 20; ++i) {
    auto s = solve(random_cone_problem(rng));
    CHECK(s.status == Status::Optimal);
    all.insert(all.end(), s.cuts.begin(), s.cuts.end());
  }
  for (int i = 0; i < 200; ++i) {
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    all.push_back(cone_cut(0, std::abs(u(rng)), std::abs(u(rng)), u(rng)));
  }
  REQUIRE(all.size() > 50);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = -kInf;
  for (int k = 0; k < 10000; ++k) {
    double x = 100.0 * u(rng) * u(rng);
    double y = 100.0 * u(rng) * u(rng);
    double z = std::sqrt(x * y) * (2.0 * u(rng) - 1.0);
    if (k % 10 == 0) z = std::sqrt(x * y);
    for (const auto& c : all) worst = std::max(worst, (c.ax * x + c.ay * y + c.az * z) / std::max(1.0, x + y));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("incumbents improve monotonically and runs are deterministic") {
  std::mt19937_64 rng(31);
  SolveOptions o;
  o.gap_tol = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    auto in = tiny::random_instance(rng);
    auto p = tiny::build(in);
    auto a = solve(p, o);
    auto b = solve(p, o);
    const auto& h = a.stats.incumbent_history;
    for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] <= h[i - 1]);
    CHECK(a.values == b.values);
    CHECK(a.objective == b.objective);
    CHECK(a.stats.nodes == b.stats.nodes);
  }
}

TEST_CASE("infeasible, unbounded and node-limited problems") {
  MipProblem inf;
  int a = inf.add_variable("a", 0, 1, true, 1.0);
  int b = inf.add_variable("b", 0, 1, true, 1.0);
  inf.add_row("r", {a, b}, {1.0, 1.0}, Sense::Equal, 1.5);
  CHECK(solve(inf).status == Status::Infeasible);

  MipProblem unb;
  int c = unb.add_variable("c", 0, kInf, true, -1.0);
  unb.add_row("r", {c}, {1.0}, Sense::GreaterEqual, 2.0);
  CHECK(solve(unb).status == Status::Unbounded);

  std::mt19937_64 rng(3);
  auto in = tiny::random_instance(rng);
  SolveOptions o;
  o.node_limit = 0;
  o.diving = false;
  auto s = solve(tiny::build(in), o);
  CHECK((s.status == Status::Limit || s.status == Status::FeasibleGap || s.status == Status::Optimal));

  MipProblem bad;
  bad.add_variable("v", 2.0, 1.0);
  CHECK_THROWS_AS(solve(bad), ProblemError);
}

TEST_CASE("interchange export") {
  MipProblem empty;
  auto text = export_mps(empty);
  CHECK(text.find("ROWS") != std::string::npos);
  CHECK(text.find("COLUMNS") != std::string::npos);
  CHECK(text.find("RHS") != std::string::npos);
  CHECK(text.find("BOUNDS") != std::string::npos);
  CHECK(text.find("ENDATA") != std::string::npos);

  std::mt19937_64 rng(8);
  auto p = random_cone_problem(rng);
  auto one = export_mps(p);
  CHECK(one == export_mps(p));
  CHECK(one.find("* CONE k C0000000 C0000001 C0000002") != std::string::npos);
  CHECK(one.find("INTORG") != std::string::npos);
  CHECK(export_cone_sidecar(p) == "# cone x y z  (x*y >= z^2, x,y >= 0)\nk C0000000 C0000001 C0000002\n");
}
