// Writes MPS files plus this library's LP-relaxation and MIP optima, for an
// external solver to cross-check. Usage: mps_dump OUT_DIR

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "fsuc/frequency.hpp"
#include "fsuc/lp.hpp"
#include "fsuc/mip.hpp"
#include "fsuc/suc.hpp"
#include "tiny_uc.hpp"

using namespace fsuc;
namespace fs = std::filesystem;

namespace {

double relaxation(const mip::MipProblem& p) {
  lp::DualSimplex s(p.to_lp());
  if (s.solve() != lp::LpStatus::Optimal) throw std::runtime_error("relaxation not optimal");
  return s.objective() + p.objective_offset();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: mps_dump OUT_DIR\n";
    return 2;
  }
  fs::path dir = argv[1];
  fs::create_directories(dir);
  std::ofstream index(dir / "expected.txt");
  index.precision(17);
  auto emit = [&](const std::string& name, const mip::MipProblem& p, bool with_mip) {
    std::ofstream(dir / (name + ".mps")) << mip::export_mps(p);
    index << name << ' ' << relaxation(p);
    if (with_mip) {
      mip::SolveOptions o;
      o.gap_tol = 0.0;
      auto s = mip::solve(p, o);
      if (s.status != mip::Status::Optimal) throw std::runtime_error(name + ": MIP not optimal");
      index << ' ' << s.objective;
    }
    index << '\n';
  };

  std::mt19937_64 rng(99);
  for (int i = 0; i < 20; ++i) emit("tiny" + std::to_string(i), tiny::build(tiny::random_instance(rng)), true);

  for (double loss : {1320.0, 1800.0}) {
    auto model = gb_system(loss == 1800.0 ? 50000 : 25000, loss, 1);
    TreeConfig cfg;
    cfg.horizon = 6;
    auto tree = build_tree(tree_input(model, 3000, cfg), cfg);
    FormulationOptions o;
    o.fixed_efr_volume = 200.0;
    o.fixed_pfr_requirement = 1500.0;
    o.inertia_floor = min_inertia_for_rocof(model.freq);
    emit("gb" + std::to_string(static_cast<int>(loss)), build_suc(model, tree, RollingState::start(model), o).mip,
         false);
  }
  return 0;
}
