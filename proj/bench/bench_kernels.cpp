// Serial reference vs OpenMP for the two parallel kernels.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fsuc/frequency.hpp"
#include "fsuc/lp.hpp"

namespace {

struct Csc {
  std::vector<int> start, index;
  std::vector<double> value, rho;
  std::vector<std::int8_t> basic;
};

// Random sparse matrix with about `per_col` entries per column.
Csc make_csc(int rows, int cols, int per_col) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> r(0, rows - 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Csc m;
  m.start.push_back(0);
  for (int j = 0; j < cols; ++j) {
    for (int k = 0; k < per_col; ++k) {
      m.index.push_back(r(rng));
      m.value.push_back(u(rng));
    }
    m.start.push_back(static_cast<int>(m.index.size()));
    m.basic.push_back(static_cast<std::int8_t>(u(rng) < -0.8));
  }
  for (int i = 0; i < rows; ++i) m.rho.push_back(u(rng));
  return m;
}

template <bool Omp>
void BM_price_row(benchmark::State& state) {
  const int cols = static_cast<int>(state.range(0));
  auto m = make_csc(cols / 2, cols, 4);
  std::vector<double> out(cols);
  for (auto _ : state) {
    if constexpr (Omp)
      fsuc::lp::kernels::price_row_omp(m.start, m.index, m.value, m.rho, m.basic, out);
    else
      fsuc::lp::kernels::price_row_serial(m.start, m.index, m.value, m.rho, m.basic, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * cols);
}

std::vector<fsuc::ServicePoint> service_points(int n) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<fsuc::ServicePoint> pts;
  for (int i = 0; i < n; ++i) {
    double efr = 200.0 * u(rng);
    pts.push_back({90000.0 * (1.0 + 2.0 * u(rng)), efr, (1800.0 - efr) * (1.0 + 2.0 * u(rng))});
  }
  return pts;
}

template <bool Omp>
void BM_batch_nadir(benchmark::State& state) {
  auto pts = service_points(static_cast<int>(state.range(0)));
  fsuc::FrequencyParams fp;
  fp.largest_loss = 1800.0;
  std::vector<double> out(pts.size());
  for (auto _ : state) {
    if constexpr (Omp)
      fsuc::kernels::batch_nadir_omp(pts, fp, 1e-2, out);
    else
      fsuc::kernels::batch_nadir_serial(pts, fp, 1e-2, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(pts.size()));
}

}  // namespace

BENCHMARK(BM_price_row<false>)->Name("price_row/serial")->Arg(10000)->Arg(100000);
BENCHMARK(BM_price_row<true>)->Name("price_row/omp")->Arg(10000)->Arg(100000);
BENCHMARK(BM_batch_nadir<false>)->Name("batch_nadir/serial")->Arg(64)->Arg(512);
BENCHMARK(BM_batch_nadir<true>)->Name("batch_nadir/omp")->Arg(64)->Arg(512);

BENCHMARK_MAIN();
