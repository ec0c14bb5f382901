#include <benchmark/benchmark.h>

#include "wgl/approx_residual.hpp"
#include "wgl/coupling.hpp"
#include "wgl/fd_oracle.hpp"
#include "wgl/kernels.hpp"
#include "wgl/vertex_spectrum.hpp"

using namespace wgl;

namespace {

const cplx kZ{1.0, 1.0};

void BM_Shoot(benchmark::State& state) {
  auto prof = CurvatureProfile::bump(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(shoot(prof, kZ));
}
BENCHMARK(BM_Shoot);

void BM_Eigenvalues(benchmark::State& state) {
  auto prof = CurvatureProfile::bump(0.5);
  int count = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues(prof, count));
}
BENCHMARK(BM_Eigenvalues)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_SeriesKernel(benchmark::State& state) {
  auto prof = CurvatureProfile::bump(0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(make_vertex_kernel(prof, kZ, KernelMode::Series, 200));
}
BENCHMARK(BM_SeriesKernel)->Unit(benchmark::kMillisecond);

void BM_Coupling(benchmark::State& state) {
  CouplingContext ctx(CurvatureProfile::bump(0.5));
  Vec2 p{{1.0, 0.0}};
  for (auto _ : state) benchmark::DoNotOptimize(solve_coupling(ctx, kZ, 0.01, p));
}
BENCHMARK(BM_Coupling);

void BM_ResidualNorms(benchmark::State& state) {
  auto sol = assemble(CurvatureProfile::bump(0.5), 1, kZ, 0.1, 0.01, SourceFunction::exponential(1.0, 1.0),
                      SourceFunction::zero());
  for (auto _ : state) benchmark::DoNotOptimize(residual_norms(sol));
}
BENCHMARK(BM_ResidualNorms)->Unit(benchmark::kMillisecond);

void BM_FdResolvent(benchmark::State& state) {
  auto prof = CurvatureProfile::zero();
  double h = 1.0 / static_cast<double>(state.range(0));
  auto grid = make_grid(0.3, 0.027, cplx{0.0, 1.0}, h, 32);
  auto f1 = SourceFunction::exponential(1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fd_resolvent(grid, prof, 1, cplx{0.0, 1.0}, f1, SourceFunction::zero()));
}
BENCHMARK(BM_FdResolvent)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
