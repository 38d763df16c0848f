#include <benchmark/benchmark.h>

#include "stokes_prox/simkit.hpp"
#include "stokes_prox/solvers.hpp"

using namespace stokes_prox;

namespace {

DataCube scene(std::size_t n) {
  PhantomSpec spec;
  spec.height = spec.width = n;
  return synthesize(make_phantom(spec), dpi_schedule(8), gaussian_psf(n, n, 3.0), 1.0, 42);
}

SolverConfig fixed_iterations(std::size_t iters, Regularizer variant) {
  SolverConfig cfg;
  cfg.regularizer = {{0.1, 0.03, 0.03}, 1e-2, variant};
  cfg.max_outer = iters;
  cfg.stop_tol = 0.0;
  return cfg;
}

// Per-iteration cost: each timed run does 50 outer iterations.
void BM_PdwbIterations(benchmark::State& state) {
  const auto cube = scene(static_cast<std::size_t>(state.range(0)));
  const auto cfg = fixed_iterations(50, Regularizer::TV);
  const ChannelStack x0(3, cube.shape);
  const DualStack y0(3, cube.shape);
  for (auto _ : state) benchmark::DoNotOptimize(pdwb_solve(x0, y0, cube, cfg).x.values().data());
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_PdwbIterations)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_FbwbIterations(benchmark::State& state) {
  const auto cube = scene(static_cast<std::size_t>(state.range(0)));
  auto cfg = fixed_iterations(50, Regularizer::TVH);
  cfg.constrained = false;
  const ChannelStack x0(3, cube.shape);
  for (auto _ : state) benchmark::DoNotOptimize(fbwb_solve(x0, cube, cfg).x.values().data());
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_FbwbIterations)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
