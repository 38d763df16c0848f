#include <benchmark/benchmark.h>

#include "stokes_prox/gradient.hpp"
#include "stokes_prox/measurement.hpp"
#include "stokes_prox/prox.hpp"
#include "stokes_prox/rng.hpp"
#include "stokes_prox/simkit.hpp"

using namespace stokes_prox;

namespace {

DataCube scene(std::size_t n, std::size_t frames) {
  PhantomSpec spec;
  spec.height = spec.width = n;
  return synthesize(make_phantom(spec), dpi_schedule(frames), gaussian_psf(n, n, 3.0), 1.0, 42);
}

void BM_Convolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto psf = gaussian_psf(n, n, 3.0);
  RngStream rng(1);
  const auto x = uniform_draws(rng, n * n);
  std::vector<double> out(n * n);
  for (auto _ : state) {
    psf.apply(x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_Convolve)->Arg(64)->Arg(128)->Arg(256);

void BM_Measure(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto cube = scene(n, 8);
  const auto x = make_phantom(PhantomSpec{.height = n, .width = n});
  for (auto _ : state) benchmark::DoNotOptimize(measure(x, cube));
}
BENCHMARK(BM_Measure)->Arg(64)->Arg(128);

void BM_MeasureAdjoint(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto cube = scene(n, 8);
  FrameSet d;
  for (const auto& f : cube.frames) d.push_back(f.measurements);
  for (auto _ : state) benchmark::DoNotOptimize(measure_adjoint(d, cube));
}
BENCHMARK(BM_MeasureAdjoint)->Arg(64)->Arg(128);

void BM_Gradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RngStream rng(2);
  ChannelStack x(3, Shape{n, n}, uniform_draws(rng, 3 * n * n));
  DualStack y(3, x.shape());
  for (auto _ : state) {
    grad_forward(x, y);
    grad_adjoint(y, x);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_Gradient)->Arg(64)->Arg(256);

void BM_ProjectSoc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RngStream rng(3);
  const ChannelStack x(3, Shape{n, n}, uniform_draws(rng, 3 * n * n, -2.0, 2.0));
  for (auto _ : state) {
    auto y = x;
    project_soc_stack_inplace(y);
    benchmark::DoNotOptimize(y.values().data());
  }
}
BENCHMARK(BM_ProjectSoc)->Arg(64)->Arg(256);

}  // namespace
