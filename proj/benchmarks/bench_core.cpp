#include <benchmark/benchmark.h>

#include <cmath>

#include "cnls/dynamics.hpp"
#include "cnls/groundstate.hpp"
#include "cnls/stability.hpp"

using namespace cnls;

namespace {

FieldVector soliton(const GridPtr& grid) {
  ComplexField u(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) u[i] = std::sqrt(2.0) / std::cosh(grid->coordinate(0, i));
  return FieldVector({u});
}

GridPtr line(benchmark::State& state) {
  return Grid::create({static_cast<std::size_t>(state.range(0))}, {40.0});
}

}  // namespace

static void BM_ForwardInverse(benchmark::State& state) {
  auto grid = line(state);
  const FieldVector w = soliton(grid);
  for (auto _ : state) {
    ComplexField back = inverse_transform(forward_transform(w[0]));
    benchmark::DoNotOptimize(back[0]);
  }
}
BENCHMARK(BM_ForwardInverse)->RangeMultiplier(4)->Range(256, 16384);

static void BM_SplitStep(benchmark::State& state) {
  auto grid = line(state);
  EnergyContext ctx(grid, families::scalar_cubic());
  SplitStep stepper(ctx, 1e-3);
  FieldVector z = soliton(grid);
  for (auto _ : state) {
    stepper.advance(z);
    benchmark::DoNotOptimize(z[0][0]);
  }
}
BENCHMARK(BM_SplitStep)->RangeMultiplier(4)->Range(256, 16384);

static void BM_EnergyAndGradient(benchmark::State& state) {
  auto grid = line(state);
  EnergyContext ctx(grid, families::manakov());
  const FieldVector w = soliton(grid);
  const FieldVector z({w[0], w[0]});
  for (auto _ : state) {
    benchmark::DoNotOptimize(energy_hat(ctx, z));
    benchmark::DoNotOptimize(energy_gradient(ctx, z));
  }
}
BENCHMARK(BM_EnergyAndGradient)->RangeMultiplier(4)->Range(256, 16384);

static void BM_OrbitDistance(benchmark::State& state) {
  auto grid = line(state);
  const FieldVector w = soliton(grid);
  const OrbitProxy proxy(w, true);
  const FieldVector z = std::polar(1.0, 0.3) * w;
  for (auto _ : state) benchmark::DoNotOptimize(orbit_distance(proxy, z));
}
BENCHMARK(BM_OrbitDistance)->RangeMultiplier(4)->Range(256, 4096);

static void BM_MinimizeCubic(benchmark::State& state) {
  auto grid = line(state);
  EnergyContext ctx(grid, families::scalar_cubic());
  const ConstraintSet c({2.0});
  for (auto _ : state) {
    const GroundStateResult r = minimize(ctx, c, MinimizeOptions{});
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_MinimizeCubic)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
