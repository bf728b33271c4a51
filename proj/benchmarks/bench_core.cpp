#include <benchmark/benchmark.h>

#include <cmath>

#include "helebern/evolve.hpp"

using namespace helebern;

namespace {

GridSpec grid_for(benchmark::State& state) { return GridSpec::box(2, -4.0, 4.0, static_cast<int>(state.range(0))); }

void BM_Reinitialize(benchmark::State& state) {
  const GridSpec g = grid_for(state);
  LevelSetField phi = sdf_ball({0, 0, 0}, 2.0, g);
  for (double& v : phi.phi.values) v *= 1.7;
  for (auto _ : state) benchmark::DoNotOptimize(reinitialize(phi));
}

void BM_SolveCapacityCold(benchmark::State& state) {
  const GridSpec g = grid_for(state);
  const SourceSpec src{sdf_ball({0, 0, 0}, 1.0, g), 1.0};
  const LevelSetField omega = sdf_ball({0, 0, 0}, 2.7, g);
  for (auto _ : state) benchmark::DoNotOptimize(solve_capacity(omega, src, SolverParams{}));
}

void BM_SolveCapacityWarm(benchmark::State& state) {
  const GridSpec g = grid_for(state);
  const SourceSpec src{sdf_ball({0, 0, 0}, 1.0, g), 1.0};
  const CapacitySolution prev = solve_capacity(sdf_ball({0, 0, 0}, 2.7, g), src, SolverParams{});
  const LevelSetField omega = sdf_ball({0, 0, 0}, 2.7 - 1e-3, g);
  for (auto _ : state) benchmark::DoNotOptimize(solve_capacity(omega, src, SolverParams{}, &prev.u));
}

void BM_Step(benchmark::State& state) {
  const GridSpec g = grid_for(state);
  const SourceSpec src{sdf_ball({0, 0, 0}, 1.0, g), 1.0};
  const LevelSetField phi = sdf_ball({0, 0, 0}, 2.7, g);
  const SpeedLaw law{ConstantSpeed{-1.0}, std::exp(2.0)};
  const CapacitySolution warm = solve_capacity(phi, src, SolverParams{});
  StepParams p;
  for (auto _ : state) benchmark::DoNotOptimize(step(phi, law, src, p, &warm.u));
}

}  // namespace

BENCHMARK(BM_Reinitialize)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveCapacityCold)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveCapacityWarm)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Step)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
