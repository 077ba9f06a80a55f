#include "resonance_atlas/counting_harness.hpp"
#include "resonance_atlas/density.hpp"
#include "resonance_atlas/radial_resonances.hpp"

#include <benchmark/benchmark.h>

using namespace resonance_atlas;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) == 0 ? Execution::serial : Execution::parallel; }

void BM_DensityTable(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_density_table(3, 91, {}, mode(state)));
}
BENCHMARK(BM_DensityTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_FindResonances(benchmark::State& state) {
  const RadialStepPotential pot{1.0, {-20.0, 0.0}};
  for (auto _ : state) benchmark::DoNotOptimize(find_resonances(pot, 12.0, {}, mode(state)));
}
BENCHMARK(BM_FindResonances)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SolveFamily(benchmark::State& state) {
  FamilyExperiment e = FamilyExperiment::radial_bump({1.0, {-20.0, 0.0}}, {1.0, {-12.0, 3.0}}, 0.0, 0.5, 3);
  e.sectors = {SectorQuery::full(6.0)};
  for (auto _ : state) benchmark::DoNotOptimize(solve_family(e, mode(state)));
}
BENCHMARK(BM_SolveFamily)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ChannelFunction(benchmark::State& state) {
  const RadialStepPotential pot{1.0, {-20.0, 0.0}};
  const int ell = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(channel_function(ell, pot, {17.0, -9.0}, true));
}
BENCHMARK(BM_ChannelFunction)->Arg(0)->Arg(20)->Arg(60);

} // namespace

BENCHMARK_MAIN();
