// Serial reference vs OpenMP kernels. The simulator parallelizes over
// replications and the exact optimizer over k1 rows.

#include <benchmark/benchmark.h>

#include "aoi/optimizer.hpp"
#include "aoi/sim.hpp"

using namespace aoi;

namespace {

void simulate_kernel(benchmark::State& state, Execution exec) {
  SimConfig cfg;
  cfg.scenario = Scenario{20, 7, 10, ShiftedExp(1, 1), ShiftedExp(2, 0.5), StreamMix(0.6),
                          Generation::at_will()};
  cfg.cycles = state.range(0);
  cfg.replications = 8;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg, exec));
  state.SetItemsProcessed(state.iterations() * cfg.cycles * cfg.replications);
}

void optimize_kernel(benchmark::State& state, Execution exec) {
  ScenarioTemplate t;
  t.n = state.range(0);
  t.delay_II = ShiftedExp(2, 0.5);
  t.mix = StreamMix(0.6);
  OptimizeOptions opts;
  opts.exec = exec;
  for (auto _ : state) benchmark::DoNotOptimize(optimize(t, 0.5, opts));
  state.SetItemsProcessed(state.iterations() * t.n * t.n);
}

}  // namespace

BENCHMARK_CAPTURE(simulate_kernel, serial, Execution::Serial)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(simulate_kernel, parallel, Execution::Parallel)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(optimize_kernel, serial, Execution::Serial)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(optimize_kernel, parallel, Execution::Parallel)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
