#include <benchmark/benchmark.h>

#include <vector>

#include "aoi/experiments.hpp"
#include "aoi/relaxed_solver.hpp"

namespace {

aoi::ScenarioConfig uniform_config() {
  aoi::ScenarioConfig c;
  c.kind = aoi::ScenarioKind::asym_uniform;
  c.n = 8;
  c.m = 100;
  c.sweep = {0.2, 0.5, 0.8};
  c.trials = 8;
  c.horizon = 20'000;
  c.seed = 3;
  return c;
}

void BM_ScenarioSerial(benchmark::State& state) {
  const auto c = uniform_config();
  for (auto _ : state) benchmark::DoNotOptimize(aoi::run_scenario_serial(c));
}
BENCHMARK(BM_ScenarioSerial)->Unit(benchmark::kMillisecond);

void BM_ScenarioParallel(benchmark::State& state) {
  const auto c = uniform_config();
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(aoi::run_scenario(c, jobs));
}
BENCHMARK(BM_ScenarioParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SolveEta(benchmark::State& state) {
  std::vector<aoi::ChainParams> sensors;
  for (int n = 0; n < state.range(0); ++n) sensors.emplace_back(0.3 + 0.4 * n / state.range(0), 100);
  for (auto _ : state) benchmark::DoNotOptimize(aoi::solve_eta(sensors));
}
BENCHMARK(BM_SolveEta)->Arg(4)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
