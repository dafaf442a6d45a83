#include <benchmark/benchmark.h>

#include "crq/background.hpp"
#include "crq/flow.hpp"
#include "crq/presets.hpp"

#include <algorithm>

using namespace crq;

static void BM_MakeSpace(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(make_space(n, 1.0));
}
BENCHMARK(BM_MakeSpace)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_MakeBackground(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto space = make_space(n, 1.0);
  const auto w = random_field(*space, 1, std::max(1, n / 2), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(make_background(space, w));
}
BENCHMARK(BM_MakeBackground)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_ComputeR(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto space = make_space(n, 2.0);
  const auto bg = make_background(space, random_field(*space, 2, std::max(1, n / 2), 0.3));
  const auto lam = random_field(*space, 3, n, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(compute_r(bg, lam));
}
BENCHMARK(BM_ComputeR)->Arg(4)->Arg(6)->Arg(8);

static void BM_PresetFlow(benchmark::State& state) {
  const auto space = make_space(6, 2.0);
  const auto preset = make_preset("conformal-c03", *space);
  const auto bg = make_background(space, preset.w);
  FlowConfig cfg;
  cfg.truncation = 6;
  cfg.integrator = state.range(0) == 0 ? Integrator::exact_perp : Integrator::imex_cn;
  const auto s0 = init_flow(bg, preset.lambda0, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(run_flow(bg, s0, cfg));
  state.SetLabel(std::string(to_string(cfg.integrator)));
}
BENCHMARK(BM_PresetFlow)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
