#include "ewtls/kernels.hpp"
#include "ewtls/simulation.hpp"

#include <benchmark/benchmark.h>

using namespace ewtls;

namespace {

ObjectiveContext context(Index m, int threads) {
  ScenarioSpec spec = default_scenario();
  spec.dims.m = m;
  const Dataset ds = generate_dataset(spec, 1);
  return ObjectiveContext(ds.data, ds.errors, threads);
}

void BM_EvaluateSerial(benchmark::State& state) {
  const ObjectiveContext ctx = context(state.range(0), 1);
  const Matrix x = ctx.data().a().colPivHouseholderQr().solve(ctx.data().b());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::evaluate(ctx, x, true));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EvaluateOmp(benchmark::State& state) {
  const ObjectiveContext ctx = context(state.range(0), 0);
  const Matrix x = ctx.data().a().colPivHouseholderQr().solve(ctx.data().b());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::evaluate(ctx, x, true));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MeatSerial(benchmark::State& state) {
  const ObjectiveContext ctx = context(state.range(0), 1);
  const Matrix x = ctx.data().a().colPivHouseholderQr().solve(ctx.data().b());
  const Vector u = Vector::Unit(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::sandwich_meat(ctx, x, u));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MeatOmp(benchmark::State& state) {
  const ObjectiveContext ctx = context(state.range(0), 0);
  const Matrix x = ctx.data().a().colPivHouseholderQr().solve(ctx.data().b());
  const Vector u = Vector::Unit(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::sandwich_meat(ctx, x, u));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MonteCarlo(benchmark::State& state) {
  ScenarioSpec spec = default_scenario();
  spec.dims.m = 500;
  McOptions opts;
  opts.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_monte_carlo(spec, 20, opts).summary.median_error);
}

}  // namespace

BENCHMARK(BM_EvaluateSerial)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK(BM_EvaluateOmp)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK(BM_MeatSerial)->Arg(1000)->Arg(100000);
BENCHMARK(BM_MeatOmp)->Arg(1000)->Arg(100000);
BENCHMARK(BM_MonteCarlo)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
