#include <benchmark/benchmark.h>

#include "nonlocal/barrier.hpp"
#include "nonlocal/grid.hpp"
#include "nonlocal/operator.hpp"
#include "nonlocal/rigidity.hpp"

using namespace nonlocal;

namespace {

Vec point2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

void BM_EvalCosine(benchmark::State& state) {
  const auto mu = SpectralMeasure::uniform(2, 1.0, static_cast<int>(state.range(0)));
  const auto u = ScalarField::cosine(point2(1.3, -0.7), 1.0, 0.2);
  const FractionalOrder s(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(evalI(u, point2(0.4, 0.1), mu, s).value);
}
BENCHMARK(BM_EvalCosine)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_EvalBarrier(benchmark::State& state) {
  const auto mu = SpectralMeasure::uniform(2, 1.0);
  const FractionalOrder s(0.5);
  const auto b = buildBarrier(0.5, s, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evalI(b.field(), point2(0.6, 0.3), mu, s, {1e-8, 1e-8}).value);
  }
}
BENCHMARK(BM_EvalBarrier)->Unit(benchmark::kMillisecond);

void BM_Multiplier(benchmark::State& state) {
  const Multiplier m(SpectralMeasure::uniform(2, 1.0), FractionalOrder(0.5));
  const Vec xi = point2(2.0, -3.0);
  for (auto _ : state) benchmark::DoNotOptimize(m(xi));
}
BENCHMARK(BM_Multiplier);

void BM_SpectralApply(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const double L = 8.0 * 3.141592653589793;
  const auto grid = randomSmoothGrid(2, N, L, 7);
  const SpectralOperator op(2, N, L, multiplier(SpectralMeasure::uniform(2, 1.0), FractionalOrder(0.5)));
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(grid.values()));
}
BENCHMARK(BM_SpectralApply)->Arg(32)->Arg(64)->Arg(128);

void BM_FlowSteps(benchmark::State& state) {
  const auto grid = randomSmoothGrid(2, 64, 8.0 * 3.141592653589793, 7);
  const auto mu = SpectralMeasure::uniform(2, 1.0);
  FlowOptions opt;
  opt.dt = 0.02;
  opt.steps = 1000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        periodicFlow(grid, Nonlinearity::cubic(1.0), mu, FractionalOrder(0.5), opt).finalOscillation);
  }
}
BENCHMARK(BM_FlowSteps)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
