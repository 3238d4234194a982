#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "memochaos/chaos.hpp"
#include "memochaos/entangle.hpp"
#include "memochaos/integrate.hpp"
#include "memochaos/model.hpp"
#include "memochaos/sweep.hpp"

using namespace memochaos;

static void BM_MomentDerivatives(benchmark::State& state) {
  SystemParams p;
  MomentState s{};
  s.a = {0.3, -0.2};
  s.b = {-0.4, 0.1};
  s.na = 0.13;
  s.nb = 0.17;
  const auto f = memory_coefficients(5.0, p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(moment_derivatives(s, f, p));
  }
}
BENCHMARK(BM_MomentDerivatives);

static void BM_MemoryCoefficients(benchmark::State& state) {
  SystemParams p;
  double tau = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(memory_coefficients(tau, p));
    tau += 0.013;
    if (tau > 20.0) tau = 0.0;
  }
}
BENCHMARK(BM_MemoryCoefficients);

static void BM_QuadratureOracle(benchmark::State& state) {
  SystemParams p;
  p.gamma = 5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(memory_coefficients_quadrature(7.5, p, 32));
  }
}
BENCHMARK(BM_QuadratureOracle);

static void BM_Trajectory(benchmark::State& state) {
  SystemParams p;
  p.gamma = 0.8;
  IntegratorConfig c;
  c.t_end = static_cast<double>(state.range(0));
  c.t_transient = 0.5 * c.t_end;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(p, vacuum_state(), c));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Trajectory)->Arg(300)->Arg(3000)->Unit(benchmark::kMillisecond);

static void BM_Wolf(benchmark::State& state) {
  SystemParams p;
  p.gamma = 0.8;
  const auto obs = observables(integrate(p, vacuum_state(), IntegratorConfig{}), 1000.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lyapunov_wolf(obs));
  }
}
BENCHMARK(BM_Wolf)->Unit(benchmark::kMillisecond);

static void BM_Benettin(benchmark::State& state) {
  SystemParams p;
  p.gamma = 0.8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lyapunov_benettin(p, vacuum_state(), IntegratorConfig{}));
  }
}
BENCHMARK(BM_Benettin)->Unit(benchmark::kMillisecond);

static void BM_AnalyzePoint(benchmark::State& state) {
  const AnalysisConfig a;
  for (auto _ : state) {
    benchmark::DoNotOptimize(analyze_point(1.37, -0.97, 10.0, a));
  }
}
BENCHMARK(BM_AnalyzePoint)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
