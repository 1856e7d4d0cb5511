#include <benchmark/benchmark.h>

#include "avmarket/config_io.hpp"
#include "avmarket/equilibrium.hpp"
#include "avmarket/sensitivity.hpp"

namespace {

using namespace avmarket;

const ExperimentConfig& cfg() {
  static const ExperimentConfig c = default_config();
  return c;
}

const PeriodSpec& peak() {
  static const std::vector<PeriodSpec> periods = cfg().periods();
  return periods.front();
}

void BM_PhiEval(benchmark::State& state) {
  const PricePoint price{30.0, 10.0};
  PhiVector x{0.55, 1.5, 0.04, 0.5};
  for (auto _ : state) {
    PhiEval e = phi_map(x, price, cfg(), peak());
    benchmark::DoNotOptimize(e.next);
  }
}
BENCHMARK(BM_PhiEval);

void BM_SolveBenign(benchmark::State& state) {
  const PricePoint price{30.0, 10.0};
  for (auto _ : state) {
    SolveResult r = solve_equilibrium(price, cfg(), peak());
    benchmark::DoNotOptimize(r.state.demand_qo);
  }
}
BENCHMARK(BM_SolveBenign);

// Near-free service floods the market; the hardest of the sampled regimes.
void BM_SolveCongested(benchmark::State& state) {
  const PricePoint price{1.0, 45.0};
  for (auto _ : state) {
    SolveResult r = solve_equilibrium(price, cfg(), peak());
    benchmark::DoNotOptimize(r.state.demand_qo);
  }
}
BENCHMARK(BM_SolveCongested);

void BM_SensitivityMatrix(benchmark::State& state) {
  const PricePoint price{30.0, 10.0};
  const SolveResult r = solve_equilibrium(price, cfg(), peak());
  for (auto _ : state) {
    JacobianBundle jb = residual_jacobian(r.state, price, cfg(), peak());
    SensitivityResult s = equilibrium_sensitivity(jb);
    benchmark::DoNotOptimize(s.S);
  }
}
BENCHMARK(BM_SensitivityMatrix);

void BM_ObjectiveGradient(benchmark::State& state) {
  const PricePoint price{30.0, 10.0};
  const SolveResult r = solve_equilibrium(price, cfg(), peak());
  for (auto _ : state) {
    PeriodGradient g =
        objective_gradient(ScenarioKind::first_best, 0.0, r.state, price, cfg(), peak());
    benchmark::DoNotOptimize(g.d_fare);
  }
}
BENCHMARK(BM_ObjectiveGradient);

}  // namespace

BENCHMARK_MAIN();
