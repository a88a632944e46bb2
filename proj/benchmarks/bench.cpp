#include <benchmark/benchmark.h>

#include "reflectionless/analysis.hpp"
#include "reflectionless/dynamics.hpp"
#include "reflectionless/herglotz.hpp"
#include "reflectionless/scattering.hpp"

using namespace refl;

namespace {

JacobiSpec defect_spec() { return random_perturbation(Background::periodic({1.0, 0.5}, {0.0, 0.0}), 1); }

void BM_MRightBoundary(benchmark::State& state) {
  const JacobiSpec spec = defect_spec();
  const auto p = BoundaryPoint::real_limit(0.9);
  for (auto _ : state) benchmark::DoNotOptimize(m_right(spec, 0, p));
}
BENCHMARK(BM_MRightBoundary);

void BM_ScatteringGrid(benchmark::State& state) {
  const JacobiSpec spec = defect_spec();
  const EnergyGrid grid = band_scan(spec.background(), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    for (double l : grid.points) benchmark::DoNotOptimize(scattering_matrix(spec, 0, l));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.points.size()));
}
BENCHMARK(BM_ScatteringGrid)->Arg(100)->Arg(1000);

void BM_CriteriaReport(benchmark::State& state) {
  const JacobiSpec spec(Background::free());
  const EnergyGrid grid = make_grid(spec.background(), -1.999, 1.999, 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(reflectionless_report(spec, grid, -3, 3));
}
BENCHMARK(BM_CriteriaReport)->Unit(benchmark::kMillisecond);

void BM_PropagatorBuild(benchmark::State& state) {
  const JacobiSpec spec = defect_spec();
  for (auto _ : state) benchmark::DoNotOptimize(SpectralPropagator(truncate(spec, state.range(0))));
}
BENCHMARK(BM_PropagatorBuild)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_PropagatorApply(benchmark::State& state) {
  const PropagationPlan plan = make_plan(defect_spec(), state.range(0), 0);
  const LatticeState phi = LatticeState::delta(plan.N(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(plan, phi, 10.0));
}
BENCHMARK(BM_PropagatorApply)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Landauer(benchmark::State& state) {
  const JacobiSpec spec = defect_spec();
  for (auto _ : state) benchmark::DoNotOptimize(landauer_current(spec, {1.0, 0.5, 1.0, -0.5}));
}
BENCHMARK(BM_Landauer)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
