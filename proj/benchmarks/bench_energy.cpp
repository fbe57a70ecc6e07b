#include <benchmark/benchmark.h>

#include "knotenergy/curves.hpp"
#include "knotenergy/energy.hpp"
#include "knotenergy/flow.hpp"
#include "knotenergy/variation.hpp"

using namespace knotenergy;

namespace {

ClosedCurve trefoil(Index n) { return resample_arclength(builtin_curve("trefoil", 4096), n); }

void BM_Energies(benchmark::State& state) {
  const ClosedCurve c = trefoil(state.range(0));
  const PhiModel m = PhiModel::power_law(2.5);
  for (auto _ : state) benchmark::DoNotOptimize(energies(c, m));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Energies)->RangeMultiplier(2)->Range(128, 2048)->Complexity(benchmark::oNSquared)->Unit(benchmark::kMillisecond);

void BM_EnergiesSingleThread(benchmark::State& state) {
  const ClosedCurve c = trefoil(state.range(0));
  const PhiModel m = PhiModel::power_law(2.5);
  EnergyOptions options;
  options.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(energies(c, m, options));
}
BENCHMARK(BM_EnergiesSingleThread)->Arg(512)->Unit(benchmark::kMillisecond);

// The custom kernel goes through the tabulated tail instead of closed forms.
void BM_EnergiesCustomKernel(benchmark::State& state) {
  const ClosedCurve c = trefoil(state.range(0));
  const PhiModel m = PhiModel::custom([](double x) { return x * x + x * x * x * x; });
  for (auto _ : state) benchmark::DoNotOptimize(energies(c, m));
}
BENCHMARK(BM_EnergiesCustomKernel)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Gradient(benchmark::State& state) {
  const ClosedCurve c = trefoil(state.range(0));
  const PhiModel m = PhiModel::power_law(2.5);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_gradient(c, m));
}
BENCHMARK(BM_Gradient)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);

void BM_SecondVariation(benchmark::State& state) {
  const ClosedCurve c = trefoil(state.range(0));
  const PhiModel m = PhiModel::power_law(2.5);
  const VariationField f = VariationField::on(c, c.points());
  for (auto _ : state) benchmark::DoNotOptimize(second_variation(Part::Sum, c, f, f, m));
}
BENCHMARK(BM_SecondVariation)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_FlowStep(benchmark::State& state) {
  const ClosedCurve c = resample_arclength(builtin_curve("perturbed", 4096), state.range(0));
  const PhiModel m = PhiModel::power_law(2.0);
  const FlowConfig config;
  const FlowState start = start_flow(c, m, config);
  for (auto _ : state) benchmark::DoNotOptimize(step(start, m, config));
}
BENCHMARK(BM_FlowStep)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
