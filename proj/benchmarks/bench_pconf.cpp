#include <benchmark/benchmark.h>

#include <memory>

#include "pconf/energy.hpp"
#include "pconf/fields.hpp"
#include "pconf/limits.hpp"
#include "pconf/optimizer.hpp"
#include "pconf/singular.hpp"

using namespace pconf;

namespace {

MappingField wobbly_map(int n) {
  auto g = std::make_shared<const DiskGrid>(Domain::disk(), n, 2 * n);
  return MappingField::sample(g, [](cplx z) { return z + 0.1 * z * z + 0.05 * std::conj(z); });
}

void BM_Energy(benchmark::State& state) {
  const auto m = wobbly_map(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(energy_p(m, 2.5));
  state.SetItemsProcessed(state.iterations() * m.grid().size());
}
BENCHMARK(BM_Energy)->Arg(64)->Arg(128)->Arg(256);

void BM_Gradient(benchmark::State& state) {
  const auto m = wobbly_map(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(energy_gradient(m, 2.5));
  state.SetItemsProcessed(state.iterations() * m.grid().size());
}
BENCHMARK(BM_Gradient)->Arg(64)->Arg(128)->Arg(256);

// Refreshing the derivatives is what every line-search trial pays.
void BM_MappingAssign(benchmark::State& state) {
  auto m = wobbly_map(static_cast<int>(state.range(0)));
  const auto values = m.f().values;
  for (auto _ : state) m.assign(values);
}
BENCHMARK(BM_MappingAssign)->Arg(64)->Arg(256);

void BM_Beurling(benchmark::State& state) {
  const auto plan = TransformPlan::around_disk(static_cast<int>(state.range(0)), 1.0, 8.0);
  const auto g = disk_indicator(plan);
  for (auto _ : state) benchmark::DoNotOptimize(beurling_transform(g, plan));
}
BENCHMARK(BM_Beurling)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_BeltramiSolve(benchmark::State& state) {
  const auto plan = TransformPlan::around_disk(static_cast<int>(state.range(0)), 1.0, 8.0);
  BoxField mu = disk_indicator(plan);
  for (auto& v : mu.values) v *= 0.3;
  const auto problem = beltrami_problem(mu, plan);
  for (auto _ : state) benchmark::DoNotOptimize(solve_beltrami(problem, plan));
}
BENCHMARK(BM_BeltramiSolve)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_MinimizeSinusoidal(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto g = std::make_shared<const DiskGrid>(Domain::disk(), n, 2 * n);
  const auto boundary = boundary_from_trace(sinusoidal_trace(0.2));
  for (auto _ : state) benchmark::DoNotOptimize(minimize(boundary, 2.0, g, {}));
}
BENCHMARK(BM_MinimizeSinusoidal)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Douglas(benchmark::State& state) {
  const auto trace = sinusoidal_trace(0.2);
  for (auto _ : state) benchmark::DoNotOptimize(douglas_value(trace, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Douglas)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
