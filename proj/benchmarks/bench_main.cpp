#include <benchmark/benchmark.h>

#include <random>

#include "hypowiener/diffusion.hpp"
#include "hypowiener/kernel.hpp"
#include "hypowiener/measure.hpp"
#include "hypowiener/shells.hpp"

using namespace hypowiener;

static void BM_KernelEuclidean(benchmark::State& state) {
  const HeatKernel K(GroupModel::euclidean(2));
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(K({{x, 0.2}, 1.0}, {{0.0, 0.0}, 0.0}));
    x += 1e-9;
  }
}
BENCHMARK(BM_KernelEuclidean);

// Random points so nothing is served from a cache.
static void BM_KernelHeisenberg(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  for (auto _ : state) {
    const double a = n(rng), b = n(rng);
    const double w2 = 2.0 * (a * a + b * b);
    benchmark::DoNotOptimize(heisenberg_log_p1(w2, state.range(0) * n(rng), {}));
  }
}
BENCHMARK(BM_KernelHeisenberg)->Arg(0)->Arg(1)->Arg(10);

static void BM_Increment(benchmark::State& state) {
  const GroupModel m = state.range(0) ? GroupModel::heisenberg() : GroupModel::euclidean(1);
  CounterRng rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(draw_increment(m, 1e-3, rng));
}
BENCHMARK(BM_Increment)->Arg(0)->Arg(1);

static void BM_ShellVolume(benchmark::State& state) {
  const GroupModel m = GroupModel::euclidean(1);
  const HeatKernel K(m);
  const auto bc = euclidean_bound_constants(1);
  const Domain d = Domain::half_space_complement(m, {{0.0}, 0.0}, Domain::default_box(m, 2.0, 2.0, 1.0));
  ShellSpec spec{0.5, 10, &d, &K, {}};
  const VolumeBudget budget{static_cast<std::size_t>(state.range(0)), true};
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(shell_volume(spec, bc, budget, seed++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ShellVolume)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
