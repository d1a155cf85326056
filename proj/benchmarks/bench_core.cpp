#include <benchmark/benchmark.h>

#include "terracelab/front_analysis.hpp"
#include "terracelab/ode_periodic.hpp"
#include "terracelab/pde.hpp"

using namespace terracelab;

static void BM_Step(benchmark::State& state) {
  const auto spec = NonlinearitySpec::bistable(0.25);
  Grid g(-50.0, 50.0, static_cast<int>(state.range(0)));
  Field f = heaviside_ic(g, 0.0, 1.0);
  for (auto _ : state) {
    f = step(f, spec, 0.005);
    benchmark::DoNotOptimize(f.values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Step)->Arg(1001)->Arg(4001)->Arg(8001);

static void BM_PoincareMap(benchmark::State& state) {
  const auto spec =
      NonlinearitySpec::time_periodic(NonlinearitySpec::bistable(0.3), 0.5, 1.0);
  double h = 0.7;
  for (auto _ : state) {
    h = poincare_map(spec, h);
    benchmark::DoNotOptimize(h);
  }
}
BENCHMARK(BM_PoincareMap);

static void BM_ZeroNumber(benchmark::State& state) {
  std::vector<double> v(static_cast<size_t>(state.range(0)));
  for (size_t i = 0; i < v.size(); ++i)
    v[i] = std::sin(0.37 * static_cast<double>(i));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sign_changes(v, 1e-9));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ZeroNumber)->Arg(1 << 12)->Arg(1 << 16);

static void BM_LevelCrossing(benchmark::State& state) {
  Grid g(-50.0, 50.0, 8001);
  Field f(g, 0.0);
  for (int i = 0; i < g.n_x; ++i)
    f.values[i] = 1.0 / (1.0 + std::exp(g.x(i) / 1.4142));
  for (auto _ : state) {
    benchmark::DoNotOptimize(level_crossing(f, 0.5, Crossing::rightmost));
  }
}
BENCHMARK(BM_LevelCrossing);

BENCHMARK_MAIN();
