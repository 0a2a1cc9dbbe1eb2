#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ma3d/bench.hpp"
#include "ma3d/newton.hpp"
#include "ma3d/operators.hpp"
#include "ma3d/polytope.hpp"

using namespace ma3d;

namespace {

Stencil stencil_for(int which) {
  return make_table1_stencil(which == 0 ? Table1Stencil::small : Table1Stencil::large);
}

void BM_MeasurePolytope(benchmark::State& state) {
  const Stencil st = stencil_for(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(1);
  const SymMatrix m = random_spd(rng, 8.0);
  std::vector<double> offsets;
  for (std::size_t k = 0; k < st.size(); ++k) offsets.push_back(0.5 * m.quad(st[k]));
  for (auto _ : state) benchmark::DoNotOptimize(measure_polytope(st, offsets));
}
BENCHMARK(BM_MeasurePolytope)->Arg(0)->Arg(1);

void BM_ApplyDV(benchmark::State& state) {
  const TestCase tc = make_smoothed_cone_case();
  const Grid g = build_grid(Domain::unit_cube(), 12, stencil_for(static_cast<int>(state.range(0))));
  const Field u = Field::sample(g, tc.exact);
  for (auto _ : state) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.interior_count(); ++i) s += apply_DV(u, i);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.interior_count()));
}
BENCHMARK(BM_ApplyDV)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_AssembleSystem(benchmark::State& state) {
  const TestCase tc = make_smoothed_cone_case();
  const OperatorConfig cfg = OperatorConfig::proposed(stencil_for(0));
  const Grid g = build_grid(Domain::unit_cube(), static_cast<int>(state.range(0)), cfg.stencil());
  const Field u = Field::sample(g, tc.exact);
  const std::vector<double> target = make_target(g, tc.density, tc.boundary);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_system(u, target, cfg));
}
BENCHMARK(BM_AssembleSystem)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
  const TestCase tc = make_smoothed_cone_case();
  const OperatorConfig cfg = OperatorConfig::proposed(stencil_for(0));
  const Grid g = build_grid(Domain::unit_cube(), static_cast<int>(state.range(0)), cfg.stencil());
  for (auto _ : state) benchmark::DoNotOptimize(solve(g, tc.density, tc.boundary, cfg));
}
BENCHMARK(BM_Solve)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
