#include <benchmark/benchmark.h>

#include <cmath>

#include "mcf/geometry.hpp"
#include "mcf/graphflow.hpp"
#include "mcf/levelset.hpp"

using namespace mcf;

namespace {

GraphField bowl(GridMode mode, double h) {
  const GridSpec g = make_grid(mode, h, 1.2, 1);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto ijk = g.unindex(i);
    const double x = g.coord(0, ijk[0]), y = g.dims() > 1 ? g.coord(1, ijk[1]) : 0.0;
    const double r = std::hypot(x, y);
    v[i] = r < 1.0 ? 1.0 / (1.0 - r) + r * r : ESCAPED;
  }
  return GraphField(g, std::move(v), 0.0);
}

void BM_graph_rhs_radial(benchmark::State& st) {
  const GraphField u = bowl(GridMode::Radial1D, 1.0 / st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(mcf_rhs(u));
  st.SetItemsProcessed(st.iterations() * u.values.size());
}
BENCHMARK(BM_graph_rhs_radial)->Arg(200)->Arg(1000);

void BM_graph_rhs_cartesian(benchmark::State& st) {
  const GraphField u = bowl(GridMode::Cartesian2D, 1.0 / st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(mcf_rhs(u));
  st.SetItemsProcessed(st.iterations() * u.values.size());
}
BENCHMARK(BM_graph_rhs_cartesian)->Arg(50)->Arg(100);

void BM_levelset_rhs(benchmark::State& st) {
  const GridSpec g = make_grid(static_cast<GridMode>(st.range(0)), 0.02, 1.0, 1);
  const LevelSetField w = truncated_signed_distance(Sphere{{0, 0, 0}, 0.6}, g, LevelSetLabel::Vtilde_boundary);
  for (auto _ : st) benchmark::DoNotOptimize(levelset_rhs(w));
  st.SetItemsProcessed(st.iterations() * w.values.size());
}
BENCHMARK(BM_levelset_rhs)
    ->Arg(static_cast<int>(GridMode::Axisym2D))
    ->Arg(static_cast<int>(GridMode::Cartesian2D))
    ->Arg(static_cast<int>(GridMode::Cartesian3D));

void BM_mollify(benchmark::State& st) {
  const GraphField u = bowl(GridMode::Cartesian2D, 1.0 / st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(mollify_initial(u, 0.05, 41.0));
  st.SetItemsProcessed(st.iterations() * u.values.size());
}
BENCHMARK(BM_mollify)->Arg(50)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
