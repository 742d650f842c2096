// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "incl/field.hpp"
#include "incl/oracle.hpp"
#include "incl/system.hpp"

using namespace incl;

namespace {

const ConformalMap& ellipse() {
  static const ConformalMap m(1.0, {0.5, 0.3});
  return m;
}

const MaterialPair kMat = MaterialPair::transmission(1.0, 1.0, 2.0, 3.0);

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::parallel : Exec::serial; }

void BM_single_layer(benchmark::State& state) {
  const oracle::BoundaryMesh mesh = oracle::make_mesh(ellipse(), int(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(oracle::single_layer_matrix(mesh, kMat.exterior(), exec_of(state)));
}

void BM_conormal(benchmark::State& state) {
  const oracle::BoundaryMesh mesh = oracle::make_mesh(ellipse(), int(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(oracle::conormal_matrix(mesh, 1.0, 1.0, exec_of(state)));
}

void BM_grid_field(benchmark::State& state) {
  LoadingSpec L;
  L.B = {cplx(1.0, -0.3)};
  const GeometryBundle geo(ellipse(), 16);
  const FieldEvaluator fe(geo, kMat, L, solve(assemble_E(kMat, geo, L)));
  const int n = int(state.range(0));
  const GridSpec grid{-3, 3, -3, 3, n, n};
  for (auto _ : state) benchmark::DoNotOptimize(fe.grid_field(grid, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * grid.size());
}

}  // namespace

BENCHMARK(BM_single_layer)->ArgsProduct({{128, 256, 512}, {0, 1}})->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_conormal)->ArgsProduct({{128, 256, 512}, {0, 1}})->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_grid_field)->ArgsProduct({{64, 128}, {0, 1}})->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
