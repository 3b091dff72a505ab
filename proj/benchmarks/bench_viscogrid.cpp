#include <benchmark/benchmark.h>

#include "viscogrid/fem.hpp"
#include "viscogrid/mesh.hpp"
#include "viscogrid/mgopt.hpp"
#include "viscogrid/smoother.hpp"

using namespace viscogrid;

namespace {

const MeshHierarchy& disk() {
  static const MeshHierarchy h = MeshHierarchy::unit_disk(7);
  return h;
}

const Discretization& disc_at(int k) {
  static std::vector<std::unique_ptr<Discretization>> cache(7);
  if (!cache[k]) cache[k] = std::make_unique<Discretization>(disk().level(k));
  return *cache[k];
}

ModelSpec model_for(int which) {
  switch (which) {
    case 0: return ModelSpec::herschel_bulkley(1.75, 0.2);
    case 1: return ModelSpec::bingham(0.4);
    default: return ModelSpec::casson(0.2);
  }
}

}  // namespace

static void BM_BuildHierarchy(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(MeshHierarchy::unit_disk(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_BuildHierarchy)->DenseRange(5, 7)->Unit(benchmark::kMillisecond);

static void BM_Gradient(benchmark::State& state) {
  const Discretization& disc = disc_at(static_cast<int>(state.range(0)));
  const ModelSpec m = model_for(static_cast<int>(state.range(1)));
  const NodalField u = poisson_solve(disc, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(eval_gradient(u, m, disc));
  state.SetItemsProcessed(state.iterations() * disc.mesh().num_triangles());
}
BENCHMARK(BM_Gradient)->ArgsProduct({{4, 6}, {0, 1, 2}})->Unit(benchmark::kMicrosecond);

static void BM_PreconditionerFactorize(benchmark::State& state) {
  const Discretization& disc = disc_at(static_cast<int>(state.range(0)));
  const ModelSpec m = ModelSpec::herschel_bulkley(1.75, 0.2);
  const NodalField u = poisson_solve(disc, 1.0);
  SpdSolver solver;
  for (auto _ : state) {
    solver.factorize(assemble_preconditioner(u, m, disc, 1e-6));
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_PreconditionerFactorize)->DenseRange(4, 6)->Unit(benchmark::kMillisecond);

static void BM_DescentStep(benchmark::State& state) {
  const Discretization& disc = disc_at(6);
  const ModelSpec m = model_for(static_cast<int>(state.range(0)));
  Smoother s(disc, m);
  const NodalField start = poisson_solve(disc, 1.0);
  const NodalField zero = NodalField::zeros(disc.mesh());
  for (auto _ : state) {
    state.PauseTiming();
    NodalField u = start;
    state.ResumeTiming();
    s.descent_iterate(u, zero);
    benchmark::DoNotOptimize(u.values.data());
  }
}
BENCHMARK(BM_DescentStep)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

static void BM_VCycle(benchmark::State& state) {
  const MeshHierarchy h = disk().finest_levels(5);
  MgOpt mg(h, model_for(static_cast<int>(state.range(0))));
  const NodalField start = poisson_solve(mg.finest(), 1.0);
  const NodalField zero = NodalField::zeros(mg.finest().mesh());
  for (auto _ : state) benchmark::DoNotOptimize(mg.vcycle(4, start, zero));
}
BENCHMARK(BM_VCycle)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

static void BM_Fmg(benchmark::State& state) {
  const MeshHierarchy h = disk().finest_levels(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fmg_solve(ModelSpec::casson(0.2), h, MgoptConfig{}));
}
BENCHMARK(BM_Fmg)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
