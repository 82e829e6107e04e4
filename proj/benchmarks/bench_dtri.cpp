#include <benchmark/benchmark.h>

#include <random>
#include <variant>

#include "dtri/dual_geometry.hpp"
#include "dtri/fixtures.hpp"
#include "dtri/laplace.hpp"
#include "dtri/mesh_io.hpp"
#include "dtri/regularity.hpp"

using namespace dtri;

namespace {

MeshData grid(int k) {
  FixtureParams p;
  p.k = k;
  return make_fixture("flat_torus_grid", p);
}

// Random surface whose duality structure is edge-positive, so regularize
// runs its full flip loop without stalling.
MeshData positive_surface(int vertices, std::uint64_t seed) {
  FixtureParams p;
  p.vertices = vertices;
  p.weight_spread = 0.15;
  MeshData mesh = make_fixture("random_surface", p, seed);
  WeightedMetric& w = std::get<WeightedMetric>(mesh.metric);
  for (int attempt = 0; attempt < 200; ++attempt) {
    const DualityMetric d = weighted_to_duality(mesh.complex, w);
    if (is_edge_positive(mesh.complex, d).positive) break;
    for (double& x : w.w) x *= 0.5;
  }
  return mesh;
}

void BM_DualGeometry(benchmark::State& state) {
  const MeshData mesh = grid(static_cast<int>(state.range(0)));
  const auto& w = std::get<WeightedMetric>(mesh.metric);
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_dual_geometry(mesh.complex, w));
  state.SetItemsProcessed(state.iterations() * mesh.complex.count_alive(2));
}
BENCHMARK(BM_DualGeometry)->Arg(8)->Arg(16)->Arg(32);

void BM_AssembleLaplacian(benchmark::State& state) {
  const MeshData mesh = grid(static_cast<int>(state.range(0)));
  const auto& w = std::get<WeightedMetric>(mesh.metric);
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_laplacian(mesh.complex, w));
}
BENCHMARK(BM_AssembleLaplacian)->Arg(8)->Arg(16)->Arg(32);

void BM_Regularize(benchmark::State& state) {
  const MeshData mesh = positive_surface(static_cast<int>(state.range(0)), 11);
  const auto& w = std::get<WeightedMetric>(mesh.metric);
  const DualityMetric d0 = weighted_to_duality(mesh.complex, w);
  const std::vector<double> f(static_cast<size_t>(mesh.complex.vertex_count()), 0.0);
  long flips = 0;
  for (auto _ : state) {
    state.PauseTiming();
    SimplicialComplex cx = mesh.complex;
    DualityMetric d = d0;
    state.ResumeTiming();
    const RegularizeReport rep = regularize(cx, d, f);
    flips += static_cast<long>(rep.flips.size());
    benchmark::DoNotOptimize(rep);
  }
  state.counters["flips"] = static_cast<double>(flips) / static_cast<double>(state.iterations());
}
BENCHMARK(BM_Regularize)->Arg(30)->Arg(60)->Arg(120);

void BM_Poisson(benchmark::State& state) {
  const MeshData mesh = grid(static_cast<int>(state.range(0)));
  const auto& w = std::get<WeightedMetric>(mesh.metric);
  const LaplaceSystem sys = assemble_laplacian(mesh.complex, w);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uf(-1.0, 1.0);
  std::vector<double> f(static_cast<size_t>(mesh.complex.vertex_count()));
  double mean = 0.0;
  for (double& x : f) mean += (x = uf(rng));
  mean /= static_cast<double>(f.size());
  for (double& x : f) x -= mean;  // equal volumes on the grid
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_poisson(sys, f));
}
BENCHMARK(BM_Poisson)->Arg(8)->Arg(16)->Arg(32);

void BM_MeshRoundTrip(benchmark::State& state) {
  FixtureParams p;
  p.vertices = static_cast<int>(state.range(0));
  const MeshData mesh = make_fixture("random_surface", p, 3);
  for (auto _ : state) {
    const std::string doc = write_mesh(mesh);
    benchmark::DoNotOptimize(parse_mesh(doc));
  }
}
BENCHMARK(BM_MeshRoundTrip)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
