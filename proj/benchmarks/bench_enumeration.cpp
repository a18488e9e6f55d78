#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "vrcov/geometry.hpp"

using namespace vrcov;

namespace {

// Expected degree near 10 in the unit square for every intensity.
void BM_NeighborGraph(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  const auto cloud = sample_poisson({2, true}, t, 1, 0);
  const double delta = std::sqrt(10.0 / (std::numbers::pi * t));
  for (auto _ : state) benchmark::DoNotOptimize(build_neighbor_graph(cloud, delta));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cloud.size()));
}
BENCHMARK(BM_NeighborGraph)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

void BM_CliqueExpansion(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  const auto cloud = sample_poisson({2, true}, t, 2, 0);
  const auto graph = build_neighbor_graph(cloud, std::sqrt(10.0 / (std::numbers::pi * t)));
  std::size_t total = 0;
  for (auto _ : state) {
    const auto complex = enumerate_simplices(graph, 3);
    total = complex.total();
    benchmark::DoNotOptimize(total);
  }
  state.counters["simplices"] = static_cast<double>(total);
}
BENCHMARK(BM_CliqueExpansion)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

}  // namespace
