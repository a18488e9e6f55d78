#include <benchmark/benchmark.h>

#include "vrcov/moments.hpp"

using namespace vrcov;

namespace {

void BM_SingleMoment(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const std::uint64_t samples = 100000;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_mu_single(d, k, 0.0, samples, 1, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples));
}
BENCHMARK(BM_SingleMoment)->ArgsProduct({{2, 3}, {1, 2, 3}})->Unit(benchmark::kMillisecond);

void BM_CrossMoment(benchmark::State& state) {
  const std::uint64_t samples = 100000;
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_mu_cross(3, 2, 3, 2, 1.0, 0.0, samples, 1, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples));
}
BENCHMARK(BM_CrossMoment)->Unit(benchmark::kMillisecond);

}  // namespace
