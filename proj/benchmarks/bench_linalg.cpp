#include <benchmark/benchmark.h>

#include <random>

#include "vrcov/linalg.hpp"
#include "vrcov/rng.hpp"

using namespace vrcov;

namespace {

SymMatrix random_spd(std::size_t n) {
  auto rng = make_engine(1, {n});
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix b(n, n);
  for (double& x : b.data()) x = u(rng);
  SymMatrix s = SymMatrix::from_dense(b * b.transpose(), 1e-12);
  for (std::size_t i = 0; i < n; ++i) s.add(i, i, 0.1);
  return s;
}

void BM_Jacobi(benchmark::State& state) {
  const auto a = random_spd(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_eigen(a));
}
BENCHMARK(BM_Jacobi)->DenseRange(2, 16, 2);

void BM_Cholesky(benchmark::State& state) {
  const auto a = random_spd(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cholesky(a));
}
BENCHMARK(BM_Cholesky)->DenseRange(2, 16, 2);

}  // namespace
