#include <benchmark/benchmark.h>

#include "ecko/cluster.hpp"
#include "ecko/core.hpp"

namespace {

void BM_ward_cluster(benchmark::State& state) {
  const int edge = static_cast<int>(state.range(0));
  const int q = static_cast<int>(state.range(1));
  const auto geometry = ecko::GridGeometry::full({edge, edge, edge});
  const int p = geometry.n_features();
  const int n = 70;

  ecko::RandomStream rng(5);
  ecko::Matrix X(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
  }

  for (auto _ : state) {
    benchmark::DoNotOptimize(ecko::ward_cluster(X, geometry, q));
  }
}
BENCHMARK(BM_ward_cluster)->Args({12, 50})->Args({16, 100})->Unit(benchmark::kMillisecond);

}  // namespace
