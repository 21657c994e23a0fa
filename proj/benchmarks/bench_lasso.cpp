#include <benchmark/benchmark.h>

#include "ecko/core.hpp"
#include "ecko/lasso.hpp"

namespace {

ecko::Matrix random_design(int n, int m, std::uint64_t seed) {
  ecko::RandomStream rng(seed);
  ecko::Matrix D(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) D(i, j) = rng.normal();
  }
  return D;
}

void BM_lasso_fit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const ecko::Matrix D = random_design(n, m, 7);
  ecko::RandomStream rng(11);
  ecko::Vector y(n);
  for (int i = 0; i < n; ++i) y[i] = rng.normal();
  y += 2.0 * D.col(0) - 1.5 * D.col(m / 2);
  const double lambda_zero = (D.transpose() * y).cwiseAbs().maxCoeff();

  for (auto _ : state) {
    benchmark::DoNotOptimize(ecko::lasso_fit_pathwise(D, y, 0.05 * lambda_zero));
  }
}
BENCHMARK(BM_lasso_fit)->Args({100, 200})->Args({200, 1000})->Unit(benchmark::kMillisecond);

void BM_lasso_cv(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const ecko::Matrix D = random_design(n, m, 7);
  ecko::RandomStream rng(11);
  ecko::Vector y(n);
  for (int i = 0; i < n; ++i) y[i] = rng.normal();
  y += 2.0 * D.col(0);

  for (auto _ : state) {
    benchmark::DoNotOptimize(ecko::lasso_cv_lambda(D, y, 5, 20, 3));
  }
}
BENCHMARK(BM_lasso_cv)->Args({100, 200})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
