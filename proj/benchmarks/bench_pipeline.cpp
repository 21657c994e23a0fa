#include <benchmark/benchmark.h>

#include "ecko/pipeline.hpp"
#include "ecko/simdata.hpp"

namespace {

void BM_run_ecko(benchmark::State& state) {
  ecko::SimulationSpec spec;
  spec.shape = {12, 12, 12};
  spec.n_samples = 80;
  spec.n_rois = 2;
  spec.roi_size = 3;
  spec.target_snr = 8.0;
  spec.seed = 17;
  const auto [dataset, truth] = ecko::generate_synthetic(spec);

  ecko::EckoParams params;
  params.n_clusters = 50;
  params.n_draws = static_cast<int>(state.range(0));
  params.n_clusterings = static_cast<int>(state.range(1));
  params.master_seed = 23;

  for (auto _ : state) {
    benchmark::DoNotOptimize(ecko::run_ecko(dataset, params));
  }
}
BENCHMARK(BM_run_ecko)->Args({2, 2})->Args({5, 5})->Unit(benchmark::kMillisecond);

}  // namespace
