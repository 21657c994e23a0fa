// Command-line front end: simulate synthetic datasets, run ensemble or
// single-clustering knockoff inference, and run SNR-sweep benchmarks.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <CLI11.hpp>

#include "ecko/io.hpp"
#include "ecko/metrics.hpp"
#include "ecko/pipeline.hpp"
#include "ecko/simdata.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

std::array<int, 3> parse_shape(const std::string& text) {
  std::array<int, 3> shape{};
  std::stringstream ss(text);
  std::string part;
  int i = 0;
  while (std::getline(ss, part, ',')) {
    if (i >= 3) throw CLI::ValidationError("--shape", "expected three comma-separated integers");
    shape[static_cast<std::size_t>(i++)] = std::stoi(part);
  }
  if (i != 3) throw CLI::ValidationError("--shape", "expected three comma-separated integers");
  return shape;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) grid.push_back(std::stod(part));
  return grid;
}

std::vector<std::string> parse_methods(const std::string& text) {
  std::vector<std::string> methods;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) methods.push_back(part);
  return methods;
}

// Flag validators with readable messages.
const CLI::Validator OpenUnit(
    [](std::string& s) -> std::string {
      try {
        const double v = std::stod(s);
        if (v > 0.0 && v < 1.0) return {};
      } catch (...) {
      }
      return std::string("value must be in the open interval (0,1), got ") + s;
    },
    "FLOAT in (0,1)");

const CLI::Validator HalfOpenUnit(
    [](std::string& s) -> std::string {
      try {
        const double v = std::stod(s);
        if (v > 0.0 && v <= 1.0) return {};
      } catch (...) {
      }
      return std::string("value must be in (0,1], got ") + s;
    },
    "FLOAT in (0,1]");

// --threads wins over ECKO_THREADS; 0 means all cores.
int resolve_threads(int flag_value, bool flag_given) {
  if (flag_given) return flag_value;
  if (const char* env = std::getenv("ECKO_THREADS")) {
    try {
      return std::stoi(env);
    } catch (...) {
      std::cerr << "warning: ignoring unparsable ECKO_THREADS='" << env << "'\n";
    }
  }
  return 0;
}

struct SimulateOptions {
  std::string shape_text = "50,50,50";
  int n_samples = 100;
  int n_rois = 5;
  int roi_size = 6;
  double snr = 3.6;
  double smoothing = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_simulate(const SimulateOptions& opt) {
  ecko::SimulationSpec spec;
  spec.shape = parse_shape(opt.shape_text);
  spec.n_samples = opt.n_samples;
  spec.n_rois = opt.n_rois;
  spec.roi_size = opt.roi_size;
  spec.target_snr = opt.snr;
  spec.smoothing_width = opt.smoothing;
  spec.seed = opt.seed;

  const auto [dataset, truth] = ecko::generate_synthetic(spec);
  ecko::write_dataset(opt.out, dataset, truth);
  std::cout << "wrote dataset: n=" << dataset.n_samples() << " p=" << dataset.n_features()
            << " support=" << truth.support.size() << " sigma=" << truth.sigma << " -> "
            << opt.out << "\n";
  return kExitOk;
}

struct InferOptions {
  std::string data;
  std::string method = "ecko";
  ecko::EckoParams params;
  std::uint64_t seed = 0;
  int threads = 0;
  bool threads_given = false;
  std::string out;
};

int run_infer(const InferOptions& opt) {
  const auto [dataset, truth] = ecko::read_dataset(opt.data);
  (void)truth;

  ecko::EckoParams params = opt.params;
  params.master_seed = opt.seed;
  if (opt.method == "cko") {
    // Effective parameters, so the summary reflects what actually ran.
    params.n_clusterings = 1;
    params.n_draws = 1;
  }
  const int threads = resolve_threads(opt.threads, opt.threads_given);

  const auto start = std::chrono::steady_clock::now();
  const auto [selection, trace] = opt.method == "cko" ? ecko::run_cko(dataset, params, threads)
                                                      : ecko::run_ecko(dataset, params, threads);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  fs::create_directories(opt.out);
  ecko::write_selection_table(fs::path(opt.out) / "selection.tsv", selection,
                              *dataset.geometry());
  // Wall time goes to stdout only; output files stay byte-identical across
  // reruns with the same flags.
  ecko::write_run_summary(fs::path(opt.out) / "summary.json", params, opt.method, trace.delta,
                          static_cast<int>(selection.selected.size()));
  std::cout << "method=" << opt.method << " selected=" << selection.selected.size()
            << " delta=" << trace.delta << " wall_time_sec=" << elapsed << " -> " << opt.out
            << "\n";
  return kExitOk;
}

struct BenchmarkOptions {
  std::string snr_grid_text = "0.5,2,8,32";
  std::string methods_text = "ecko,cko";
  int n_seeds = 20;
  std::string shape_text = "16,16,16";
  int n_samples = 100;
  int n_rois = 2;
  int roi_size = 4;
  double smoothing = 1.0;
  ecko::EckoParams params;
  std::uint64_t seed = 0;
  int threads = 0;
  bool threads_given = false;
  std::string out;
};

int run_benchmark(const BenchmarkOptions& opt) {
  const std::vector<double> grid = parse_grid(opt.snr_grid_text);
  const std::vector<std::string> methods = parse_methods(opt.methods_text);
  if (grid.empty() || methods.empty()) {
    throw CLI::ValidationError("--snr-grid/--methods", "benchmark grid is empty");
  }

  ecko::SimulationSpec spec;
  spec.shape = parse_shape(opt.shape_text);
  spec.n_samples = opt.n_samples;
  spec.n_rois = opt.n_rois;
  spec.roi_size = opt.roi_size;
  spec.smoothing_width = opt.smoothing;
  spec.seed = opt.seed;

  ecko::EckoParams params = opt.params;
  params.master_seed = opt.seed;

  const auto report = ecko::snr_sweep(methods, grid, opt.n_seeds, spec, params,
                                      resolve_threads(opt.threads, opt.threads_given));

  fs::create_directories(opt.out);
  ecko::write_benchmark_report(fs::path(opt.out) / "report.csv",
                               fs::path(opt.out) / "aggregates.csv", report);
  int failed = 0;
  for (const auto& r : report.records) {
    if (!r.ok) ++failed;
  }
  std::cout << "benchmark: " << report.records.size() << " records (" << failed
            << " failed) -> " << opt.out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble-of-clustered-knockoffs inference for structured data"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic structured dataset");
  simulate->add_option("--shape", sim.shape_text, "Grid shape nx,ny,nz")->capture_default_str();
  simulate->add_option("--n-samples", sim.n_samples, "Number of samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--n-rois", sim.n_rois, "Number of cubic ROIs")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  simulate->add_option("--roi-size", sim.roi_size, "ROI cube edge length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--snr", sim.snr, "Target signal-to-noise ratio")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--smoothing", sim.smoothing, "Design smoothing width (voxels)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output directory")->required();

  InferOptions inf;
  auto* infer = app.add_subcommand("infer", "Run knockoff inference on a dataset");
  infer->add_option("--data", inf.data, "Dataset manifest (or its directory)")->required();
  infer->add_option("--fdr", inf.params.fdr, "Nominal FDR level, in (0,1)")
      ->check(OpenUnit)
      ->capture_default_str();
  infer->add_option("--n-clusters", inf.params.n_clusters, "Clusters per clustering (q)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  infer->add_option("--n-draws", inf.params.n_draws, "Knockoff draws per clustering (B)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  infer->add_option("--n-clusterings", inf.params.n_clusterings, "Clustering runs (C)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  infer->add_option("--gamma", inf.params.gamma, "Aggregation quantile, in (0,1)")
      ->check(OpenUnit)
      ->capture_default_str();
  infer->add_option("--subsample-fraction", inf.params.subsample_fraction,
                    "Row fraction per clustering subsample")
      ->check(HalfOpenUnit)
      ->capture_default_str();
  infer->add_option("--method", inf.method, "Inference method")
      ->check(CLI::IsMember({"ecko", "cko"}))
      ->capture_default_str();
  infer->add_option("--seed", inf.seed, "Master seed")->capture_default_str();
  auto* infer_threads =
      infer->add_option("--threads", inf.threads, "Worker threads (0 = all cores; ECKO_THREADS "
                                                  "honored when the flag is absent)");
  infer->add_option("--out", inf.out, "Output directory")->required();

  BenchmarkOptions bench;
  auto* benchmark =
      app.add_subcommand("benchmark", "SNR-sweep benchmark on synthetic datasets. Writes "
                                      "report.csv (columns: method,snr,seed,ok,fdp,delta_fdp,"
                                      "precision,recall,auc_pr,delta,n_selected,runtime_sec,"
                                      "error; runtime_sec varies between runs) and "
                                      "aggregates.csv (per-(method,snr) means and standard "
                                      "errors of the same rates)");
  benchmark->add_option("--snr-grid", bench.snr_grid_text, "Comma-separated SNR values")
      ->capture_default_str();
  benchmark->add_option("--methods", bench.methods_text, "Comma-separated methods (ecko,cko)")
      ->capture_default_str();
  benchmark->add_option("--n-seeds", bench.n_seeds, "Repetitions per grid point")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  benchmark->add_option("--shape", bench.shape_text, "Grid shape nx,ny,nz")->capture_default_str();
  benchmark->add_option("--n-samples", bench.n_samples, "Samples per dataset")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  benchmark->add_option("--n-rois", bench.n_rois, "ROIs per dataset")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  benchmark->add_option("--roi-size", bench.roi_size, "ROI cube edge length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  benchmark->add_option("--smoothing", bench.smoothing, "Design smoothing width (voxels)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  benchmark->add_option("--fdr", bench.params.fdr, "Nominal FDR level, in (0,1)")
      ->check(OpenUnit)
      ->capture_default_str();
  benchmark->add_option("--n-clusters", bench.params.n_clusters, "Clusters per clustering (q)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  benchmark->add_option("--n-draws", bench.params.n_draws, "Knockoff draws per clustering (B)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  benchmark->add_option("--n-clusterings", bench.params.n_clusterings, "Clustering runs (C)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  benchmark->add_option("--gamma", bench.params.gamma, "Aggregation quantile, in (0,1)")
      ->check(OpenUnit)
      ->capture_default_str();
  benchmark->add_option("--seed", bench.seed, "Master seed")->capture_default_str();
  auto* bench_threads =
      benchmark->add_option("--threads", bench.threads, "Worker threads (0 = all cores; "
                                                        "ECKO_THREADS honored when absent)");
  benchmark->add_option("--out", bench.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  inf.threads_given = infer_threads->count() > 0;
  bench.threads_given = bench_threads->count() > 0;

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (infer->parsed()) return run_infer(inf);
    if (benchmark->parsed()) return run_benchmark(bench);
    return kExitUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ecko::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
