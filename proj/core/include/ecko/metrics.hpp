/// @file metrics.hpp
/// @brief Scoring of selections against ground truth (FDP, delta-FDP,
///        precision/recall, PR curves) and the SNR-sweep benchmark harness.

#pragma once

#include "ecko/core.hpp"
#include "ecko/pipeline.hpp"
#include "ecko/simdata.hpp"

#include <string>

namespace ecko {

/// False discovery proportion |selected \ support| / |selected|;
/// 0 when nothing is selected.
double fdp(const IndexSet& selected, const IndexSet& support);

/// Spatially relaxed FDP: a selection counts as false only when it lies at
/// distance > delta from every support feature. Equals fdp at delta = 0.
double delta_fdp(const IndexSet& selected, const IndexSet& support, double delta,
                 const GridGeometry& geometry);

/// (precision, recall); precision = 1 - FDP with the empty-selection
/// convention (1, 0).
/// @throws std::invalid_argument on empty support
std::pair<double, double> precision_recall(const IndexSet& selected, const IndexSet& support);

struct PrPoint {
  double threshold;
  double precision;
  double recall;
};

/// Precision-recall sweep over the sorted distinct values of q_tilde
/// (selection = {k : q_tilde_k <= t}); recall is non-decreasing along the
/// sweep. With delta > 0, precision is the delta-relaxed 1 - delta_fdp.
/// @throws std::invalid_argument on empty support
std::vector<PrPoint> pr_curve(const Vector& q_tilde, const IndexSet& support,
                              const GridGeometry& geometry, double delta = 0.0);

/// Area under a PR sweep: trapezoid in recall, anchored at (0, p_first).
double pr_auc(const std::vector<PrPoint>& curve);

struct BenchmarkRecord {
  std::string method;
  double snr = 0.0;
  int seed = 0;  // seed index within the sweep
  bool ok = false;
  std::string error;
  double fdp = 0.0;
  double delta_fdp = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double auc_pr = 0.0;
  double delta = 0.0;       // the run's reported max cluster diameter
  int n_selected = 0;
  double runtime_sec = 0.0;
  IndexSet selected;        // kept for cross-seed stability analyses
};

struct BenchmarkAggregate {
  std::string method;
  double snr = 0.0;
  int n_records = 0;  // successful cells only
  double mean_fdp = 0.0, se_fdp = 0.0;
  double mean_delta_fdp = 0.0, se_delta_fdp = 0.0;
  double mean_precision = 0.0, se_precision = 0.0;
  double mean_recall = 0.0, se_recall = 0.0;
  double mean_auc_pr = 0.0, se_auc_pr = 0.0;
  double mean_runtime_sec = 0.0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRecord> records;      // sorted by (method, snr, seed)
  std::vector<BenchmarkAggregate> aggregates;
};

/// Recomputes aggregates from records (used for report consistency checks).
std::vector<BenchmarkAggregate> aggregate_records(const std::vector<BenchmarkRecord>& records);

/// For each (method, snr, seed): generate a dataset at that SNR, run the
/// method, and score with delta = the run's max cluster diameter. The
/// dataset and the run's master seed depend only on (snr, seed), so methods
/// see identical data (paired comparisons). Failed cells are recorded with
/// ok = false, not fatal. Methods: "ecko", "cko".
/// @throws std::invalid_argument on an empty grid or unknown method name
BenchmarkReport snr_sweep(const std::vector<std::string>& methods,
                          const std::vector<double>& snr_grid, int n_seeds,
                          const SimulationSpec& base_spec, const EckoParams& params,
                          int n_threads = 0);

}  // namespace ecko
