#include "ecko/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace ecko {

double fdp(const IndexSet& selected, const IndexSet& support) {
  if (selected.empty()) return 0.0;
  const std::unordered_set<int> truth(support.begin(), support.end());
  int false_count = 0;
  for (int k : selected) {
    if (!truth.count(k)) ++false_count;
  }
  return static_cast<double>(false_count) / static_cast<double>(selected.size());
}

double delta_fdp(const IndexSet& selected, const IndexSet& support, double delta,
                 const GridGeometry& geometry) {
  if (delta < 0.0) throw std::invalid_argument("delta_fdp: delta must be nonnegative");
  if (selected.empty()) return 0.0;
  const auto& coords = geometry.feature_coords();
  int false_count = 0;
  for (int k : selected) {
    bool near_support = false;
    for (int j : support) {
      if (voxel_distance(coords[static_cast<std::size_t>(j)],
                         coords[static_cast<std::size_t>(k)]) <= delta) {
        near_support = true;
        break;
      }
    }
    if (!near_support) ++false_count;
  }
  return static_cast<double>(false_count) / static_cast<double>(selected.size());
}

std::pair<double, double> precision_recall(const IndexSet& selected, const IndexSet& support) {
  if (support.empty()) throw std::invalid_argument("precision_recall: empty support");
  if (selected.empty()) return {1.0, 0.0};
  const std::unordered_set<int> truth(support.begin(), support.end());
  int hits = 0;
  for (int k : selected) {
    if (truth.count(k)) ++hits;
  }
  return {static_cast<double>(hits) / static_cast<double>(selected.size()),
          static_cast<double>(hits) / static_cast<double>(support.size())};
}

std::vector<PrPoint> pr_curve(const Vector& q_tilde, const IndexSet& support,
                              const GridGeometry& geometry, double delta) {
  if (support.empty()) throw std::invalid_argument("pr_curve: empty support");

  std::vector<double> thresholds(q_tilde.data(), q_tilde.data() + q_tilde.size());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  // One pass per threshold; selections grow as the threshold rises.
  std::vector<int> order(static_cast<std::size_t>(q_tilde.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return q_tilde[a] != q_tilde[b] ? q_tilde[a] < q_tilde[b] : a < b; });

  std::vector<PrPoint> curve;
  curve.reserve(thresholds.size());
  IndexSet selected;
  std::size_t pos = 0;
  for (double t : thresholds) {
    while (pos < order.size() && q_tilde[order[pos]] <= t) {
      selected.push_back(order[pos]);
      ++pos;
    }
    const auto [prec_plain, rec] = precision_recall(selected, support);
    const double prec =
        delta > 0.0 ? 1.0 - delta_fdp(selected, support, delta, geometry) : prec_plain;
    curve.push_back({t, prec, rec});
  }
  return curve;
}

double pr_auc(const std::vector<PrPoint>& curve) {
  if (curve.empty()) return 0.0;
  double auc = curve.front().recall * curve.front().precision;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    auc += (curve[i].recall - curve[i - 1].recall) *
           0.5 * (curve[i].precision + curve[i - 1].precision);
  }
  return auc;
}

namespace {

struct Welford {
  int n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double se() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / (n - 1) / n);
  }
};

}  // namespace

std::vector<BenchmarkAggregate> aggregate_records(const std::vector<BenchmarkRecord>& records) {
  std::map<std::pair<std::string, double>, std::vector<const BenchmarkRecord*>> groups;
  for (const auto& record : records) {
    if (record.ok) groups[{record.method, record.snr}].push_back(&record);
  }
  std::vector<BenchmarkAggregate> aggregates;
  for (const auto& [key, group] : groups) {
    BenchmarkAggregate agg;
    agg.method = key.first;
    agg.snr = key.second;
    agg.n_records = static_cast<int>(group.size());
    Welford w_fdp, w_dfdp, w_prec, w_rec, w_auc, w_rt;
    for (const BenchmarkRecord* r : group) {
      w_fdp.add(r->fdp);
      w_dfdp.add(r->delta_fdp);
      w_prec.add(r->precision);
      w_rec.add(r->recall);
      w_auc.add(r->auc_pr);
      w_rt.add(r->runtime_sec);
    }
    agg.mean_fdp = w_fdp.mean;
    agg.se_fdp = w_fdp.se();
    agg.mean_delta_fdp = w_dfdp.mean;
    agg.se_delta_fdp = w_dfdp.se();
    agg.mean_precision = w_prec.mean;
    agg.se_precision = w_prec.se();
    agg.mean_recall = w_rec.mean;
    agg.se_recall = w_rec.se();
    agg.mean_auc_pr = w_auc.mean;
    agg.se_auc_pr = w_auc.se();
    agg.mean_runtime_sec = w_rt.mean;
    aggregates.push_back(std::move(agg));
  }
  return aggregates;
}

BenchmarkReport snr_sweep(const std::vector<std::string>& methods,
                          const std::vector<double>& snr_grid, int n_seeds,
                          const SimulationSpec& base_spec, const EckoParams& params,
                          int n_threads) {
  if (methods.empty() || snr_grid.empty() || n_seeds < 1) {
    throw std::invalid_argument("snr_sweep: empty benchmark grid");
  }
  for (const auto& method : methods) {
    if (method != "ecko" && method != "cko") {
      throw std::invalid_argument("snr_sweep: unknown method '" + method + "'");
    }
  }

  struct Cell {
    int method_idx, snr_idx, seed_idx;
  };
  std::vector<Cell> cells;
  for (int m = 0; m < static_cast<int>(methods.size()); ++m) {
    for (int s = 0; s < static_cast<int>(snr_grid.size()); ++s) {
      for (int r = 0; r < n_seeds; ++r) cells.push_back({m, s, r});
    }
  }

  BenchmarkReport report;
  report.records.resize(cells.size());
  parallel_for(static_cast<int>(cells.size()), n_threads, [&](int i) {
    const Cell& cell = cells[static_cast<std::size_t>(i)];
    BenchmarkRecord& record = report.records[static_cast<std::size_t>(i)];
    record.method = methods[static_cast<std::size_t>(cell.method_idx)];
    record.snr = snr_grid[static_cast<std::size_t>(cell.snr_idx)];
    record.seed = cell.seed_idx;
    try {
      // Dataset and run seed depend only on (snr, seed): methods are paired.
      SimulationSpec spec = base_spec;
      spec.target_snr = record.snr;
      spec.seed = derive_seed(base_spec.seed, {static_cast<std::uint64_t>(cell.snr_idx),
                                               static_cast<std::uint64_t>(cell.seed_idx)});
      const auto [dataset, truth] = generate_synthetic(spec);

      EckoParams run_params = params;
      run_params.master_seed =
          derive_seed(params.master_seed, {static_cast<std::uint64_t>(cell.snr_idx),
                                           static_cast<std::uint64_t>(cell.seed_idx)});

      const auto start = std::chrono::steady_clock::now();
      const auto [selection, trace] = record.method == "cko"
                                          ? run_cko(dataset, run_params, 1)
                                          : run_ecko(dataset, run_params, 1);
      record.runtime_sec =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

      const GridGeometry& geometry = *dataset.geometry();
      record.delta = trace.delta;
      record.fdp = fdp(selection.selected, truth.support);
      record.delta_fdp = delta_fdp(selection.selected, truth.support, trace.delta, geometry);
      if (!truth.support.empty()) {
        const auto [prec, rec] = precision_recall(selection.selected, truth.support);
        record.precision = prec;
        record.recall = rec;
        record.auc_pr = pr_auc(pr_curve(selection.q_tilde, truth.support, geometry));
      } else {
        record.precision = 1.0;
        record.recall = 0.0;
        record.auc_pr = 0.0;
      }
      record.n_selected = static_cast<int>(selection.selected.size());
      record.selected = selection.selected;
      record.ok = true;
    } catch (const std::exception& e) {
      record.ok = false;
      record.error = e.what();
    }
  });

  std::sort(report.records.begin(), report.records.end(),
            [](const BenchmarkRecord& a, const BenchmarkRecord& b) {
              if (a.method != b.method) return a.method < b.method;
              if (a.snr != b.snr) return a.snr < b.snr;
              return a.seed < b.seed;
            });
  report.aggregates = aggregate_records(report.records);
  return report;
}

}  // namespace ecko
