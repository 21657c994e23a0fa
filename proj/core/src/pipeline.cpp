#include "ecko/pipeline.hpp"

#include "ecko/lasso.hpp"
#include "ecko/multtest.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ecko {

namespace {

void validate_params(const EckoParams& params) {
  if (params.n_clusters < 1) throw std::invalid_argument("run_ecko: n_clusters must be >= 1");
  if (params.n_draws < 1) throw std::invalid_argument("run_ecko: n_draws must be >= 1");
  if (params.n_clusterings < 1) throw std::invalid_argument("run_ecko: n_clusterings must be >= 1");
  if (params.fdr <= 0.0 || params.fdr >= 1.0) {
    throw std::invalid_argument("run_ecko: fdr must be in (0,1)");
  }
  if (params.gamma <= 0.0 || params.gamma >= 1.0) {
    throw std::invalid_argument("run_ecko: gamma must be in (0,1)");
  }
  if (params.subsample_fraction <= 0.0 || params.subsample_fraction > 1.0) {
    throw std::invalid_argument("run_ecko: subsample_fraction must be in (0,1]");
  }
}

/// Centers and scales columns to zero mean, unit (population) variance.
/// @throws std::invalid_argument on a zero-variance column
Matrix standardize_columns(const Matrix& X) {
  const double n = static_cast<double>(X.rows());
  Matrix out = X.rowwise() - X.colwise().mean();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double sd = std::sqrt(out.col(j).squaredNorm() / n);
    if (sd == 0.0) {
      throw std::invalid_argument("standardize: zero-variance column " + std::to_string(j));
    }
    out.col(j) /= sd;
  }
  return out;
}

// One clustering run: cluster on a standardized subsample, reduce the full
// design, pick lambda on draw 0's concatenated design, then run all draws.
ClusteringCell run_cell(const Dataset& dataset, const EckoParams& params, int c,
                        const Vector& y_centered) {
  const int n = dataset.n_samples();
  const int B = params.n_draws;
  const int q = params.n_clusters;

  const std::uint64_t clustering_seed =
      derive_seed(params.master_seed, {static_cast<std::uint64_t>(c)});
  const IndexSet rows = subsample_rows(n, params.subsample_fraction, clustering_seed);

  Matrix X_sub(static_cast<Eigen::Index>(rows.size()), dataset.n_features());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    X_sub.row(static_cast<Eigen::Index>(i)) = dataset.X().row(rows[i]);
  }

  ClusteringCell cell;
  cell.clustering = ward_cluster(standardize_columns(X_sub), *dataset.geometry(), q);

  // Reduction and inference use all n rows; the subsample only diversifies
  // the clustering.
  const Matrix X_reduced = standardize_columns(reduce_features(dataset.X(), cell.clustering));
  const KnockoffModel model = fit_knockoff_model(X_reduced);

  auto draw_seed = [&](int b) {
    return derive_seed(params.master_seed,
                       {static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(b)});
  };

  const Matrix Xk0 = sample_knockoffs(model, X_reduced, draw_seed(0));
  {
    Matrix D0(n, 2 * q);
    D0 << X_reduced, Xk0;
    // Label (c, B) is reserved for the fold stream; draw labels stay in [0, B).
    const std::uint64_t cv_seed = derive_seed(
        params.master_seed, {static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(B)});
    // CV returns lambda on the per-sample scale; the solver objective is
    // unscaled, hence the factor n.
    cell.lambda = static_cast<double>(n) * lasso_cv_lambda(D0, y_centered, 5, 20, cv_seed);
  }

  cell.stats.resize(B, q);
  cell.pvalues.resize(B, q);
  cell.coef_signs.resize(B, q);
  for (int b = 0; b < B; ++b) {
    const Matrix Xk = (b == 0) ? Xk0 : sample_knockoffs(model, X_reduced, draw_seed(b));
    Vector coef;
    const StatVector z = lcd_statistic(X_reduced, Xk, y_centered, cell.lambda, &coef);
    cell.stats.row(b) = z.z;
    cell.pvalues.row(b) = knockoff_pvalues(z);
    for (int j = 0; j < q; ++j) {
      cell.coef_signs(b, j) = (coef[j] > 0.0) - (coef[j] < 0.0);
    }
  }

  cell.p_aggregated = quantile_aggregate(PValueMatrix{cell.pvalues}, params.gamma);
  cell.qvalues = bhq_qvalues(cell.p_aggregated);
  cell.q_broadcast = broadcast_qvalues(cell.qvalues, cell.clustering);
  return cell;
}

}  // namespace

std::pair<SelectionResult, EckoTrace> run_ecko(const Dataset& dataset, const EckoParams& params,
                                               int n_threads) {
  validate_params(params);
  if (!dataset.geometry()) {
    throw std::invalid_argument("run_ecko: dataset has no grid geometry");
  }
  if (params.n_clusters > dataset.n_features()) {
    throw std::invalid_argument("run_ecko: more clusters than features");
  }

  const Vector y_centered = dataset.y().array() - dataset.y().mean();

  EckoTrace trace;
  trace.cells.resize(static_cast<std::size_t>(params.n_clusterings));
  parallel_for(params.n_clusterings, n_threads, [&](int c) {
    try {
      trace.cells[static_cast<std::size_t>(c)] = run_cell(dataset, params, c, y_centered);
    } catch (const std::exception& e) {
      throw std::runtime_error("run_ecko: clustering run c=" + std::to_string(c) +
                               " failed: " + e.what());
    }
  });

  // Final q-values: plain arithmetic mean over clusterings, fixed order.
  trace.q_tilde = Vector::Zero(dataset.n_features());
  for (const auto& cell : trace.cells) trace.q_tilde += cell.q_broadcast;
  trace.q_tilde /= static_cast<double>(params.n_clusterings);

  std::vector<Clustering> clusterings;
  clusterings.reserve(trace.cells.size());
  for (const auto& cell : trace.cells) clusterings.push_back(cell.clustering);
  trace.delta = max_diameter(clusterings);

  return {select_from_trace(trace, params.fdr), std::move(trace)};
}

std::pair<SelectionResult, EckoTrace> run_cko(const Dataset& dataset, const EckoParams& params,
                                              int n_threads) {
  EckoParams forced = params;
  forced.n_clusterings = 1;
  forced.n_draws = 1;
  return run_ecko(dataset, forced, n_threads);
}

Eigen::VectorXi sign_vote(const EckoTrace& trace, const IndexSet& selected) {
  const Eigen::Index p = trace.q_tilde.size();
  Eigen::VectorXi signs = Eigen::VectorXi::Zero(p);
  for (int k : selected) {
    long votes = 0;
    for (const auto& cell : trace.cells) {
      const int j = cell.clustering.assignment[static_cast<std::size_t>(k)];
      for (Eigen::Index b = 0; b < cell.coef_signs.rows(); ++b) {
        votes += cell.coef_signs(b, j);
      }
    }
    signs[k] = (votes > 0) - (votes < 0);
  }
  return signs;
}

SelectionResult select_from_trace(const EckoTrace& trace, double alpha) {
  if (alpha <= 0.0 || alpha >= 1.0) {
    throw std::invalid_argument("select_from_trace: alpha must be in (0,1)");
  }
  SelectionResult result;
  result.alpha = alpha;
  result.q_tilde = trace.q_tilde;
  result.selected = threshold_select(trace.q_tilde, alpha);
  result.signs = sign_vote(trace, result.selected);
  return result;
}

}  // namespace ecko
