/// @file pipeline.hpp
/// @brief End-to-end ensemble-of-clustered-knockoffs inference: C random
///        clusterings x B knockoff draws, per-cluster aggregation, BHq,
///        voxel broadcast, cross-clustering averaging, thresholding and
///        sign vote. Also exposes the single-clustering (CKO) baseline.

#pragma once

#include "ecko/cluster.hpp"
#include "ecko/core.hpp"
#include "ecko/knockoff.hpp"

namespace ecko {

struct EckoParams {
  int n_clusters = 500;           // q
  int n_draws = 25;               // B knockoff draws per clustering
  int n_clusterings = 25;         // C
  double fdr = 0.1;               // nominal FDR level alpha
  double gamma = 0.5;             // aggregation quantile
  double subsample_fraction = 0.7;
  std::uint64_t master_seed = 0;
};

/// Everything computed for one clustering run c.
struct ClusteringCell {
  Clustering clustering;
  double lambda = 0.0;        // CV-selected penalty, shared by all B draws
  Matrix stats;               // B x q LCD statistics z
  Matrix pvalues;             // B x q intermediate knockoff p-values
  Eigen::MatrixXi coef_signs; // B x q sign of each original-column coefficient
  Vector p_aggregated;        // q, quantile-aggregated across draws
  Vector qvalues;             // q, BHq
  Vector q_broadcast;         // p, cluster q-values broadcast to voxels
};

/// Full record of a run: every intermediate plus the reported delta
/// (supremum of cluster diameters, the spatial tolerance of the result).
struct EckoTrace {
  std::vector<ClusteringCell> cells;  // size C
  Vector q_tilde;                     // p, mean of the C broadcast vectors
  double delta = 0.0;
};

/// Runs the full ensemble: for each clustering c, subsample rows, cluster,
/// reduce, then for each draw b sample knockoffs, compute LCD statistics
/// and p-values; aggregate across draws, BHq, broadcast to voxels; average
/// across clusterings, threshold at fdr, and sign-vote the selected voxels.
///
/// Bit-identical output for identical (dataset, params), independent of
/// n_threads (0 = hardware concurrency).
///
/// @throws std::invalid_argument on a dataset without geometry, q > p, or
///         invalid parameters; failures inside a clustering run abort with
///         a diagnostic naming the clustering index
std::pair<SelectionResult, EckoTrace> run_ecko(const Dataset& dataset, const EckoParams& params,
                                               int n_threads = 0);

/// Single-clustering knockoff baseline: run_ecko with C = 1, B = 1 forced,
/// same master seed. Output is bit-identical to that call.
std::pair<SelectionResult, EckoTrace> run_cko(const Dataset& dataset, const EckoParams& params,
                                              int n_threads = 0);

/// Majority vote over all (draw, clustering) pairs of the sign of the
/// enclosing cluster's original-column lasso coefficient. Non-selected
/// voxels and exact ties get 0.
Eigen::VectorXi sign_vote(const EckoTrace& trace, const IndexSet& selected);

/// Selection at a different level from an existing trace (monotone in
/// alpha). Recomputes the threshold and sign vote only.
SelectionResult select_from_trace(const EckoTrace& trace, double alpha);

}  // namespace ecko
