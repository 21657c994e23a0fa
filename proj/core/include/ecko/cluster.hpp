/// @file cluster.hpp
/// @brief Row subsampling, spatially-constrained Ward clustering on the
///        voxel adjacency graph, feature reduction and cluster-to-voxel
///        broadcasting.

#pragma once

#include "ecko/core.hpp"

namespace ecko {

/// Feature -> cluster assignment for one clustering run. Every label in
/// [0, q) is used, every cluster is connected in the 6-neighbor mask graph,
/// and labels are ordered by each cluster's smallest feature index.
struct Clustering {
  std::vector<int> assignment;   // length p, values in [0, q)
  int n_clusters = 0;
  std::vector<double> diameters; // per cluster, max pairwise voxel distance

  /// Member feature indices per cluster, ascending.
  std::vector<std::vector<int>> members() const;
};

/// Uniform subset without replacement of size floor(fraction * n),
/// deterministic given seed; returned ascending.
/// @throws std::invalid_argument if fraction is outside (0,1] or the
///         resulting size is < 2
IndexSet subsample_rows(int n, double fraction, std::uint64_t seed);

/// Agglomerative Ward clustering restricted to pairs of clusters adjacent
/// in the 6-connectivity mask graph; merged clusters union their
/// adjacencies. Stops at q clusters. Deterministic: ties resolve to the
/// smallest Ward increase, then the smallest pair of cluster indices.
///
/// Columns of X_sub are the feature signals (typically the standardized
/// subsampled rows); the merge cost between clusters A, B is the Ward
/// increase |A||B|/(|A|+|B|) ||centroid_A - centroid_B||^2.
///
/// @throws std::invalid_argument if q > p, or q is smaller than the number
///         of connected components of the mask graph
Clustering ward_cluster(const Matrix& X_sub, const GridGeometry& geometry, int q);

/// n x q matrix whose column j is the mean of the X columns in cluster j.
/// @throws std::invalid_argument on dimension mismatch
Matrix reduce_features(const Matrix& X, const Clustering& clustering);

/// Assigns each voxel its cluster's q-value.
/// @throws std::invalid_argument if lengths disagree
Vector broadcast_qvalues(const Vector& cluster_q, const Clustering& clustering);

/// Supremum of cluster diameters across clusterings; this is the delta
/// reported alongside any selection.
/// @throws std::invalid_argument on an empty list
double max_diameter(const std::vector<Clustering>& clusterings);

}  // namespace ecko
