/// @file core.hpp
/// @brief Shared domain types: dataset, voxel-grid geometry, ground truth,
///        selection results, deterministic seeding and random streams.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace ecko {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexSet = std::vector<int>;

/// 3D voxel lattice with an activity mask. Feature index <-> integer
/// coordinate mapping is canonical: active voxels enumerated in
/// lexicographic (x, y, z) order. No module may reorder features.
class GridGeometry {
 public:
  /// @param shape lattice dimensions (nx, ny, nz), all positive
  /// @param mask  one byte per voxel (nonzero = active), length nx*ny*nz,
  ///              laid out in lexicographic (x, y, z) order
  GridGeometry(std::array<int, 3> shape, std::vector<std::uint8_t> mask);

  /// Geometry with every voxel active.
  static GridGeometry full(std::array<int, 3> shape);

  const std::array<int, 3>& shape() const { return shape_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

  /// Number of active voxels (= number of features p).
  int n_features() const { return static_cast<int>(coords_.size()); }

  /// Integer coordinates of feature j, canonical order.
  const std::vector<std::array<int, 3>>& feature_coords() const { return coords_; }

  /// Feature index of voxel (x,y,z), or -1 if out of mask.
  int feature_at(int x, int y, int z) const;

  /// Face-neighbor (6-connectivity) feature indices of feature j.
  std::vector<int> neighbors6(int j) const;

  /// Flat mask index of (x,y,z); lexicographic layout.
  std::size_t mask_index(int x, int y, int z) const {
    return (static_cast<std::size_t>(x) * shape_[1] + y) * shape_[2] + z;
  }

  bool operator==(const GridGeometry& other) const {
    return shape_ == other.shape_ && mask_ == other.mask_;
  }

 private:
  std::array<int, 3> shape_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::array<int, 3>> coords_;  // feature -> (x,y,z)
  std::vector<int> feature_of_voxel_;       // flat voxel -> feature or -1
};

/// Euclidean distance between integer voxel coordinates, unit isotropic
/// spacing.
double voxel_distance(const std::array<int, 3>& a, const std::array<int, 3>& b);

/// Distance d(j,k) between features j and k of `geometry`.
/// Symmetric, zero iff j == k, satisfies the triangle inequality.
/// @throws std::invalid_argument if an index is out of range
double voxel_distance(int j, int k, const GridGeometry& geometry);

/// Design matrix, response and optional grid geometry.
/// Immutable after construction; safe to share across threads.
class Dataset {
 public:
  /// @throws std::invalid_argument on row-count mismatch, non-finite
  ///         entries, or geometry/feature-count mismatch
  Dataset(Matrix X, Vector y, std::optional<GridGeometry> geometry = std::nullopt);

  const Matrix& X() const { return X_; }
  const Vector& y() const { return y_; }
  const std::optional<GridGeometry>& geometry() const { return geometry_; }

  int n_samples() const { return static_cast<int>(X_.rows()); }
  int n_features() const { return static_cast<int>(X_.cols()); }

 private:
  Matrix X_;
  Vector y_;
  std::optional<GridGeometry> geometry_;
};

/// True weight vector, noise level and support of a simulated problem.
struct GroundTruth {
  Vector w_star;
  double sigma = 1.0;
  IndexSet support;  // exactly the nonzero set of w_star, ascending

  static GroundTruth from_weights(Vector w_star, double sigma);
};

/// Output of a selection run: per-voxel aggregated q-values, the selected
/// set at level alpha, and a signed {-1,0,+1} map on the selected voxels.
struct SelectionResult {
  Vector q_tilde;              // length p, entries in [0,1]
  IndexSet selected;           // {k : q_tilde[k] <= alpha}, ascending
  Eigen::VectorXi signs;       // length p, zero outside `selected`
  double alpha = 0.1;
};

/// Collision-resistant mixing of a master seed with a label sequence.
/// Pure function; distinct label sequences (including different lengths)
/// map to distinct streams in practice. All randomness in the pipeline
/// flows from one master seed through this function.
std::uint64_t derive_seed(std::uint64_t master_seed, std::span<const std::uint64_t> labels);
std::uint64_t derive_seed(std::uint64_t master_seed, std::initializer_list<std::uint64_t> labels);

/// Deterministic random stream (mt19937_64 with explicit transforms, so
/// identical seeds give identical draws on every platform).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform();

  /// Uniform integer in [0, bound); bound > 0.
  int uniform_int(int bound);

  /// Standard normal via Box-Muller (spare value cached).
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Runs fn(i) for i in [0, n) on up to n_threads workers. Results must be
/// written to preallocated per-index slots; the schedule never affects
/// output. n_threads == 0 picks hardware concurrency. Exceptions from
/// workers are collected and the first is rethrown.
void parallel_for(int n, int n_threads, const std::function<void(int)>& fn);

}  // namespace ecko
