/// @file simdata.hpp
/// @brief Synthetic structured-data generator: 3D weight cube with compact
///        ROIs, spatially smoothed Gaussian design, linear response at an
///        exact target SNR.

#pragma once

#include "ecko/core.hpp"

namespace ecko {

struct SimulationSpec {
  std::array<int, 3> shape{50, 50, 50};
  int n_samples = 100;
  int n_rois = 5;
  int roi_size = 6;  // cubic edge length
  /// Signed amplitude per ROI; empty means alternating +1, -1, +1, ...
  std::vector<double> roi_amplitudes;
  double target_snr = 3.6;
  double smoothing_width = 1.0;  // Gaussian sigma (voxels) for design correlation
  std::uint64_t seed = 0;
};

/// Generates (Dataset, GroundTruth) from `spec`:
///  - w* has n_rois disjoint cubic supports of edge roi_size at seeded
///    positions with >= 2-voxel separation and alternating signs;
///  - X rows are i.i.d. Gaussian volumes, spatially correlated by isotropic
///    Gaussian smoothing of white noise (width = smoothing_width);
///  - y = X w* + sigma * eps with eps ~ N(0, I) and sigma solved in closed
///    form so the realized SNR ||X w*||^2 / (sigma^2 ||eps||^2) equals
///    target_snr exactly. When w* = 0 (n_rois = 0), sigma = 1 and y is pure
///    noise.
///
/// Bit-identical output for identical specs.
/// @throws std::invalid_argument on out-of-bounds ROIs or an impossible
///         placement
std::pair<Dataset, GroundTruth> generate_synthetic(const SimulationSpec& spec);

/// Signal-to-noise ratio ||X w*||^2 / (sigma^2 ||eps||^2).
/// @throws std::invalid_argument if sigma <= 0 or eps is the zero vector
double compute_snr(const Matrix& X, const Vector& w_star, double sigma, const Vector& epsilon);

}  // namespace ecko
