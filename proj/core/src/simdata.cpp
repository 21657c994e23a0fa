#include "ecko/simdata.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ecko {

namespace {

struct Box {
  std::array<int, 3> corner;
  int size;
};

// True when some axis has a gap of at least `margin` between the boxes.
bool separated(const Box& a, const Box& b, int margin) {
  for (int d = 0; d < 3; ++d) {
    const int gap_ab = b.corner[d] - (a.corner[d] + a.size);
    const int gap_ba = a.corner[d] - (b.corner[d] + b.size);
    if (gap_ab >= margin || gap_ba >= margin) return true;
  }
  return false;
}

std::vector<Box> place_rois(const SimulationSpec& spec, RandomStream& rng) {
  std::vector<Box> boxes;
  if (spec.n_rois == 0) return boxes;
  for (int d = 0; d < 3; ++d) {
    if (spec.roi_size > spec.shape[d]) {
      throw std::invalid_argument("generate_synthetic: ROI does not fit inside shape");
    }
  }
  const int max_attempts = 1000 * spec.n_rois;
  int attempts = 0;
  int consecutive_failures = 0;
  while (static_cast<int>(boxes.size()) < spec.n_rois) {
    if (++attempts > max_attempts) {
      throw std::invalid_argument("generate_synthetic: could not place non-overlapping ROIs");
    }
    Box candidate;
    candidate.size = spec.roi_size;
    for (int d = 0; d < 3; ++d) {
      candidate.corner[d] = rng.uniform_int(spec.shape[d] - spec.roi_size + 1);
    }
    bool ok = true;
    for (const Box& placed : boxes) {
      if (!separated(candidate, placed, 2)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      boxes.push_back(candidate);
      consecutive_failures = 0;
    } else if (++consecutive_failures >= 100) {
      // Earlier boxes may block every remaining position; restart the
      // whole configuration rather than rejecting forever.
      boxes.clear();
      consecutive_failures = 0;
    }
  }
  return boxes;
}

// Separable Gaussian smoothing along one axis of a flat (x,y,z) volume,
// reflecting at the borders.
void smooth_axis(std::vector<double>& volume, const std::array<int, 3>& shape, int axis,
                 const std::vector<double>& kernel) {
  const int radius = static_cast<int>(kernel.size() / 2);
  const int ny = shape[1], nz = shape[2];
  const int len = shape[axis];
  std::vector<double> line(static_cast<std::size_t>(len));

  auto flat = [&](int x, int y, int z) {
    return (static_cast<std::size_t>(x) * ny + y) * nz + z;
  };
  auto reflect = [len](int i) {
    while (i < 0 || i >= len) {
      if (i < 0) i = -i - 1;
      if (i >= len) i = 2 * len - i - 1;
    }
    return i;
  };

  const int u_axis = (axis == 0) ? 1 : 0;  // the two fixed axes
  const int v_axis = (axis == 2) ? 1 : 2;
  std::array<int, 3> idx{};
  for (int u = 0; u < shape[u_axis]; ++u) {
    for (int v = 0; v < shape[v_axis]; ++v) {
      idx[u_axis] = u;
      idx[v_axis] = v;
      for (int i = 0; i < len; ++i) {
        idx[axis] = i;
        line[static_cast<std::size_t>(i)] = volume[flat(idx[0], idx[1], idx[2])];
      }
      for (int i = 0; i < len; ++i) {
        double acc = 0.0;
        for (int o = -radius; o <= radius; ++o) {
          acc += kernel[static_cast<std::size_t>(o + radius)] *
                 line[static_cast<std::size_t>(reflect(i + o))];
        }
        idx[axis] = i;
        volume[flat(idx[0], idx[1], idx[2])] = acc;
      }
    }
  }
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int o = -radius; o <= radius; ++o) {
    const double v = std::exp(-0.5 * (o * o) / (sigma * sigma));
    kernel[static_cast<std::size_t>(o + radius)] = v;
    total += v;
  }
  for (double& v : kernel) v /= total;
  return kernel;
}

}  // namespace

std::pair<Dataset, GroundTruth> generate_synthetic(const SimulationSpec& spec) {
  if (spec.n_samples < 1) throw std::invalid_argument("generate_synthetic: need at least 1 sample");
  if (spec.n_rois < 0) throw std::invalid_argument("generate_synthetic: negative ROI count");
  if (spec.target_snr <= 0.0) throw std::invalid_argument("generate_synthetic: SNR must be positive");
  if (spec.smoothing_width < 0.0) {
    throw std::invalid_argument("generate_synthetic: smoothing width must be nonnegative");
  }
  if (!spec.roi_amplitudes.empty() &&
      static_cast<int>(spec.roi_amplitudes.size()) != spec.n_rois) {
    throw std::invalid_argument("generate_synthetic: amplitude count does not match ROI count");
  }

  GridGeometry geometry = GridGeometry::full(spec.shape);
  const int p = geometry.n_features();

  RandomStream roi_rng(derive_seed(spec.seed, {0}));
  const std::vector<Box> boxes = place_rois(spec, roi_rng);

  Vector w_star = Vector::Zero(p);
  for (std::size_t r = 0; r < boxes.size(); ++r) {
    const double amplitude = spec.roi_amplitudes.empty()
                                 ? (r % 2 == 0 ? 1.0 : -1.0)
                                 : spec.roi_amplitudes[r];
    const Box& box = boxes[r];
    for (int x = box.corner[0]; x < box.corner[0] + box.size; ++x) {
      for (int y = box.corner[1]; y < box.corner[1] + box.size; ++y) {
        for (int z = box.corner[2]; z < box.corner[2] + box.size; ++z) {
          w_star[geometry.feature_at(x, y, z)] = amplitude;
        }
      }
    }
  }

  // Design: one smoothed white-noise volume per sample.
  RandomStream design_rng(derive_seed(spec.seed, {1}));
  const std::size_t volume_size =
      static_cast<std::size_t>(spec.shape[0]) * spec.shape[1] * spec.shape[2];
  std::vector<double> volume(volume_size);
  const std::vector<double> kernel =
      spec.smoothing_width > 0.0 ? gaussian_kernel(spec.smoothing_width) : std::vector<double>();

  Matrix X(spec.n_samples, p);
  for (int i = 0; i < spec.n_samples; ++i) {
    for (std::size_t v = 0; v < volume_size; ++v) volume[v] = design_rng.normal();
    if (!kernel.empty()) {
      for (int axis = 0; axis < 3; ++axis) smooth_axis(volume, spec.shape, axis, kernel);
    }
    for (int j = 0; j < p; ++j) {
      const auto& c = geometry.feature_coords()[static_cast<std::size_t>(j)];
      X(i, j) = volume[geometry.mask_index(c[0], c[1], c[2])];
    }
  }

  RandomStream noise_rng(derive_seed(spec.seed, {2}));
  Vector epsilon(spec.n_samples);
  for (int i = 0; i < spec.n_samples; ++i) epsilon[i] = noise_rng.normal();

  const Vector signal = X * w_star;
  const double signal_norm = signal.norm();
  // sigma from the SNR identity with the realized norms; pure-noise
  // convention sigma = 1 when the signal is identically zero.
  const double sigma =
      signal_norm > 0.0 ? signal_norm / (std::sqrt(spec.target_snr) * epsilon.norm()) : 1.0;
  const Vector y = signal + sigma * epsilon;

  return {Dataset(std::move(X), y, std::move(geometry)),
          GroundTruth::from_weights(std::move(w_star), sigma)};
}

double compute_snr(const Matrix& X, const Vector& w_star, double sigma, const Vector& epsilon) {
  if (X.cols() != w_star.size()) throw std::invalid_argument("compute_snr: shape mismatch");
  if (sigma <= 0.0) throw std::invalid_argument("compute_snr: sigma must be positive");
  const double eps_sq = epsilon.squaredNorm();
  if (eps_sq == 0.0) throw std::invalid_argument("compute_snr: zero noise vector");
  return (X * w_star).squaredNorm() / (sigma * sigma * eps_sq);
}

}  // namespace ecko
