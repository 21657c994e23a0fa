#include "ecko/core.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace ecko {

GridGeometry::GridGeometry(std::array<int, 3> shape, std::vector<std::uint8_t> mask)
    : shape_(shape), mask_(std::move(mask)) {
  for (int d = 0; d < 3; ++d) {
    if (shape_[d] <= 0) throw std::invalid_argument("GridGeometry: shape entries must be positive");
  }
  const std::size_t volume =
      static_cast<std::size_t>(shape_[0]) * shape_[1] * shape_[2];
  if (mask_.size() != volume) {
    throw std::invalid_argument("GridGeometry: mask length does not match shape volume");
  }
  feature_of_voxel_.assign(volume, -1);
  // Canonical feature order: lexicographic (x, y, z) scan of the mask.
  for (int x = 0; x < shape_[0]; ++x) {
    for (int y = 0; y < shape_[1]; ++y) {
      for (int z = 0; z < shape_[2]; ++z) {
        const std::size_t idx = mask_index(x, y, z);
        if (mask_[idx]) {
          feature_of_voxel_[idx] = static_cast<int>(coords_.size());
          coords_.push_back({x, y, z});
        }
      }
    }
  }
  if (coords_.empty()) throw std::invalid_argument("GridGeometry: mask has no active voxel");
}

GridGeometry GridGeometry::full(std::array<int, 3> shape) {
  const std::size_t volume =
      static_cast<std::size_t>(shape[0]) * shape[1] * shape[2];
  return GridGeometry(shape, std::vector<std::uint8_t>(volume, 1));
}

int GridGeometry::feature_at(int x, int y, int z) const {
  if (x < 0 || y < 0 || z < 0 || x >= shape_[0] || y >= shape_[1] || z >= shape_[2]) return -1;
  return feature_of_voxel_[mask_index(x, y, z)];
}

std::vector<int> GridGeometry::neighbors6(int j) const {
  if (j < 0 || j >= n_features()) throw std::invalid_argument("neighbors6: feature index out of range");
  const auto& c = coords_[static_cast<std::size_t>(j)];
  static constexpr int offsets[6][3] = {{-1, 0, 0}, {1, 0, 0},  {0, -1, 0},
                                        {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
  std::vector<int> out;
  out.reserve(6);
  for (const auto& o : offsets) {
    const int f = feature_at(c[0] + o[0], c[1] + o[1], c[2] + o[2]);
    if (f >= 0) out.push_back(f);
  }
  return out;
}

double voxel_distance(const std::array<int, 3>& a, const std::array<int, 3>& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double voxel_distance(int j, int k, const GridGeometry& geometry) {
  const int p = geometry.n_features();
  if (j < 0 || j >= p || k < 0 || k >= p) {
    throw std::invalid_argument("voxel_distance: feature index out of range");
  }
  return voxel_distance(geometry.feature_coords()[static_cast<std::size_t>(j)],
                        geometry.feature_coords()[static_cast<std::size_t>(k)]);
}

Dataset::Dataset(Matrix X, Vector y, std::optional<GridGeometry> geometry)
    : X_(std::move(X)), y_(std::move(y)), geometry_(std::move(geometry)) {
  if (X_.rows() != y_.size()) {
    throw std::invalid_argument("Dataset: X row count must equal y length");
  }
  if (!X_.allFinite() || !y_.allFinite()) {
    throw std::invalid_argument("Dataset: non-finite entries");
  }
  if (geometry_ && geometry_->n_features() != X_.cols()) {
    throw std::invalid_argument("Dataset: feature count does not match geometry's active voxels");
  }
}

GroundTruth GroundTruth::from_weights(Vector w_star, double sigma) {
  GroundTruth gt;
  gt.w_star = std::move(w_star);
  gt.sigma = sigma;
  for (int k = 0; k < gt.w_star.size(); ++k) {
    if (gt.w_star[k] != 0.0) gt.support.push_back(k);
  }
  return gt;
}

namespace {

// splitmix64 finalizer; full-period bijective mixer.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::span<const std::uint64_t> labels) {
  std::uint64_t h = mix64(master_seed ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t label : labels) {
    h = mix64(h ^ mix64(label));
  }
  // Fold in the length so a sequence is never a prefix-collision of another.
  return mix64(h ^ (0x9e3779b97f4a7c15ULL * (labels.size() + 1)));
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::initializer_list<std::uint64_t> labels) {
  return derive_seed(master_seed, std::span<const std::uint64_t>(labels.begin(), labels.size()));
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

int RandomStream::uniform_int(int bound) {
  if (bound <= 0) throw std::invalid_argument("uniform_int: bound must be positive");
  // Rejection sampling on the top bits keeps the draw unbiased.
  const std::uint64_t b = static_cast<std::uint64_t>(bound);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / b * b;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return static_cast<int>(x % b);
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 in (0,1] so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

void parallel_for(int n, int n_threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (n_threads <= 0) {
    n_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads <= 0) n_threads = 1;
  }
  n_threads = std::min(n_threads, n);
  if (n_threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ecko
