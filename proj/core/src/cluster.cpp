#include "ecko/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace ecko {

std::vector<std::vector<int>> Clustering::members() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n_clusters));
  for (std::size_t k = 0; k < assignment.size(); ++k) {
    out[static_cast<std::size_t>(assignment[k])].push_back(static_cast<int>(k));
  }
  return out;
}

IndexSet subsample_rows(int n, double fraction, std::uint64_t seed) {
  if (fraction <= 0.0 || fraction > 1.0) {
    throw std::invalid_argument("subsample_rows: fraction must be in (0,1]");
  }
  const int size = static_cast<int>(std::floor(fraction * n));
  if (size < 2) throw std::invalid_argument("subsample_rows: subsample smaller than 2 rows");

  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  RandomStream rng(seed);
  for (int i = 0; i < size; ++i) {
    const int j = i + rng.uniform_int(n - i);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  IndexSet rows(idx.begin(), idx.begin() + size);
  std::sort(rows.begin(), rows.end());
  return rows;
}

namespace {

// Candidate merge in the lazy-deletion heap. Orders by (cost, a, b) so the
// merge sequence is deterministic; stale entries are skipped on pop.
struct MergeCandidate {
  double cost;
  int a, b;            // cluster ids, a < b
  std::uint32_t va, vb;  // cluster versions at push time
};

struct CandidateGreater {
  bool operator()(const MergeCandidate& lhs, const MergeCandidate& rhs) const {
    if (lhs.cost != rhs.cost) return lhs.cost > rhs.cost;
    if (lhs.a != rhs.a) return lhs.a > rhs.a;
    return lhs.b > rhs.b;
  }
};

int count_components(const GridGeometry& geometry) {
  const int p = geometry.n_features();
  std::vector<char> seen(static_cast<std::size_t>(p), 0);
  int components = 0;
  std::vector<int> stack;
  for (int start = 0; start < p; ++start) {
    if (seen[static_cast<std::size_t>(start)]) continue;
    ++components;
    stack.push_back(start);
    seen[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : geometry.neighbors6(v)) {
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          stack.push_back(w);
        }
      }
    }
  }
  return components;
}

}  // namespace

Clustering ward_cluster(const Matrix& X_sub, const GridGeometry& geometry, int q) {
  const int p = geometry.n_features();
  if (X_sub.cols() != p) {
    throw std::invalid_argument("ward_cluster: column count does not match geometry");
  }
  if (q > p) throw std::invalid_argument("ward_cluster: more clusters than features");
  if (q < 1) throw std::invalid_argument("ward_cluster: cluster count must be positive");
  const int components = count_components(geometry);
  if (q < components) {
    throw std::invalid_argument(
        "ward_cluster: cluster count below the number of connected components (" +
        std::to_string(components) + ")");
  }

  // Per-cluster moments: member count and column sum. Ward merge cost is
  // computed directly from centroids, which equals the Lance-Williams
  // recurrence value for Ward linkage.
  const Eigen::Index n = X_sub.rows();
  std::vector<int> size(static_cast<std::size_t>(p), 1);
  Matrix sums = X_sub;  // column c = running sum of cluster c's columns
  std::vector<std::uint32_t> version(static_cast<std::size_t>(p), 0);
  std::vector<char> active(static_cast<std::size_t>(p), 1);
  // Cluster id = smallest member feature index; parent for final readout.
  std::vector<int> parent(static_cast<std::size_t>(p));
  std::iota(parent.begin(), parent.end(), 0);

  std::vector<std::unordered_set<int>> adjacency(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    for (int w : geometry.neighbors6(j)) adjacency[static_cast<std::size_t>(j)].insert(w);
  }

  Vector centroid_a(n), centroid_b(n);
  auto ward_cost = [&](int a, int b) {
    const double na = size[static_cast<std::size_t>(a)];
    const double nb = size[static_cast<std::size_t>(b)];
    centroid_a = sums.col(a) / na;
    centroid_b = sums.col(b) / nb;
    return na * nb / (na + nb) * (centroid_a - centroid_b).squaredNorm();
  };

  std::priority_queue<MergeCandidate, std::vector<MergeCandidate>, CandidateGreater> heap;
  for (int a = 0; a < p; ++a) {
    for (int b : adjacency[static_cast<std::size_t>(a)]) {
      if (a < b) heap.push({ward_cost(a, b), a, b, 0, 0});
    }
  }

  int n_active = p;
  while (n_active > q) {
    if (heap.empty()) {
      throw std::runtime_error("ward_cluster: ran out of adjacent pairs");  // unreachable
    }
    const MergeCandidate top = heap.top();
    heap.pop();
    if (!active[static_cast<std::size_t>(top.a)] || !active[static_cast<std::size_t>(top.b)] ||
        version[static_cast<std::size_t>(top.a)] != top.va ||
        version[static_cast<std::size_t>(top.b)] != top.vb) {
      continue;  // stale candidate
    }

    const int keep = top.a;  // a < b, so the merged cluster keeps the smaller id
    const int gone = top.b;
    sums.col(keep) += sums.col(gone);
    size[static_cast<std::size_t>(keep)] += size[static_cast<std::size_t>(gone)];
    active[static_cast<std::size_t>(gone)] = 0;
    parent[static_cast<std::size_t>(gone)] = keep;
    ++version[static_cast<std::size_t>(keep)];
    --n_active;

    auto& adj_keep = adjacency[static_cast<std::size_t>(keep)];
    auto& adj_gone = adjacency[static_cast<std::size_t>(gone)];
    adj_keep.erase(gone);
    for (int c : adj_gone) {
      if (c == keep) continue;
      adjacency[static_cast<std::size_t>(c)].erase(gone);
      adjacency[static_cast<std::size_t>(c)].insert(keep);
      adj_keep.insert(c);
    }
    adj_gone.clear();

    for (int c : adj_keep) {
      const int a = std::min(keep, c);
      const int b = std::max(keep, c);
      heap.push({ward_cost(a, b), a, b, version[static_cast<std::size_t>(a)],
                 version[static_cast<std::size_t>(b)]});
    }
  }

  // Resolve representatives and relabel by smallest member index.
  std::vector<int> representative(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    int r = j;
    while (parent[static_cast<std::size_t>(r)] != r) r = parent[static_cast<std::size_t>(r)];
    // Path compression keeps the readout linear.
    int v = j;
    while (parent[static_cast<std::size_t>(v)] != r) {
      const int next = parent[static_cast<std::size_t>(v)];
      parent[static_cast<std::size_t>(v)] = r;
      v = next;
    }
    representative[static_cast<std::size_t>(j)] = r;
  }
  std::vector<int> label_of_rep(static_cast<std::size_t>(p), -1);
  int next_label = 0;
  for (int j = 0; j < p; ++j) {  // feature order => labels ordered by smallest member
    const int r = representative[static_cast<std::size_t>(j)];
    if (label_of_rep[static_cast<std::size_t>(r)] < 0) {
      label_of_rep[static_cast<std::size_t>(r)] = next_label++;
    }
  }

  Clustering clustering;
  clustering.n_clusters = q;
  clustering.assignment.resize(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    clustering.assignment[static_cast<std::size_t>(j)] =
        label_of_rep[static_cast<std::size_t>(representative[static_cast<std::size_t>(j)])];
  }

  // Diameters: exact for clusters up to 2000 voxels, bounding-box diagonal
  // (a safe upper bound) beyond that.
  clustering.diameters.assign(static_cast<std::size_t>(q), 0.0);
  const auto& coords = geometry.feature_coords();
  for (const auto& group : clustering.members()) {
    const int label = clustering.assignment[static_cast<std::size_t>(group.front())];
    double diameter = 0.0;
    if (group.size() <= 2000) {
      for (std::size_t i = 0; i < group.size(); ++i) {
        for (std::size_t j = i + 1; j < group.size(); ++j) {
          diameter = std::max(diameter,
                              voxel_distance(coords[static_cast<std::size_t>(group[i])],
                                             coords[static_cast<std::size_t>(group[j])]));
        }
      }
    } else {
      std::array<int, 3> lo = coords[static_cast<std::size_t>(group.front())];
      std::array<int, 3> hi = lo;
      for (int member : group) {
        for (int d = 0; d < 3; ++d) {
          lo[d] = std::min(lo[d], coords[static_cast<std::size_t>(member)][d]);
          hi[d] = std::max(hi[d], coords[static_cast<std::size_t>(member)][d]);
        }
      }
      diameter = voxel_distance(lo, hi);
    }
    clustering.diameters[static_cast<std::size_t>(label)] = diameter;
  }
  return clustering;
}

Matrix reduce_features(const Matrix& X, const Clustering& clustering) {
  const Eigen::Index p = X.cols();
  if (static_cast<Eigen::Index>(clustering.assignment.size()) != p) {
    throw std::invalid_argument("reduce_features: assignment length does not match columns");
  }
  const int q = clustering.n_clusters;
  Matrix reduced = Matrix::Zero(X.rows(), q);
  std::vector<int> counts(static_cast<std::size_t>(q), 0);
  for (Eigen::Index j = 0; j < p; ++j) {
    const int label = clustering.assignment[static_cast<std::size_t>(j)];
    if (label < 0 || label >= q) {
      throw std::invalid_argument("reduce_features: cluster label out of range");
    }
    reduced.col(label) += X.col(j);
    ++counts[static_cast<std::size_t>(label)];
  }
  for (int c = 0; c < q; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) {
      throw std::invalid_argument("reduce_features: empty cluster label " + std::to_string(c));
    }
    reduced.col(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
  }
  return reduced;
}

Vector broadcast_qvalues(const Vector& cluster_q, const Clustering& clustering) {
  if (cluster_q.size() != clustering.n_clusters) {
    throw std::invalid_argument("broadcast_qvalues: cluster count mismatch");
  }
  Vector out(static_cast<Eigen::Index>(clustering.assignment.size()));
  for (std::size_t k = 0; k < clustering.assignment.size(); ++k) {
    const int label = clustering.assignment[k];
    if (label < 0 || label >= clustering.n_clusters) {
      throw std::invalid_argument("broadcast_qvalues: cluster label out of range");
    }
    out[static_cast<Eigen::Index>(k)] = cluster_q[label];
  }
  return out;
}

double max_diameter(const std::vector<Clustering>& clusterings) {
  if (clusterings.empty()) throw std::invalid_argument("max_diameter: empty clustering list");
  double result = 0.0;
  for (const auto& clustering : clusterings) {
    for (double d : clustering.diameters) result = std::max(result, d);
  }
  return result;
}

}  // namespace ecko
