#include "ecko/multtest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ecko {

Vector quantile_aggregate(const PValueMatrix& pvals, double gamma) {
  if (gamma <= 0.0 || gamma >= 1.0) {
    throw std::invalid_argument("quantile_aggregate: gamma must be in (0,1)");
  }
  const Eigen::Index B = pvals.values.rows();
  const Eigen::Index q = pvals.values.cols();
  if (B < 1) throw std::invalid_argument("quantile_aggregate: need at least one draw");
  if ((pvals.values.array() < 0.0).any() || (pvals.values.array() > 1.0).any()) {
    throw std::invalid_argument("quantile_aggregate: p-values must lie in [0,1]");
  }

  // Lower empirical quantile: order statistic at rank ceil(gamma * B).
  const Eigen::Index rank =
      static_cast<Eigen::Index>(std::ceil(gamma * static_cast<double>(B)));
  const Eigen::Index k = std::clamp<Eigen::Index>(rank, 1, B) - 1;  // 0-based

  Vector out(q);
  std::vector<double> column(static_cast<std::size_t>(B));
  for (Eigen::Index j = 0; j < q; ++j) {
    for (Eigen::Index b = 0; b < B; ++b) column[static_cast<std::size_t>(b)] = pvals.values(b, j);
    std::nth_element(column.begin(), column.begin() + k, column.end());
    out[j] = std::min(1.0, column[static_cast<std::size_t>(k)] / gamma);
  }
  return out;
}

Vector bhq_qvalues(const Vector& pvals) {
  const Eigen::Index m = pvals.size();
  if ((pvals.array() < 0.0).any() || (pvals.array() > 1.0).any()) {
    throw std::invalid_argument("bhq_qvalues: p-values must lie in [0,1]");
  }
  if (m == 0) return Vector();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  // Ties broken by original index; the result is tie-break invariant.
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return pvals[a] != pvals[b] ? pvals[a] < pvals[b] : a < b;
  });

  Vector q(m);
  double running_min = 1.0;
  for (Eigen::Index i = m - 1; i >= 0; --i) {
    const double stepped =
        pvals[order[static_cast<std::size_t>(i)]] * static_cast<double>(m) / static_cast<double>(i + 1);
    running_min = std::min(running_min, stepped);
    q[order[static_cast<std::size_t>(i)]] = running_min;
  }
  return q;
}

IndexSet threshold_select(const Vector& qvals, double alpha) {
  IndexSet selected;
  for (Eigen::Index j = 0; j < qvals.size(); ++j) {
    if (qvals[j] <= alpha) selected.push_back(static_cast<int>(j));
  }
  return selected;
}

}  // namespace ecko
