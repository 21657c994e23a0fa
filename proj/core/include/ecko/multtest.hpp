/// @file multtest.hpp
/// @brief Quantile aggregation of p-values across draws, Benjamini-Hochberg
///        q-values, and thresholding.

#pragma once

#include "ecko/core.hpp"

namespace ecko {

/// Per-draw p-values: B rows (draws) by q columns (hypotheses), in [0,1].
struct PValueMatrix {
  Matrix values;

  int n_draws() const { return static_cast<int>(values.rows()); }
  int n_hypotheses() const { return static_cast<int>(values.cols()); }
};

/// Quantile aggregation per hypothesis: min(1, quantile_gamma({p^(b)}) / gamma)
/// with the lower empirical quantile (order statistic ceil(gamma * B)).
/// Monotone: raising any entry never lowers any output.
/// @throws std::invalid_argument if gamma is outside (0,1), B < 1, or an
///         entry lies outside [0,1]
Vector quantile_aggregate(const PValueMatrix& pvals, double gamma = 0.5);

/// Benjamini-Hochberg q-values: q_(i) = min_{k >= i} m p_(k) / k on the
/// sorted order, mapped back to input positions and capped at 1.
/// Thresholding {j : q_j <= alpha} reproduces the BHq step-up rejection set
/// at every level alpha.
/// @throws std::invalid_argument if an entry lies outside [0,1]
Vector bhq_qvalues(const Vector& pvals);

/// Indices with q_j <= alpha (boundary inclusive), ascending.
IndexSet threshold_select(const Vector& qvals, double alpha);

}  // namespace ecko
