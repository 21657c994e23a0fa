/// @file knockoff.hpp
/// @brief Gaussian model-X knockoff sampling, lasso-coefficient-difference
///        statistics and intermediate knockoff p-values.

#pragma once

#include "ecko/core.hpp"

namespace ecko {

/// Fitted Gaussian feature model used for knockoff sampling.
///
/// sigma_hat is a shrinkage covariance estimate (always positive definite,
/// even when n < q); s is the equicorrelated knockoff offset vector, chosen
/// so the joint covariance of (X, X~) stays positive semidefinite.
struct KnockoffModel {
  Vector mu;          // column means (q)
  Matrix sigma_hat;   // shrunk covariance (q x q), PD
  Vector s;           // knockoff offsets (q), nonnegative
  double shrinkage = 0.0;  // shrinkage intensity used for sigma_hat

  // Cached sampling factors: X~ = mu + (X - mu) A + Z L', Z iid N(0,1).
  Matrix cond_coef;   // A = I - sigma_hat^{-1} diag(s)
  Matrix noise_chol;  // L with L L' = 2 diag(s) - diag(s) sigma_hat^{-1} diag(s)
};

/// Statistic vector z_j = |w_j| - |w_{j+q}| from the lasso on [X, X~].
struct StatVector {
  Vector z;
};

/// Fits the Gaussian knockoff model on a (reduced) design.
///
/// Covariance: Ledoit-Wolf shrinkage (1-rho) Sigma_emp + rho nu I with the
/// analytic rho, guaranteeing positive definiteness when n < q. Offsets:
/// equicorrelated construction s_j = min(2 lambda_min(corr), 1) rescaled to
/// covariance scale.
///
/// @throws std::invalid_argument if n < 2 or a column has zero variance
KnockoffModel fit_knockoff_model(const Matrix& Xc);

/// Samples Gaussian conditional knockoffs for `Xc` under `model`:
/// X~ | X = mu + (X - mu)(I - sigma_hat^{-1} diag(s)) + E with E rows iid
/// N(0, 2 diag(s) - diag(s) sigma_hat^{-1} diag(s)). Deterministic given
/// `seed`; s = 0 returns Xc exactly.
///
/// @throws std::invalid_argument on dimension mismatch
Matrix sample_knockoffs(const KnockoffModel& model, const Matrix& Xc, std::uint64_t seed);

/// LCD statistic from the lasso at `lambda` on the column-concatenated
/// design [Xc, Xk] (callers pass standardized inputs). `coef_out`, when
/// non-null, receives the full fitted coefficient vector (length 2q) so the
/// sign of each original-column coefficient is available for sign votes.
StatVector lcd_statistic(const Matrix& Xc, const Matrix& Xk, const Vector& y,
                         double lambda, Vector* coef_out = nullptr);

/// Intermediate knockoff p-values p_j = #{k : z_k <= -z_j} / q.
/// With `offset` true, the conservative variant (1 + count) / (q + 1) is
/// used instead; off by default.
/// @throws std::invalid_argument on an empty statistic vector
Vector knockoff_pvalues(const StatVector& stats, bool offset = false);

}  // namespace ecko
