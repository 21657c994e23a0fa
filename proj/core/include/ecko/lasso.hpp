/// @file lasso.hpp
/// @brief Lasso solver (cyclic coordinate descent) and cross-validated
///        regularization selection.
///
/// Objective: (1/2) ||y - D w||_2^2 + lambda ||w||_1. The solver works on
/// the design as given; callers are expected to standardize columns first.

#pragma once

#include "ecko/core.hpp"

namespace ecko {

struct LassoFit {
  Vector w_hat;
  double lambda = 0.0;
  int n_iters = 0;        // coordinate-descent sweeps performed
  bool converged = false; // max per-coordinate KKT violation <= tol
  std::vector<double> objective_trace;  // objective value after each sweep
};

/// Minimizes (1/2)||y - D w||^2 + lambda ||w||_1 by cyclic coordinate
/// descent. Deterministic given inputs. `warm_start`, when provided, seeds
/// the iterate (length must match the column count).
///
/// converged is true iff the max per-coordinate KKT violation dropped to
/// <= tol within max_iters sweeps:
///   w_j != 0:  |D_j'(y - Dw) - lambda sign(w_j)| <= tol
///   w_j == 0:  |D_j'(y - Dw)| <= lambda + tol
///
/// @throws std::invalid_argument on zero-variance columns, non-finite
///         input, shape mismatch or lambda <= 0
LassoFit lasso_fit(const Matrix& design, const Vector& y, double lambda,
                   double tol = 1e-6, int max_iters = 1000,
                   const Vector* warm_start = nullptr);

/// Same solution as lasso_fit, reached through a short geometric sequence
/// of decreasing lambdas with warm starts. Much faster for small lambda on
/// wide designs; the returned fit is KKT-checked at the target lambda.
LassoFit lasso_fit_pathwise(const Matrix& design, const Vector& y, double lambda,
                            double tol = 1e-6, int max_iters = 1000);

/// Max per-coordinate KKT violation of `w` for the lasso objective.
double lasso_kkt_violation(const Matrix& design, const Vector& y,
                           const Vector& w, double lambda);

/// Picks lambda by k-fold cross-validation over a logarithmic grid of
/// `grid_size` values spanning [lambda_max/1000, lambda_max] with
/// lambda_max = max_j |D_j' y| / n. Returns the grid value minimizing mean
/// held-out squared error; ties resolve to the larger lambda. Fold
/// assignment is a seeded permutation, deterministic given `seed`.
///
/// The grid lives on the per-sample scale, where lambda_max zeroes every
/// coefficient of the objective (1/2n)||y - Dw||^2 + lambda ||w||_1;
/// multiply the returned value by the row count to use it with lasso_fit's
/// unscaled objective.
///
/// @throws std::invalid_argument if n < n_folds, n_folds < 2, grid_size < 1,
///         or the response is orthogonal to every column
double lasso_cv_lambda(const Matrix& design, const Vector& y, int n_folds = 5,
                       int grid_size = 20, std::uint64_t seed = 0);

}  // namespace ecko
