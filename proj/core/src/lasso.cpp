#include "ecko/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ecko {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

void check_design(const Matrix& design, const Vector& y, double lambda) {
  if (design.rows() != y.size()) {
    throw std::invalid_argument("lasso_fit: design rows must equal response length");
  }
  if (design.cols() == 0) throw std::invalid_argument("lasso_fit: empty design");
  if (!design.allFinite() || !y.allFinite()) {
    throw std::invalid_argument("lasso_fit: non-finite input");
  }
  if (lambda <= 0.0) throw std::invalid_argument("lasso_fit: lambda must be positive");
  const auto n = static_cast<double>(design.rows());
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    const double mean = design.col(j).mean();
    const double var = design.col(j).squaredNorm() / n - mean * mean;
    if (var <= 0.0) {
      throw std::invalid_argument("lasso_fit: zero-variance column " + std::to_string(j));
    }
  }
}

// Core CD loop; assumes inputs validated. Residual r = y - D w maintained.
LassoFit solve_cd(const Matrix& design, const Vector& y, double lambda,
                  double tol, int max_iters, const Vector* warm_start) {
  const Eigen::Index m = design.cols();

  LassoFit fit;
  fit.lambda = lambda;
  fit.w_hat = Vector::Zero(m);
  if (warm_start) {
    if (warm_start->size() != m) {
      throw std::invalid_argument("lasso_fit: warm start length mismatch");
    }
    fit.w_hat = *warm_start;
  }

  const Vector col_sqnorm = design.colwise().squaredNorm();
  Vector r = y - design * fit.w_hat;

  for (int sweep = 0; sweep < max_iters; ++sweep) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (col_sqnorm[j] == 0.0) continue;  // degenerate fold column, keep w_j = 0
      const double wj = fit.w_hat[j];
      const double cj = design.col(j).dot(r) + wj * col_sqnorm[j];
      const double wj_new = soft_threshold(cj, lambda) / col_sqnorm[j];
      if (wj_new != wj) {
        r.noalias() -= (wj_new - wj) * design.col(j);
        fit.w_hat[j] = wj_new;
      }
    }
    fit.n_iters = sweep + 1;
    fit.objective_trace.push_back(0.5 * r.squaredNorm() + lambda * fit.w_hat.lpNorm<1>());

    // KKT violation at the end of the sweep.
    const Vector grad = design.transpose() * r;
    double violation = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (fit.w_hat[j] != 0.0) {
        violation = std::max(violation,
                             std::abs(grad[j] - lambda * (fit.w_hat[j] > 0 ? 1.0 : -1.0)));
      } else {
        violation = std::max(violation, std::abs(grad[j]) - lambda);
      }
    }
    if (violation <= tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

}  // namespace

LassoFit lasso_fit(const Matrix& design, const Vector& y, double lambda,
                   double tol, int max_iters, const Vector* warm_start) {
  check_design(design, y, lambda);
  return solve_cd(design, y, lambda, tol, max_iters, warm_start);
}

LassoFit lasso_fit_pathwise(const Matrix& design, const Vector& y, double lambda,
                            double tol, int max_iters) {
  check_design(design, y, lambda);
  const double lambda_zero = (design.transpose() * y).cwiseAbs().maxCoeff();
  if (lambda >= lambda_zero) {
    // Everything soft-thresholds to zero; the zero vector is optimal.
    LassoFit fit;
    fit.lambda = lambda;
    fit.w_hat = Vector::Zero(design.cols());
    fit.n_iters = 0;
    fit.converged = true;
    fit.objective_trace.push_back(0.5 * y.squaredNorm());
    return fit;
  }

  constexpr int kPathSteps = 8;
  const double ratio = lambda / lambda_zero;
  Vector warm = Vector::Zero(design.cols());
  for (int s = 1; s < kPathSteps; ++s) {
    const double lam = lambda_zero * std::pow(ratio, static_cast<double>(s) / kPathSteps);
    // Loose tolerance on interior path points; only the target fit matters.
    LassoFit step = solve_cd(design, y, lam, std::max(tol, 1e-4), 50, &warm);
    warm = step.w_hat;
  }
  return solve_cd(design, y, lambda, tol, max_iters, &warm);
}

double lasso_kkt_violation(const Matrix& design, const Vector& y,
                           const Vector& w, double lambda) {
  const Vector grad = design.transpose() * (y - design * w);
  double violation = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w[j] != 0.0) {
      violation = std::max(violation, std::abs(grad[j] - lambda * (w[j] > 0 ? 1.0 : -1.0)));
    } else {
      violation = std::max(violation, std::abs(grad[j]) - lambda);
    }
  }
  return violation;
}

double lasso_cv_lambda(const Matrix& design, const Vector& y, int n_folds,
                       int grid_size, std::uint64_t seed) {
  const Eigen::Index n = design.rows();
  const Eigen::Index m = design.cols();
  if (n_folds < 2) throw std::invalid_argument("lasso_cv_lambda: n_folds must be >= 2");
  if (n < n_folds) throw std::invalid_argument("lasso_cv_lambda: fewer samples than folds");
  if (grid_size < 1) throw std::invalid_argument("lasso_cv_lambda: grid_size must be >= 1");
  if (design.rows() != y.size()) {
    throw std::invalid_argument("lasso_cv_lambda: design rows must equal response length");
  }

  const double lambda_max = (design.transpose() * y).cwiseAbs().maxCoeff() / static_cast<double>(n);
  if (lambda_max <= 0.0) {
    throw std::invalid_argument("lasso_cv_lambda: response is orthogonal to every column");
  }

  // Descending log grid from lambda_max to lambda_max/1000.
  std::vector<double> grid(static_cast<std::size_t>(grid_size));
  if (grid_size == 1) {
    grid[0] = lambda_max;
  } else {
    const double log_hi = std::log(lambda_max);
    const double log_lo = std::log(lambda_max / 1000.0);
    for (int g = 0; g < grid_size; ++g) {
      grid[static_cast<std::size_t>(g)] =
          std::exp(log_hi + (log_lo - log_hi) * g / (grid_size - 1));
    }
  }

  // Seeded permutation, folds assigned round-robin.
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  RandomStream rng(seed);
  for (Eigen::Index i = 0; i < n - 1; ++i) {
    const int j = static_cast<int>(i) + rng.uniform_int(static_cast<int>(n - i));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }

  std::vector<double> sse(grid.size(), 0.0);
  for (int f = 0; f < n_folds; ++f) {
    std::vector<int> val_rows, train_rows;
    for (Eigen::Index i = 0; i < n; ++i) {
      (static_cast<int>(i) % n_folds == f ? val_rows : train_rows)
          .push_back(perm[static_cast<std::size_t>(i)]);
    }

    Matrix D_train(train_rows.size(), m), D_val(val_rows.size(), m);
    Vector y_train(train_rows.size()), y_val(val_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      D_train.row(static_cast<Eigen::Index>(i)) = design.row(train_rows[i]);
      y_train[static_cast<Eigen::Index>(i)] = y[train_rows[i]];
    }
    for (std::size_t i = 0; i < val_rows.size(); ++i) {
      D_val.row(static_cast<Eigen::Index>(i)) = design.row(val_rows[i]);
      y_val[static_cast<Eigen::Index>(i)] = y[val_rows[i]];
    }

    // Grid values are on the per-sample scale (objective (1/2n)||r||^2 +
    // lambda ||w||_1); the solver works on the unscaled objective, so each
    // candidate maps to n_train * lambda on the training fold.
    const double n_train = static_cast<double>(train_rows.size());
    Vector warm = Vector::Zero(m);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      LassoFit fit = solve_cd(D_train, y_train, n_train * grid[g], 1e-5, 500, &warm);
      warm = fit.w_hat;
      sse[g] += (y_val - D_val * fit.w_hat).squaredNorm();
    }
  }

  // Grid is descending, so the first minimizer is the largest such lambda.
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (sse[g] < sse[best]) best = g;
  }
  return grid[best];
}

}  // namespace ecko
