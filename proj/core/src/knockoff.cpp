#include "ecko/knockoff.hpp"

#include "ecko/lasso.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ecko {

KnockoffModel fit_knockoff_model(const Matrix& Xc) {
  const Eigen::Index n = Xc.rows();
  const Eigen::Index q = Xc.cols();
  if (n < 2) throw std::invalid_argument("fit_knockoff_model: need at least 2 samples");
  if (q < 1) throw std::invalid_argument("fit_knockoff_model: empty design");
  if (!Xc.allFinite()) throw std::invalid_argument("fit_knockoff_model: non-finite input");

  KnockoffModel model;
  model.mu = Xc.colwise().mean();

  Matrix centered = Xc.rowwise() - model.mu.transpose();
  for (Eigen::Index j = 0; j < q; ++j) {
    if (centered.col(j).squaredNorm() == 0.0) {
      throw std::invalid_argument("fit_knockoff_model: zero-variance column " + std::to_string(j));
    }
  }

  const double dn = static_cast<double>(n);
  Matrix S = (centered.transpose() * centered) / dn;

  // Ledoit-Wolf shrinkage toward nu * I with the analytic intensity.
  const double nu = S.trace() / static_cast<double>(q);
  const double d2 = (S - nu * Matrix::Identity(q, q)).squaredNorm() / static_cast<double>(q);
  double sum_norm4 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sq = centered.row(i).squaredNorm();
    sum_norm4 += sq * sq;
  }
  const double b2_bar = (sum_norm4 - dn * S.squaredNorm()) / (dn * dn * static_cast<double>(q));
  const double b2 = std::min(std::max(b2_bar, 0.0), d2);
  model.shrinkage = (d2 > 0.0) ? b2 / d2 : 0.0;
  model.sigma_hat = (1.0 - model.shrinkage) * S +
                    model.shrinkage * nu * Matrix::Identity(q, q);

  // Numerical floor: shrinkage already makes the estimate PD unless the
  // sample itself is pathologically degenerate.
  Eigen::SelfAdjointEigenSolver<Matrix> sig_eig(model.sigma_hat);
  const double min_eig = sig_eig.eigenvalues().minCoeff();
  if (min_eig <= 1e-12 * nu) {
    model.sigma_hat += (1e-10 * nu + std::max(0.0, -min_eig)) * Matrix::Identity(q, q);
  }

  // Equicorrelated offsets on the correlation scale, mapped back.
  const Vector d_sqrt = model.sigma_hat.diagonal().cwiseSqrt();
  Matrix corr = model.sigma_hat;
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index j = 0; j < q; ++j) corr(i, j) /= d_sqrt[i] * d_sqrt[j];
  }
  Eigen::SelfAdjointEigenSolver<Matrix> corr_eig(corr);
  const double s_corr = std::min(2.0 * corr_eig.eigenvalues().minCoeff(), 1.0);
  model.s = s_corr * model.sigma_hat.diagonal();

  // Sampling factors. V = 2 diag(s) - diag(s) Sigma^{-1} diag(s) is PSD by
  // the equicorrelated construction; clamp eigenvalue noise at zero.
  Eigen::LLT<Matrix> llt(model.sigma_hat);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("fit_knockoff_model: covariance factorization failed");
  }
  const Matrix sigma_inv_ds = llt.solve(Matrix(model.s.asDiagonal()));
  model.cond_coef = Matrix::Identity(q, q) - sigma_inv_ds;
  Matrix V = 2.0 * Matrix(model.s.asDiagonal()) - model.s.asDiagonal() * sigma_inv_ds;
  V = 0.5 * (V + V.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> v_eig(V);
  Vector v_vals = v_eig.eigenvalues().cwiseMax(0.0);
  model.noise_chol = v_eig.eigenvectors() * v_vals.cwiseSqrt().asDiagonal();
  return model;
}

Matrix sample_knockoffs(const KnockoffModel& model, const Matrix& Xc, std::uint64_t seed) {
  const Eigen::Index n = Xc.rows();
  const Eigen::Index q = Xc.cols();
  if (q != model.mu.size()) {
    throw std::invalid_argument("sample_knockoffs: design width does not match fitted model");
  }

  if (model.s.isZero(0.0)) {
    return Xc;  // degenerate offsets: conditional mean with zero noise
  }

  RandomStream rng(seed);
  Matrix Z(n, q);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < q; ++j) Z(i, j) = rng.normal();
  }

  Matrix Xk = (Xc.rowwise() - model.mu.transpose()) * model.cond_coef;
  Xk.noalias() += Z * model.noise_chol.transpose();
  Xk.rowwise() += model.mu.transpose();
  return Xk;
}

StatVector lcd_statistic(const Matrix& Xc, const Matrix& Xk, const Vector& y,
                         double lambda, Vector* coef_out) {
  if (Xc.rows() != Xk.rows() || Xc.cols() != Xk.cols()) {
    throw std::invalid_argument("lcd_statistic: original and knockoff shapes disagree");
  }
  if (Xc.rows() != y.size()) {
    throw std::invalid_argument("lcd_statistic: response length mismatch");
  }
  const Eigen::Index q = Xc.cols();

  StatVector stats;
  if (y.isZero(0.0)) {
    stats.z = Vector::Zero(q);
    if (coef_out) *coef_out = Vector::Zero(2 * q);
    return stats;
  }

  Matrix D(Xc.rows(), 2 * q);
  D << Xc, Xk;
  const LassoFit fit = lasso_fit_pathwise(D, y, lambda);
  stats.z = fit.w_hat.head(q).cwiseAbs() - fit.w_hat.tail(q).cwiseAbs();
  if (coef_out) *coef_out = fit.w_hat;
  return stats;
}

Vector knockoff_pvalues(const StatVector& stats, bool offset) {
  const Eigen::Index q = stats.z.size();
  if (q == 0) throw std::invalid_argument("knockoff_pvalues: empty statistic vector");
  if (!stats.z.allFinite()) throw std::invalid_argument("knockoff_pvalues: non-finite statistic");

  std::vector<double> sorted(stats.z.data(), stats.z.data() + q);
  std::sort(sorted.begin(), sorted.end());

  Vector p(q);
  for (Eigen::Index j = 0; j < q; ++j) {
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), -stats.z[j]) - sorted.begin();
    p[j] = offset ? (1.0 + static_cast<double>(count)) / (static_cast<double>(q) + 1.0)
                  : static_cast<double>(count) / static_cast<double>(q);
  }
  return p;
}

}  // namespace ecko
