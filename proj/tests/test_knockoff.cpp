#include <doctest.h>

#include "ecko/core.hpp"
#include "ecko/knockoff.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace ecko;

namespace {

Matrix gaussian_sample(int n, int q, std::uint64_t seed) {
  RandomStream rng(seed);
  Matrix X(n, q);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < q; ++j) X(i, j) = rng.normal();
  }
  return X;
}

// Gaussian sample with population covariance `sigma` (via Cholesky).
Matrix gaussian_sample_cov(int n, const Matrix& sigma, std::uint64_t seed) {
  const Matrix L = Eigen::LLT<Matrix>(sigma).matrixL();
  return gaussian_sample(n, static_cast<int>(sigma.cols()), seed) * L.transpose();
}

Matrix random_pd_covariance(int q, std::uint64_t seed) {
  RandomStream rng(seed);
  const Matrix A = gaussian_sample(q, q, seed + 1);
  const Matrix Q = Eigen::HouseholderQR<Matrix>(A).householderQ();
  Vector eigs(q);
  for (int i = 0; i < q; ++i) eigs[i] = 0.5 + 1.5 * rng.uniform();
  return Q * eigs.asDiagonal() * Q.transpose();
}

}  // namespace

TEST_SUITE("knockoff") {

TEST_CASE("fit: identity population covariance pushes s toward the diagonal") {
  const Matrix Xc = gaussian_sample(10000, 5, 3);
  const KnockoffModel model = fit_knockoff_model(Xc);
  for (int j = 0; j < 5; ++j) {
    CHECK(model.s[j] == doctest::Approx(model.sigma_hat(j, j)).epsilon(0.10));
  }
}

TEST_CASE("fit: single feature") {
  const Matrix Xc = 2.0 * gaussian_sample(200, 1, 5);
  const KnockoffModel model = fit_knockoff_model(Xc);
  CHECK(model.sigma_hat.rows() == 1);
  // min(2 * lambda_min(corr), 1) = 1 for a 1x1 correlation matrix.
  CHECK(model.s[0] == model.sigma_hat(0, 0));
}

TEST_CASE("fit: covariance stays positive definite, even with n < q") {
  for (auto [n, q] : {std::pair{8, 20}, {30, 30}, {100, 10}}) {
    const KnockoffModel model =
        fit_knockoff_model(gaussian_sample_cov(n, random_pd_covariance(q, 11), 17));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(model.sigma_hat);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    CHECK(model.shrinkage >= 0.0);
    CHECK(model.shrinkage <= 1.0);

    // Joint-covariance PSD condition: 2 diag(s) - diag(s) Sigma^-1 diag(s).
    const Matrix V = 2.0 * Matrix(model.s.asDiagonal()) -
                     model.s.asDiagonal() *
                         model.sigma_hat.llt().solve(Matrix(model.s.asDiagonal()));
    Eigen::SelfAdjointEigenSolver<Matrix> veig(0.5 * (V + V.transpose()));
    CHECK(veig.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("fit: argument errors") {
  Matrix one_row(1, 3);
  one_row << 1, 2, 3;
  CHECK_THROWS_AS(fit_knockoff_model(one_row), std::invalid_argument);

  Matrix constant = gaussian_sample(20, 3, 2);
  constant.col(1).setConstant(7.0);
  CHECK_THROWS_AS(fit_knockoff_model(constant), std::invalid_argument);
}

TEST_CASE("sample: zero offsets return the original matrix exactly") {
  const int q = 4;
  KnockoffModel model;
  model.mu = Vector::Zero(q);
  model.sigma_hat = Matrix::Identity(q, q);
  model.s = Vector::Zero(q);
  model.cond_coef = Matrix::Identity(q, q);
  model.noise_chol = Matrix::Zero(q, q);

  const Matrix Xc = gaussian_sample(15, q, 9);
  CHECK(sample_knockoffs(model, Xc, 1) == Xc);
}

TEST_CASE("sample: identity model with s = 1 decorrelates knockoffs") {
  const int q = 4;
  const int n = 20000;
  KnockoffModel model;
  model.mu = Vector::Zero(q);
  model.sigma_hat = Matrix::Identity(q, q);
  model.s = Vector::Ones(q);
  model.cond_coef = Matrix::Zero(q, q);            // I - I * diag(1)
  model.noise_chol = Matrix::Identity(q, q);       // 2 diag(s) - diag(s)^2 = I

  const Matrix Xc = gaussian_sample(n, q, 31);
  const Matrix Xk = sample_knockoffs(model, Xc, 7);
  for (int j = 0; j < q; ++j) {
    const double cov = Xc.col(j).dot(Xk.col(j)) / n;
    CHECK(std::abs(cov) <= 0.05);
  }
}

TEST_CASE("sample: deterministic given the seed") {
  const Matrix Xc = gaussian_sample(50, 6, 13);
  const KnockoffModel model = fit_knockoff_model(Xc);
  CHECK(sample_knockoffs(model, Xc, 99) == sample_knockoffs(model, Xc, 99));
  CHECK(sample_knockoffs(model, Xc, 99) != sample_knockoffs(model, Xc, 100));
  CHECK_THROWS_AS(sample_knockoffs(model, gaussian_sample(50, 7, 1), 0), std::invalid_argument);
}

TEST_CASE("second-moment exchangeability of the fitted model") {
  const int q = 10;
  const int n = 50000;
  const Matrix sigma = random_pd_covariance(q, 101);
  const Matrix Xc = gaussian_sample_cov(n, sigma, 55);
  const KnockoffModel model = fit_knockoff_model(Xc);
  const Matrix Xk = sample_knockoffs(model, Xc, 77);

  const Eigen::RowVectorXd mean_c = Xc.colwise().mean();
  const Eigen::RowVectorXd mean_k = Xk.colwise().mean();
  const Matrix cross = ((Xc.rowwise() - mean_c).transpose() * (Xk.rowwise() - mean_k)) / n;

  for (int j = 0; j < q; ++j) {
    for (int k = 0; k < q; ++k) {
      const double expected =
          j == k ? model.sigma_hat(j, j) - model.s[j] : model.sigma_hat(j, k);
      CHECK(std::abs(cross(j, k) - expected) <= 0.05);
    }
  }
}

TEST_CASE("lcd: orthonormal concatenated design recovers soft thresholding") {
  const int q = 4;
  const int n = 40;
  RandomStream rng(3);
  Matrix A(n, 2 * q);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 2 * q; ++j) A(i, j) = rng.normal();
  }
  const Matrix Q = Eigen::HouseholderQR<Matrix>(A).householderQ() * Matrix::Identity(n, 2 * q);
  const Matrix Xc = Q.leftCols(q);
  const Matrix Xk = Q.rightCols(q);
  const Vector y = 2.0 * Xc.col(0);

  const StatVector stats = lcd_statistic(Xc, Xk, y, 0.5);
  CHECK(stats.z[0] == doctest::Approx(1.5).epsilon(1e-9));
  for (int j = 1; j < q; ++j) CHECK(stats.z[j] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("lcd: zero response gives zero statistics") {
  const Matrix Xc = gaussian_sample(30, 5, 21);
  const Matrix Xk = gaussian_sample(30, 5, 22);
  const StatVector stats = lcd_statistic(Xc, Xk, Vector::Zero(30), 0.3);
  CHECK(stats.z.isZero(0.0));
}

TEST_CASE("lcd: null statistics have roughly symmetric signs") {
  // Pure noise with a permuted-copy "knockoff": pooled over 20 seeds x 10
  // features, the positive fraction among nonzero stats stays near 1/2.
  int positive = 0, nonzero = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 50, q = 10;
    const Matrix noise = gaussian_sample(n, 2 * q, 3000 + seed);
    const Matrix Xc = noise.leftCols(q);
    Matrix Xk(n, q);
    for (int j = 0; j < q; ++j) Xk.col(j) = noise.col(q + (j + 1) % q);
    RandomStream rng(600 + seed);
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.normal();

    Matrix D(n, 2 * q);
    D << Xc, Xk;
    const double lambda_zero = (D.transpose() * y).cwiseAbs().maxCoeff();
    const StatVector stats = lcd_statistic(Xc, Xk, y, 0.05 * lambda_zero);
    for (int j = 0; j < q; ++j) {
      if (stats.z[j] != 0.0) {
        ++nonzero;
        if (stats.z[j] > 0.0) ++positive;
      }
    }
  }
  REQUIRE(nonzero > 50);
  const double fraction = static_cast<double>(positive) / nonzero;
  CHECK(fraction >= 0.35);
  CHECK(fraction <= 0.65);
}

TEST_CASE("knockoff p-values: hand-computed example") {
  StatVector stats;
  stats.z = Vector(4);
  stats.z << 3, -1, 2, -3;
  const Vector p = knockoff_pvalues(stats);
  CHECK(p[0] == doctest::Approx(0.25));
  CHECK(p[1] == doctest::Approx(0.5));
  CHECK(p[2] == doctest::Approx(0.25));
  CHECK(p[3] == doctest::Approx(1.0));
}

TEST_CASE("knockoff p-values: edge cases") {
  StatVector all_positive;
  all_positive.z = Vector(3);
  all_positive.z << 0.5, 1.0, 2.0;
  CHECK(knockoff_pvalues(all_positive).isZero(0.0));

  StatVector zeros;
  zeros.z = Vector::Zero(2);
  const Vector p = knockoff_pvalues(zeros);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 1.0);

  StatVector empty;
  empty.z = Vector(0);
  CHECK_THROWS_AS(knockoff_pvalues(empty), std::invalid_argument);
}

TEST_CASE("knockoff p-values: monotone and permutation-equivariant") {
  RandomStream rng(41);
  StatVector stats;
  stats.z = Vector(12);
  for (int j = 0; j < 12; ++j) stats.z[j] = rng.normal();
  const Vector p = knockoff_pvalues(stats);

  for (int j = 0; j < 12; ++j) {
    for (int k = 0; k < 12; ++k) {
      if (stats.z[j] >= stats.z[k]) CHECK(p[j] <= p[k]);
    }
  }

  // Reverse the order; outputs must follow the same permutation.
  StatVector reversed;
  reversed.z = stats.z.reverse();
  const Vector pr = knockoff_pvalues(reversed);
  for (int j = 0; j < 12; ++j) CHECK(pr[j] == p[11 - j]);
}

TEST_CASE("offset mode shifts p-values to (0, 1]") {
  StatVector stats;
  stats.z = Vector(4);
  stats.z << 3, -1, 2, -3;
  const Vector p = knockoff_pvalues(stats, true);
  CHECK(p[0] == doctest::Approx(2.0 / 5.0));
  CHECK(p.minCoeff() > 0.0);
}

TEST_CASE("null p-values are approximately super-uniform") {
  // 5 seeds x 100 features of pure-noise LCD p-values. The p-values live on
  // a 1/q grid, so q must be large enough for the discretization not to
  // swamp the Monte-Carlo band.
  std::vector<double> pooled;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const int n = 150, q = 100;
    const Matrix Xc = gaussian_sample(n, q, 8000 + seed);
    RandomStream rng(900 + seed);
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.normal();

    const KnockoffModel model = fit_knockoff_model(Xc);
    const Matrix Xk = sample_knockoffs(model, Xc, 20000 + seed);
    Matrix D(n, 2 * q);
    D << Xc, Xk;
    const double lambda_zero = (D.transpose() * y).cwiseAbs().maxCoeff();
    const StatVector stats = lcd_statistic(Xc, Xk, y, 0.1 * lambda_zero);
    const Vector p = knockoff_pvalues(stats);
    for (int j = 0; j < q; ++j) pooled.push_back(p[j]);
  }
  REQUIRE(pooled.size() == 500);
  for (double alpha : {0.05, 0.1, 0.2}) {
    int below = 0;
    for (double p : pooled) {
      if (p <= alpha) ++below;
    }
    const double cdf = static_cast<double>(below) / 500.0;
    CHECK(cdf <= alpha + 3.0 * std::sqrt(alpha * (1.0 - alpha) / 500.0));
  }
}

}  // TEST_SUITE
