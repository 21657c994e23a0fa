#include <doctest.h>

#include "ecko/core.hpp"
#include "ecko/simdata.hpp"

#include <cmath>

using namespace ecko;

TEST_SUITE("simdata") {

TEST_CASE("default ROI layout: 5 cubes of edge 6 -> 1080 support voxels") {
  SimulationSpec spec;  // shape 50^3, 5 ROIs, edge 6
  spec.n_samples = 5;
  spec.seed = 11;
  const auto [dataset, truth] = generate_synthetic(spec);
  CHECK(dataset.n_features() == 50 * 50 * 50);
  CHECK(truth.support.size() == 1080);  // disjoint by construction
  CHECK(dataset.geometry().has_value());

  // Alternating amplitudes exercise both signs.
  bool has_positive = false, has_negative = false;
  for (int k : truth.support) {
    if (truth.w_star[k] > 0) has_positive = true;
    if (truth.w_star[k] < 0) has_negative = true;
  }
  CHECK(has_positive);
  CHECK(has_negative);
}

TEST_CASE("realized SNR matches the target exactly") {
  SimulationSpec spec;
  spec.shape = {8, 8, 8};
  spec.n_samples = 40;
  spec.n_rois = 2;
  spec.roi_size = 3;
  spec.target_snr = 3.6;
  spec.seed = 5;
  const auto [dataset, truth] = generate_synthetic(spec);

  const Vector epsilon = (dataset.y() - dataset.X() * truth.w_star) / truth.sigma;
  const double snr = compute_snr(dataset.X(), truth.w_star, truth.sigma, epsilon);
  CHECK(std::abs(snr - spec.target_snr) <= 1e-12 * spec.target_snr);
}

TEST_CASE("no smoothing gives asymptotically independent columns") {
  SimulationSpec spec;
  spec.shape = {10, 5, 5};
  spec.n_samples = 10000;
  spec.n_rois = 1;
  spec.roi_size = 2;
  spec.smoothing_width = 0.0;
  spec.seed = 3;
  const auto [dataset, truth] = generate_synthetic(spec);

  RandomStream rng(9);
  const int p = dataset.n_features();
  const double n = spec.n_samples;
  for (int pair = 0; pair < 20; ++pair) {
    const int a = rng.uniform_int(p);
    int b = rng.uniform_int(p);
    if (b == a) b = (b + 1) % p;
    const Vector xa = dataset.X().col(a).array() - dataset.X().col(a).mean();
    const Vector xb = dataset.X().col(b).array() - dataset.X().col(b).mean();
    const double r = xa.dot(xb) / (n * std::sqrt(xa.squaredNorm() / n) *
                                   std::sqrt(xb.squaredNorm() / n));
    CHECK(std::abs(r) <= 0.05);
  }
}

TEST_CASE("smoothing induces positive neighbor correlation") {
  SimulationSpec spec;
  spec.shape = {8, 8, 8};
  spec.n_samples = 400;
  spec.n_rois = 0;
  spec.smoothing_width = 1.0;
  spec.seed = 21;
  const auto [dataset, truth] = generate_synthetic(spec);

  const auto& geometry = *dataset.geometry();
  const int a = geometry.feature_at(4, 4, 4);
  const int b = geometry.feature_at(4, 4, 5);
  const Vector xa = dataset.X().col(a).array() - dataset.X().col(a).mean();
  const Vector xb = dataset.X().col(b).array() - dataset.X().col(b).mean();
  const double r = xa.dot(xb) / (xa.norm() * xb.norm());
  CHECK(r > 0.3);
}

TEST_CASE("same spec gives bit-identical output") {
  SimulationSpec spec;
  spec.shape = {6, 6, 6};
  spec.n_samples = 30;
  spec.n_rois = 2;
  spec.roi_size = 2;
  spec.seed = 77;
  const auto [d1, t1] = generate_synthetic(spec);
  const auto [d2, t2] = generate_synthetic(spec);
  CHECK(d1.X() == d2.X());
  CHECK(d1.y() == d2.y());
  CHECK(t1.w_star == t2.w_star);
  CHECK(t1.sigma == t2.sigma);

  spec.seed = 78;
  const auto [d3, t3] = generate_synthetic(spec);
  CHECK(d1.y() != d3.y());
}

TEST_CASE("generated design has no zero-variance column") {
  SimulationSpec spec;
  spec.shape = {6, 6, 6};
  spec.n_samples = 2;
  spec.n_rois = 1;
  spec.roi_size = 2;
  spec.seed = 1;
  const auto [dataset, truth] = generate_synthetic(spec);
  for (int j = 0; j < dataset.n_features(); ++j) {
    const double mean = dataset.X().col(j).mean();
    CHECK((dataset.X().col(j).array() - mean).matrix().squaredNorm() > 0.0);
  }
}

TEST_CASE("pure-noise convention: no ROIs means sigma = 1") {
  SimulationSpec spec;
  spec.shape = {5, 5, 5};
  spec.n_samples = 20;
  spec.n_rois = 0;
  spec.seed = 2;
  const auto [dataset, truth] = generate_synthetic(spec);
  CHECK(truth.support.empty());
  CHECK(truth.sigma == 1.0);
  CHECK(truth.w_star.isZero(0.0));
}

TEST_CASE("placement errors") {
  SimulationSpec spec;
  spec.shape = {5, 5, 5};
  spec.n_samples = 10;
  spec.n_rois = 1;
  spec.roi_size = 6;  // does not fit
  CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);

  spec.roi_size = 4;
  spec.n_rois = 8;  // cannot place 8 separated 4-cubes in a 5-cube
  CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);
}

TEST_CASE("compute_snr") {
  Matrix X = Matrix::Identity(2, 2);
  Vector w(2);
  w << 1, 1;
  Vector eps(2);
  eps << 1, 1;
  CHECK(compute_snr(X, w, 1.0, eps) == 1.0);
  CHECK(compute_snr(X, Vector::Zero(2), 1.0, eps) == 0.0);

  Vector w2(2);
  w2 << 2, 0;
  CHECK(compute_snr(X, w2, 1.0, eps) == 2.0);

  CHECK_THROWS_AS(compute_snr(X, w, 0.0, eps), std::invalid_argument);
  CHECK_THROWS_AS(compute_snr(X, w, 1.0, Vector::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(compute_snr(X, Vector::Zero(3), 1.0, eps), std::invalid_argument);
}

}  // TEST_SUITE
