#include <doctest.h>

#include "ecko/core.hpp"
#include "ecko/metrics.hpp"

#include <algorithm>
#include <cmath>

using namespace ecko;

namespace {

// Brute-force PR sweep: recompute selection from scratch at each threshold.
std::vector<PrPoint> pr_curve_bruteforce(const Vector& q_tilde, const IndexSet& support) {
  std::vector<double> thresholds(q_tilde.data(), q_tilde.data() + q_tilde.size());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  std::vector<PrPoint> curve;
  for (double t : thresholds) {
    IndexSet selected;
    for (int k = 0; k < q_tilde.size(); ++k) {
      if (q_tilde[k] <= t) selected.push_back(k);
    }
    const auto [prec, rec] = precision_recall(selected, support);
    curve.push_back({t, prec, rec});
  }
  return curve;
}

IndexSet random_subset(int p, double density, RandomStream& rng) {
  IndexSet out;
  for (int k = 0; k < p; ++k) {
    if (rng.uniform() < density) out.push_back(k);
  }
  return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("fdp") {
  CHECK(fdp({1, 2}, {1}) == 0.5);
  CHECK(fdp({}, {1}) == 0.0);
  CHECK(fdp({1, 3}, {1, 2, 3}) == 0.0);
  CHECK(fdp({0, 5, 9}, {}) == 1.0);
}

TEST_CASE("delta_fdp") {
  const auto geometry = GridGeometry::full({6, 1, 1});
  const int origin = geometry.feature_at(0, 0, 0);
  const int far = geometry.feature_at(5, 0, 0);

  SUBCASE("distance-2 relaxation") {
    CHECK(delta_fdp({origin, far}, {origin}, 2.0, geometry) == 0.5);
  }
  SUBCASE("huge delta counts nothing false") {
    CHECK(delta_fdp({origin, far}, {origin}, 10.0, geometry) == 0.0);
  }
  SUBCASE("empty selection") {
    CHECK(delta_fdp({}, {origin}, 2.0, geometry) == 0.0);
  }
  SUBCASE("negative delta rejected") {
    CHECK_THROWS_AS(delta_fdp({origin}, {origin}, -1.0, geometry), std::invalid_argument);
  }
}

TEST_CASE("delta_fdp at delta = 0 equals fdp") {
  const auto geometry = GridGeometry::full({5, 5, 4});
  RandomStream rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const IndexSet selected = random_subset(geometry.n_features(), 0.1, rng);
    const IndexSet support = random_subset(geometry.n_features(), 0.05, rng);
    CHECK(delta_fdp(selected, support, 0.0, geometry) == fdp(selected, support));
  }
}

TEST_CASE("delta_fdp is non-increasing in delta") {
  const auto geometry = GridGeometry::full({6, 6, 3});
  RandomStream rng(8);
  const IndexSet selected = random_subset(geometry.n_features(), 0.15, rng);
  const IndexSet support = random_subset(geometry.n_features(), 0.05, rng);
  double previous = 1.0;
  for (double delta : {0.0, 1.0, 2.0, 4.0, 8.0}) {
    const double value = delta_fdp(selected, support, delta, geometry);
    CHECK(value <= previous + 1e-15);
    previous = value;
  }
}

TEST_CASE("precision_recall") {
  CHECK(precision_recall({1, 2}, {1, 2}) == std::pair{1.0, 1.0});
  CHECK(precision_recall({}, {1, 2}) == std::pair{1.0, 0.0});
  CHECK(precision_recall({1, 2}, {1, 3}) == std::pair{0.5, 0.5});
  CHECK_THROWS_AS(precision_recall({1}, {}), std::invalid_argument);
}

TEST_CASE("fdp + precision = 1 on non-empty selections") {
  RandomStream rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    IndexSet selected = random_subset(60, 0.2, rng);
    IndexSet support = random_subset(60, 0.2, rng);
    if (selected.empty()) selected.push_back(0);
    if (support.empty()) support.push_back(1);
    const auto [prec, rec] = precision_recall(selected, support);
    CHECK(prec + fdp(selected, support) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pr_curve") {
  const auto geometry = GridGeometry::full({4, 4, 4});
  const int p = geometry.n_features();

  SUBCASE("constant q gives a single point") {
    const auto curve = pr_curve(Vector::Constant(p, 0.7), {0, 1}, geometry);
    CHECK(curve.size() == 1);
    CHECK(curve[0].recall == 1.0);
  }

  SUBCASE("indicator-perfect scores contain (1,1)") {
    Vector q = Vector::Ones(p);
    const IndexSet support{3, 17, 40};
    for (int k : support) q[k] = 0.0;
    const auto curve = pr_curve(q, support, geometry);
    bool found = false;
    for (const auto& pt : curve) {
      if (pt.precision == 1.0 && pt.recall == 1.0) found = true;
    }
    CHECK(found);
  }

  SUBCASE("matches the brute-force sweep, recall non-decreasing") {
    RandomStream rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      Vector q(p);
      for (int k = 0; k < p; ++k) q[k] = rng.uniform() < 0.2 ? 0.05 : rng.uniform();
      IndexSet support = random_subset(p, 0.1, rng);
      if (support.empty()) support.push_back(2);

      const auto fast = pr_curve(q, support, geometry);
      const auto slow = pr_curve_bruteforce(q, support);
      REQUIRE(fast.size() == slow.size());
      for (std::size_t i = 0; i < fast.size(); ++i) {
        CHECK(fast[i].threshold == slow[i].threshold);
        CHECK(fast[i].precision == doctest::Approx(slow[i].precision).epsilon(1e-12));
        CHECK(fast[i].recall == doctest::Approx(slow[i].recall).epsilon(1e-12));
        if (i > 0) CHECK(fast[i].recall >= fast[i - 1].recall);
      }
    }
  }

  SUBCASE("empty support throws") {
    CHECK_THROWS_AS(pr_curve(Vector::Ones(p), {}, geometry), std::invalid_argument);
  }
}

TEST_CASE("pr_auc") {
  CHECK(pr_auc({}) == 0.0);
  // Perfect indicator curve: (r=1, p=1) single point -> full area.
  CHECK(pr_auc({{0.0, 1.0, 1.0}}) == 1.0);
  // Two-point curve with a precision drop.
  const double auc = pr_auc({{0.0, 1.0, 0.5}, {1.0, 0.6, 1.0}});
  CHECK(auc == doctest::Approx(0.5 + 0.5 * 0.8));
}

TEST_CASE("snr_sweep: minimal grid") {
  SimulationSpec spec;
  spec.shape = {6, 6, 6};
  spec.n_samples = 50;
  spec.n_rois = 1;
  spec.roi_size = 2;
  spec.seed = 3;

  EckoParams params;
  params.n_clusters = 12;
  params.n_draws = 2;
  params.n_clusterings = 2;
  params.master_seed = 5;

  const BenchmarkReport report = snr_sweep({"ecko"}, {8.0}, 1, spec, params);
  REQUIRE(report.records.size() == 1);
  const auto& record = report.records[0];
  CHECK(record.ok);
  CHECK(record.method == "ecko");
  CHECK(record.snr == 8.0);
  CHECK(record.fdp >= 0.0);
  CHECK(record.fdp <= 1.0);
  CHECK(record.delta_fdp <= record.fdp);
  CHECK(record.delta > 0.0);

  REQUIRE(report.aggregates.size() == 1);
  CHECK(report.aggregates[0].n_records == 1);
  CHECK(report.aggregates[0].mean_fdp == record.fdp);
}

TEST_CASE("snr_sweep: aggregates recompute from records") {
  SimulationSpec spec;
  spec.shape = {6, 6, 6};
  spec.n_samples = 40;
  spec.n_rois = 1;
  spec.roi_size = 2;
  spec.seed = 9;

  EckoParams params;
  params.n_clusters = 10;
  params.n_draws = 2;
  params.n_clusterings = 2;
  params.master_seed = 1;

  const BenchmarkReport report = snr_sweep({"ecko", "cko"}, {2.0, 8.0}, 2, spec, params);
  CHECK(report.records.size() == 8);
  const auto recomputed = aggregate_records(report.records);
  REQUIRE(recomputed.size() == report.aggregates.size());
  for (std::size_t i = 0; i < recomputed.size(); ++i) {
    CHECK(recomputed[i].method == report.aggregates[i].method);
    CHECK(recomputed[i].snr == report.aggregates[i].snr);
    CHECK(recomputed[i].mean_delta_fdp == report.aggregates[i].mean_delta_fdp);
    CHECK(recomputed[i].se_delta_fdp == report.aggregates[i].se_delta_fdp);
    CHECK(recomputed[i].mean_recall == report.aggregates[i].mean_recall);
  }
}

TEST_CASE("snr_sweep: argument errors") {
  SimulationSpec spec;
  EckoParams params;
  CHECK_THROWS_AS(snr_sweep({}, {1.0}, 1, spec, params), std::invalid_argument);
  CHECK_THROWS_AS(snr_sweep({"ecko"}, {}, 1, spec, params), std::invalid_argument);
  CHECK_THROWS_AS(snr_sweep({"banana"}, {1.0}, 1, spec, params), std::invalid_argument);
}

}  // TEST_SUITE
