#include <doctest.h>

#include "ecko/io.hpp"
#include "ecko/simdata.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ecko;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ecko_test_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::pair<Dataset, GroundTruth> sample_data() {
  SimulationSpec spec;
  spec.shape = {5, 4, 3};
  spec.n_samples = 12;
  spec.n_rois = 1;
  spec.roi_size = 2;
  spec.seed = 8;
  return generate_synthetic(spec);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("dataset round-trip is bit-exact") {
  TempDir tmp;
  const auto [dataset, truth] = sample_data();
  write_dataset(tmp.path, dataset, truth);

  const auto [loaded, loaded_truth] = read_dataset(tmp.path / "manifest.json");
  CHECK(loaded.X() == dataset.X());
  CHECK(loaded.y() == dataset.y());
  REQUIRE(loaded.geometry().has_value());
  CHECK(*loaded.geometry() == *dataset.geometry());
  CHECK(loaded.geometry()->feature_coords() == dataset.geometry()->feature_coords());

  REQUIRE(loaded_truth.has_value());
  CHECK(loaded_truth->w_star == truth.w_star);
  CHECK(loaded_truth->sigma == truth.sigma);
  CHECK(loaded_truth->support == truth.support);

  // A directory path works too.
  const auto [again, again_truth] = read_dataset(tmp.path);
  CHECK(again.X() == dataset.X());
}

TEST_CASE("write is deterministic") {
  TempDir a, b;
  const auto [dataset, truth] = sample_data();
  write_dataset(a.path, dataset, truth);
  write_dataset(b.path, dataset, truth);
  for (const char* name : {"manifest.json", "X.f64", "y.f64", "mask.u8", "w_star.f64"}) {
    CHECK(slurp(a.path / name) == slurp(b.path / name));
  }
}

TEST_CASE("corrupt inputs raise DataError") {
  TempDir tmp;
  const auto [dataset, truth] = sample_data();
  write_dataset(tmp.path, dataset, std::nullopt);

  SUBCASE("missing manifest") {
    CHECK_THROWS_AS(read_dataset(tmp.path / "nope.json"), DataError);
  }

  SUBCASE("truncated array") {
    fs::resize_file(tmp.path / "X.f64", 16);
    CHECK_THROWS_AS(read_dataset(tmp.path), DataError);
  }

  SUBCASE("unknown version") {
    auto text = slurp(tmp.path / "manifest.json");
    const auto pos = text.find("\"version\": 1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 12, "\"version\": 9");
    std::ofstream(tmp.path / "manifest.json", std::ios::trunc) << text;
    CHECK_THROWS_AS(read_dataset(tmp.path), DataError);
  }

  SUBCASE("malformed json") {
    std::ofstream(tmp.path / "manifest.json", std::ios::trunc) << "{not json";
    CHECK_THROWS_AS(read_dataset(tmp.path), DataError);
  }
}

TEST_CASE("selection table format") {
  TempDir tmp;
  const auto geometry = GridGeometry::full({3, 2, 1});
  SelectionResult selection;
  selection.alpha = 0.1;
  selection.q_tilde = Vector::Ones(geometry.n_features());
  selection.q_tilde[1] = 0.05;
  selection.q_tilde[4] = 0.0625;
  selection.selected = {1, 4};
  selection.signs = Eigen::VectorXi::Zero(geometry.n_features());
  selection.signs[1] = -1;
  selection.signs[4] = 1;

  write_selection_table(tmp.path / "selection.tsv", selection, geometry);
  const std::string text = slurp(tmp.path / "selection.tsv");
  CHECK(text ==
        "index\tx\ty\tz\tq_tilde\tsign\n"
        "1\t0\t1\t0\t0.050000000000000003\t-1\n"
        "4\t2\t0\t0\t0.0625\t1\n");
}

TEST_CASE("run summary and benchmark report writers") {
  TempDir tmp;
  EckoParams params;
  write_run_summary(tmp.path / "summary.json", params, "ecko", 6.5, 42);
  const std::string summary = slurp(tmp.path / "summary.json");
  CHECK(summary.find("\"method\": \"ecko\"") != std::string::npos);
  CHECK(summary.find("\"delta\": 6.5") != std::string::npos);
  CHECK(summary.find("\"n_selected\": 42") != std::string::npos);

  BenchmarkReport report;
  BenchmarkRecord record;
  record.method = "ecko";
  record.snr = 8.0;
  record.seed = 0;
  record.ok = true;
  record.fdp = 0.25;
  record.delta_fdp = 0.0;
  record.precision = 0.75;
  record.recall = 0.5;
  record.auc_pr = 0.6;
  record.delta = 3.0;
  record.n_selected = 4;
  record.runtime_sec = 0.1;
  report.records = {record};
  report.aggregates = aggregate_records(report.records);

  write_benchmark_report(tmp.path / "report.csv", tmp.path / "aggregates.csv", report);
  const std::string rows = slurp(tmp.path / "report.csv");
  CHECK(rows.find("method,snr,seed,ok,") == 0);
  CHECK(rows.find("ecko,8,0,1,0.25,") != std::string::npos);
  const std::string aggregates = slurp(tmp.path / "aggregates.csv");
  CHECK(aggregates.find("ecko,8,1,0.25,0,") != std::string::npos);
}

}  // TEST_SUITE
