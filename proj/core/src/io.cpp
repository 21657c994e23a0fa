#include "ecko/io.hpp"

#include <json.hpp>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

namespace ecko {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little,
              "raw array format is little-endian; big-endian hosts need byte swaps");

void write_raw(const fs::path& file, const void* data, std::size_t bytes) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + file.string());
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) throw DataError("short write: " + file.string());
}

std::vector<char> read_raw(const fs::path& file, std::size_t expected_bytes) {
  std::ifstream in(file, std::ios::binary | std::ios::ate);
  if (!in) throw DataError("cannot open: " + file.string());
  const auto size = static_cast<std::size_t>(in.tellg());
  if (size != expected_bytes) {
    throw DataError(file.string() + ": expected " + std::to_string(expected_bytes) +
                    " bytes, found " + std::to_string(size));
  }
  std::vector<char> buffer(size);
  in.seekg(0);
  in.read(buffer.data(), static_cast<std::streamsize>(size));
  if (!in) throw DataError("short read: " + file.string());
  return buffer;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_dataset(const fs::path& dir, const Dataset& dataset,
                   const std::optional<GroundTruth>& truth) {
  if (!dataset.geometry()) throw DataError("write_dataset: dataset has no geometry");
  fs::create_directories(dir);
  const GridGeometry& geometry = *dataset.geometry();

  // X is stored row-major; Eigen is column-major by default, so transpose
  // into a row-major buffer first.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> X_rm = dataset.X();
  write_raw(dir / "X.f64", X_rm.data(), sizeof(double) * static_cast<std::size_t>(X_rm.size()));
  write_raw(dir / "y.f64", dataset.y().data(),
            sizeof(double) * static_cast<std::size_t>(dataset.y().size()));
  write_raw(dir / "mask.u8", geometry.mask().data(), geometry.mask().size());

  json manifest;
  manifest["format"] = kManifestFormat;
  manifest["version"] = kManifestVersion;
  manifest["n_samples"] = dataset.n_samples();
  manifest["n_features"] = dataset.n_features();
  manifest["shape"] = geometry.shape();
  manifest["dtype"] = "float64";
  manifest["byte_order"] = "little";
  manifest["arrays"] = {{"X", "X.f64"}, {"y", "y.f64"}, {"mask", "mask.u8"}};
  if (truth) {
    write_raw(dir / "w_star.f64", truth->w_star.data(),
              sizeof(double) * static_cast<std::size_t>(truth->w_star.size()));
    manifest["ground_truth"] = {{"w_star", "w_star.f64"},
                                {"sigma", truth->sigma},
                                {"support_size", truth->support.size()}};
  }

  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + (dir / "manifest.json").string());
  out << manifest.dump(2) << "\n";
}

std::pair<Dataset, std::optional<GroundTruth>> read_dataset(const fs::path& path) {
  const fs::path manifest_path = fs::is_directory(path) ? path / "manifest.json" : path;
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot open manifest: " + manifest_path.string());

  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw DataError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }

  try {
    if (manifest.at("format").get<std::string>() != kManifestFormat) {
      throw DataError("unrecognized manifest format");
    }
    if (manifest.at("version").get<int>() != kManifestVersion) {
      throw DataError("unsupported manifest version " +
                      std::to_string(manifest.at("version").get<int>()));
    }
    if (manifest.at("dtype").get<std::string>() != "float64") {
      throw DataError("unsupported dtype " + manifest.at("dtype").get<std::string>());
    }
    if (manifest.at("byte_order").get<std::string>() != "little") {
      throw DataError("unsupported byte order " + manifest.at("byte_order").get<std::string>());
    }

    const int n = manifest.at("n_samples").get<int>();
    const int p = manifest.at("n_features").get<int>();
    const auto shape = manifest.at("shape").get<std::array<int, 3>>();
    const fs::path dir = manifest_path.parent_path();
    const auto& arrays = manifest.at("arrays");

    const std::size_t volume =
        static_cast<std::size_t>(shape[0]) * shape[1] * shape[2];
    const std::vector<char> mask_bytes =
        read_raw(dir / arrays.at("mask").get<std::string>(), volume);
    GridGeometry geometry(shape,
                          std::vector<std::uint8_t>(mask_bytes.begin(), mask_bytes.end()));
    if (geometry.n_features() != p) {
      throw DataError("mask active-voxel count disagrees with n_features");
    }

    const std::vector<char> x_bytes =
        read_raw(dir / arrays.at("X").get<std::string>(),
                 sizeof(double) * static_cast<std::size_t>(n) * static_cast<std::size_t>(p));
    const std::vector<char> y_bytes =
        read_raw(dir / arrays.at("y").get<std::string>(), sizeof(double) * static_cast<std::size_t>(n));

    Matrix X(n, p);
    const auto* x_data = reinterpret_cast<const double*>(x_bytes.data());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) X(i, j) = x_data[static_cast<std::size_t>(i) * p + j];
    }
    Vector y(n);
    std::memcpy(y.data(), y_bytes.data(), y_bytes.size());

    std::optional<GroundTruth> truth;
    if (manifest.contains("ground_truth")) {
      const auto& gt = manifest.at("ground_truth");
      const std::vector<char> w_bytes =
          read_raw(dir / gt.at("w_star").get<std::string>(),
                   sizeof(double) * static_cast<std::size_t>(p));
      Vector w_star(p);
      std::memcpy(w_star.data(), w_bytes.data(), w_bytes.size());
      truth = GroundTruth::from_weights(std::move(w_star), gt.at("sigma").get<double>());
      if (gt.contains("support_size") &&
          gt.at("support_size").get<std::size_t>() != truth->support.size()) {
        throw DataError("ground-truth support size disagrees with w_star");
      }
    }

    return {Dataset(std::move(X), std::move(y), std::move(geometry)), std::move(truth)};
  } catch (const json::exception& e) {
    throw DataError("invalid manifest " + manifest_path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError("inconsistent dataset " + manifest_path.string() + ": " + e.what());
  }
}

void write_selection_table(const fs::path& file, const SelectionResult& selection,
                           const GridGeometry& geometry) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + file.string());
  out << "index\tx\ty\tz\tq_tilde\tsign\n";
  for (int k : selection.selected) {
    const auto& c = geometry.feature_coords()[static_cast<std::size_t>(k)];
    out << k << '\t' << c[0] << '\t' << c[1] << '\t' << c[2] << '\t'
        << format_double(selection.q_tilde[k]) << '\t' << selection.signs[k] << '\n';
  }
}

void write_run_summary(const fs::path& file, const EckoParams& params, const std::string& method,
                       double delta, int n_selected) {
  json summary;
  summary["method"] = method;
  summary["fdr"] = params.fdr;
  summary["gamma"] = params.gamma;
  summary["n_clusters"] = params.n_clusters;
  summary["n_draws"] = params.n_draws;
  summary["n_clusterings"] = params.n_clusterings;
  summary["subsample_fraction"] = params.subsample_fraction;
  summary["seed"] = params.master_seed;
  summary["delta"] = delta;
  summary["n_selected"] = n_selected;

  std::ofstream out(file, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + file.string());
  out << summary.dump(2) << "\n";
}

void write_benchmark_report(const fs::path& rows_file, const fs::path& aggregates_file,
                            const BenchmarkReport& report) {
  {
    std::ofstream out(rows_file, std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + rows_file.string());
    out << "method,snr,seed,ok,fdp,delta_fdp,precision,recall,auc_pr,delta,"
           "n_selected,runtime_sec,error\n";
    for (const auto& r : report.records) {
      out << r.method << ',' << format_double(r.snr) << ',' << r.seed << ',' << (r.ok ? 1 : 0)
          << ',' << format_double(r.fdp) << ',' << format_double(r.delta_fdp) << ','
          << format_double(r.precision) << ',' << format_double(r.recall) << ','
          << format_double(r.auc_pr) << ',' << format_double(r.delta) << ',' << r.n_selected
          << ',' << format_double(r.runtime_sec) << ',' << r.error << '\n';
    }
  }
  {
    std::ofstream out(aggregates_file, std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + aggregates_file.string());
    out << "method,snr,n_records,mean_fdp,se_fdp,mean_delta_fdp,se_delta_fdp,"
           "mean_precision,se_precision,mean_recall,se_recall,mean_auc_pr,se_auc_pr,"
           "mean_runtime_sec\n";
    for (const auto& a : report.aggregates) {
      out << a.method << ',' << format_double(a.snr) << ',' << a.n_records << ','
          << format_double(a.mean_fdp) << ',' << format_double(a.se_fdp) << ','
          << format_double(a.mean_delta_fdp) << ',' << format_double(a.se_delta_fdp) << ','
          << format_double(a.mean_precision) << ',' << format_double(a.se_precision) << ','
          << format_double(a.mean_recall) << ',' << format_double(a.se_recall) << ','
          << format_double(a.mean_auc_pr) << ',' << format_double(a.se_auc_pr) << ','
          << format_double(a.mean_runtime_sec) << '\n';
    }
  }
}

}  // namespace ecko
