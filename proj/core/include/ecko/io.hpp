/// @file io.hpp
/// @brief Dataset manifest + raw-array file format, selection tables, run
///        summaries and benchmark reports.
///
/// A dataset on disk is a JSON manifest next to raw little-endian arrays:
///   manifest.json   {format, version, n_samples, n_features, shape, dtype,
///                    byte_order, arrays{X,y,mask}, optional ground_truth}
///   X.f64           row-major n x p float64
///   y.f64           n float64
///   mask.u8         one byte per voxel (0/1), lexicographic (x,y,z) order
///   w_star.f64      p float64 (only with a ground-truth block)
/// Declared dimensions must match raw-file byte lengths exactly.

#pragma once

#include "ecko/core.hpp"
#include "ecko/metrics.hpp"
#include "ecko/pipeline.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace ecko {

/// Raised for unreadable, corrupt or inconsistent data files (CLI exit 2).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kManifestFormat = "ecko-dataset";
inline constexpr int kManifestVersion = 1;

/// Writes the manifest and raw arrays into `dir` (created if missing).
/// Byte-identical for identical inputs.
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset,
                   const std::optional<GroundTruth>& truth = std::nullopt);

/// Loads a dataset (and the ground-truth block, when present) from a
/// manifest path or a directory containing manifest.json.
/// @throws DataError on missing files, version/format mismatch, or byte
///         lengths that disagree with the declared dimensions
std::pair<Dataset, std::optional<GroundTruth>> read_dataset(const std::filesystem::path& path);

/// Selection table: one row per selected voxel, columns
/// index, x, y, z, q_tilde, sign; tab-separated, ascending index.
void write_selection_table(const std::filesystem::path& file, const SelectionResult& selection,
                           const GridGeometry& geometry);

/// Deterministic run summary (parameters, delta, selection size) as JSON.
void write_run_summary(const std::filesystem::path& file, const EckoParams& params,
                       const std::string& method, double delta, int n_selected);

/// Benchmark rows as CSV (one line per record; runtime_sec is measured and
/// varies between runs) plus the aggregate table.
void write_benchmark_report(const std::filesystem::path& rows_file,
                            const std::filesystem::path& aggregates_file,
                            const BenchmarkReport& report);

}  // namespace ecko
