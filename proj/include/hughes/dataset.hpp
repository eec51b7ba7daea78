#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hughes/binary_format.hpp"
#include "hughes/core.hpp"
#include "hughes/datagen.hpp"
#include "json.hpp"

// Dataset directories:
//
//   DIR/manifest.json
//   DIR/samples/NNNNNN_X.bin      input grid   (payload kind 2)
//   DIR/samples/NNNNNN_Y.bin      target grid  (payload kind 3)
//   DIR/samples/NNNNNN_full.bin   optional full-resolution trajectory (kind 1)
//
// Prediction directories hold DIR/samples/NNNNNN_pred.bin (kind 4) and
// optionally a manifest of kind "predictions" listing them.

namespace hughes::dataset {

using json = nlohmann::ordered_json;

inline constexpr int kManifestVersion = 1;

json to_json(const ICDescriptor& ic);
ICDescriptor ic_from_json(const json& j);
json to_json(const BoundarySchedule& bc);
BoundarySchedule bc_from_json(const json& j);

struct FileEntry {
  std::string path;  // relative to the dataset directory
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint64_t checksum = 0;
};

struct SampleEntry {
  std::size_t id = 0;
  std::uint64_t seed = 0;
  std::uint64_t solver_seed = 0;
  std::string split;
  datagen::Classification classification = datagen::Classification::rejected;
  std::size_t n_discontinuities = 0;
  double delta_xi = 0.0;
  double e_cost = 0.0;
  std::uint32_t attempts = 0;
  bool cost_clamped = false;
  ICDescriptor ic;
  BoundarySchedule bc;
  std::optional<FileEntry> x;
  std::optional<FileEntry> y;
  std::optional<FileEntry> full;
  std::optional<FileEntry> pred;
  std::string turning_draws;  // one digit per Godunov step, empty for wft
};

struct SplitRatios {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

struct Manifest {
  std::string kind = "dataset";  // or "predictions"
  int format_version = kManifestVersion;
  datagen::GenerationConfig config;
  SplitRatios splits;
  std::optional<json> ic_source;
  std::vector<SampleEntry> samples;
};

json to_json(const Manifest& m);
Manifest manifest_from_json(const json& j);
Manifest read_manifest(const std::filesystem::path& dir);
void write_manifest(const std::filesystem::path& dir, const Manifest& m);

/// "train", "val" or "test"; sequential by id.
std::string split_of(std::size_t id, std::size_t n_samples, const SplitRatios& ratios);

std::string sample_file_name(std::size_t id, const std::string& suffix);

/// Worker count: hardware concurrency capped by HUGHES_KIT_THREADS.
unsigned worker_threads();

struct GenerateOptions {
  bool keep_full = false;
  std::optional<std::filesystem::path> ic_from;
  unsigned threads = 0;  // 0 = worker_threads()
};

struct GenerateSummary {
  Manifest manifest;
  double mean_attempts = 0.0;
  double mean_solve_ms = 0.0;
};

GenerateSummary generate(const datagen::GenerationConfig& config, const std::filesystem::path& out,
                         const GenerateOptions& options = {});

/// Recomputes checksums and shapes of every referenced file. Returns the
/// problems found (empty when the dataset is intact).
std::vector<std::string> verify(const std::filesystem::path& dir);

struct ScoreOptions {
  std::optional<std::string> split;  // restrict truth samples to one split
};

/// Scores predictions against a dataset. The prediction directory is either
/// another dataset (its Y files are used) or a prediction directory.
/// Writes metrics.csv, tv.csv and metrics.json into out_dir.
json score_directories(const std::filesystem::path& pred_dir,
                       const std::filesystem::path& truth_dir,
                       const std::filesystem::path& out_dir, const ScoreOptions& options = {});

struct CompareOptions {
  std::size_t common_t = 50;
  std::size_t common_x = 200;
  std::size_t timing_solves = 50;  // 0 skips the timing pass
};

/// Per-sample relative L2 of dataset a against dataset b on a common
/// physical grid, plus mean solve time per scheme. Writes compare.csv and
/// compare.json into out_dir.
json compare_directories(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b,
                         const std::filesystem::path& out_dir, const CompareOptions& options = {});

/// Resamples a target grid of the given dataset onto a common physical grid
/// (row times linear in [0, t_last], cell centres on [-1, 1]).
Field resample_common(const Field& Y, const Manifest& m, std::size_t rows, std::size_t cols,
                      double t_last);

/// Time of target row r.
double target_row_time(const Manifest& m, std::size_t r);

/// Writes X_<split>.npy / Y_<split>.npy stacks ([N, T, X] float64) and
/// index.json. split "all" exports every split.
json export_numpy(const std::filesystem::path& dir, const std::filesystem::path& out,
                  const std::string& split = "all");

/// Minimal NPY v1.0 writer for C-ordered float64 arrays.
void write_npy(const std::filesystem::path& path, const std::vector<std::size_t>& shape,
               const std::vector<double>& data);

}  // namespace hughes::dataset
