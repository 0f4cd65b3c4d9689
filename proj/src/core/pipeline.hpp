#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "core/network.hpp"
#include "core/rain_model.hpp"

namespace rainsd {

enum class Weather { clear, rainy, other };
enum class TimeOfDay { daytime, night, other };

struct FrameAttributes {
  std::string name;  // source path relative to the images root
  Weather weather = Weather::other;
  TimeOfDay timeofday = TimeOfDay::other;
};

/// Dataset construction plan. Paper-scale values are config values, not code
/// constants; the shipped desk defaults stay small.
struct SplitPlan {
  std::uint64_t n_rainy_sources = 0;
  std::vector<double> rates;  // mm/h sweep applied to every rainy source
  std::uint64_t n_clear_train = 0;
  std::uint64_t n_test_clear = 0;
  std::uint64_t master_seed = 0;
};

enum class Split { train_a, train_b, test_a, eval_clear, eval_rainy };

std::string split_name(Split s);
Split parse_split(const std::string& name);

struct ManifestEntry {
  std::string output_path;  // relative to the output root, unique
  std::string source_path;  // relative to the images root
  Split split = Split::train_a;
  std::optional<double> rate;         // synthesis entries only
  std::optional<std::uint64_t> seed;  // synthesis entries only
  bool operator==(const ManifestEntry&) const = default;
};

/// The single source of truth for a dataset build; written as line-delimited
/// JSON so partial runs are resumable.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  std::size_t count(Split s) const;
};

/// Parses a BDD100K-style annotation file: a JSON array of records with a
/// "name" and an "attributes" object carrying weather/timeofday. Unknown
/// enum values map to `other`; input order is preserved.
std::vector<FrameAttributes> ingest_attributes(const std::filesystem::path& file);

/// Builds the split manifest deterministically: per-class seeded shuffle then
/// prefix take. Rainy sources expand to one trainB entry per rate; clear
/// sources split disjointly into trainA and testA; each testA source also
/// yields an eval_clear copy and an eval_rainy synthesis entry (rates cycle).
/// Per-entry seeds derive as mix_seed(master_seed, fnv1a64(output_path)).
DatasetManifest plan_splits(const std::vector<FrameAttributes>& attrs,
                            const SplitPlan& plan);

struct MaterializeConfig {
  std::filesystem::path images_root;
  std::filesystem::path output_root;
  CountModel count_model;
  StreakGeometry geometry;
  /// When both are set, synthesis entries additionally run the two-stream
  /// translate step with the source as content and the streaked image as style.
  std::optional<NetworkConfig> network;
  std::optional<std::filesystem::path> weights_dir;
  std::uint64_t noise_seed = 0;
  int threads = 1;  // worker cap; 0 = hardware concurrency
};

struct EntryFailure {
  std::string output_path;
  std::string message;
};

struct ExecutionReport {
  std::uint64_t processed = 0;
  std::uint64_t skipped = 0;
  std::uint64_t failed = 0;
  std::vector<EntryFailure> failures;
};

/// Renders/copies every manifest entry under the output root and writes
/// manifest.jsonl alongside. Idempotent: entries whose outputs exist and
/// whose recorded manifest line matches are skipped. Per-entry failures are
/// collected, not fatal.
ExecutionReport materialize(const DatasetManifest& manifest, const MaterializeConfig& cfg);

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace rainsd
