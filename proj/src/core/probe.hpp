#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace rainsd {

/// Per-layer style summary. Larger layer ids sit closer to the input image
/// level. The scalars are channel means of the per-channel statistics.
struct LayerStyleReport {
  int layer_id = 0;
  ChannelStats stats;
  double scalar_mean = 0.0;
  double scalar_std = 0.0;
};

struct LayerComparison {
  int layer_id = 0;
  double relative_mean_change_pct = 0.0;  // 100 * (a - b) / |b|
  double relative_std_change_pct = 0.0;
  bool mean_defined = true;  // false when the baseline scalar is zero
  bool std_defined = true;
};

struct ComparisonReport {
  std::vector<LayerComparison> layers;
};

/// Style reports for a feature stack; ids default to 0..n-1.
std::vector<LayerStyleReport> probe(const std::vector<Tensor>& features);
std::vector<LayerStyleReport> probe(const std::vector<std::pair<int, Tensor>>& features);

/// Relative change of each layer's scalar summaries against a baseline.
/// Layer ids and counts must match pairwise.
ComparisonReport compare(const std::vector<LayerStyleReport>& a,
                         const std::vector<LayerStyleReport>& b);

/// Loads f<k>.rsdt files from a directory, ordered by ascending k.
std::vector<std::pair<int, Tensor>> load_feature_dir(const std::filesystem::path& dir);

std::string render_probe_table(const std::vector<LayerStyleReport>& reports);
std::string render_comparison_table(const std::vector<LayerStyleReport>& probed,
                                    const std::vector<LayerStyleReport>& baseline,
                                    const ComparisonReport& cmp);

/// Plot-ready CSV with one row per layer.
void write_probe_csv(const std::vector<LayerStyleReport>& probed,
                     const ComparisonReport* cmp, const std::filesystem::path& path);

}  // namespace rainsd
