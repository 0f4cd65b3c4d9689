#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "core/losses.hpp"
#include "core/network.hpp"
#include "core/pipeline.hpp"
#include "core/rain_model.hpp"

namespace rainsd {

struct LossConfig {
  LossWeights weights;
  int critic_base_channels = 8;
};

struct MetricsConfig {
  double iou_threshold = 0.5;
  int num_classes = 0;  // 0 = infer from the data
};

/// Toolkit-wide configuration. JSON with a strict schema: unknown keys are
/// rejected with their location. Command-line flags override file values.
struct GlobalConfig {
  std::uint64_t seed = 0;
  std::string log_level = "info";

  CountModel rain_model;
  StreakGeometry rain_geometry;

  SplitPlan plan;
  std::optional<std::filesystem::path> weights_dir;

  NetworkConfig network;  // spatial extents come from the images at hand

  LossConfig losses;
  MetricsConfig metrics;
};

/// Built-in defaults: desk-scale plan (10 sources x rates 10..100 step 10).
GlobalConfig default_config();

GlobalConfig load_config(const std::filesystem::path& path);
GlobalConfig parse_config(const std::string& text, const std::string& origin);

}  // namespace rainsd
