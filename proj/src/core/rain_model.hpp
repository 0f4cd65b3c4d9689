#pragma once

#include <cstdint>

#include "core/image.hpp"

namespace rainsd {

/// Precipitation intensity in mm/h. Pipeline presets are 10, 20, ..., 100.
struct RainfallRate {
  double mm_per_hour = 0.0;
};

/// Maps rainfall rate to streak count: n = round(k * rate^gamma * s) where
/// s is the pixel-area ratio of the target image to the reference frame.
struct CountModel {
  double k = 6.0;
  double gamma = 1.0;
  int reference_width = 800;
  int reference_height = 600;
};

/// Visual parameters of one streak family at reference resolution.
/// Lengths scale by sqrt(area ratio) when rendered at other resolutions.
struct StreakGeometry {
  int length_min = 15;
  int length_max = 35;
  int thickness = 1;
  double angle_degrees = 90.0;  // 90 = vertical
  Rgba color{200, 200, 200, 0.6};
  int interval = 10;  // anchor-grid spacing in pixels
};

/// Everything needed to regenerate one rain layer bit-for-bit.
struct RainLayerSpec {
  RainfallRate rate;
  StreakGeometry geometry;
  int target_width = 0;
  int target_height = 0;
  std::uint64_t seed = 0;
  CountModel count_model;
  std::int64_t streak_count = 0;  // derived, see resolve_spec
};

/// Pixel-area ratio (width*height) / (reference area).
double area_scale(const CountModel& model, int width, int height);

/// Throws Error::invalid on out-of-range geometry fields.
void validate_geometry(const StreakGeometry& geometry);

/// n = round_half_up(k * rate^gamma * s). Deterministic; rate 0 yields 0.
std::int64_t streak_count(const CountModel& model, RainfallRate rate, int width,
                          int height);

/// Validates the geometry and embeds the derived streak count. Pure.
RainLayerSpec resolve_spec(RainfallRate rate, const StreakGeometry& geometry,
                           int width, int height, std::uint64_t seed,
                           const CountModel& model);

}  // namespace rainsd
