#pragma once

#include <filesystem>
#include <vector>

#include "core/image.hpp"
#include "core/rain_model.hpp"

namespace rainsd {

struct StreakSegment {
  int x_anchor = 0;  // in [0, width) after jitter wrap
  int y_start = 0;
  int length = 1;
  double angle_degrees = 90.0;
  int thickness = 1;
  bool operator==(const StreakSegment&) const = default;
};

struct RainLayer {
  std::vector<StreakSegment> segments;
  RainLayerSpec spec;
};

/// Places spec.streak_count segments deterministically.
///
/// Anchors walk the grid {0, interval, 2*interval, ...} < width, cycling when
/// the count exceeds the grid; each anchor is offset by a uniform integer
/// jitter in [0, interval) and wrapped modulo width. Per segment the PRNG
/// (xoshiro256** seeded with spec.seed) is consumed in the order
/// jitter, length, y_start. Lengths are uniform in the geometry range scaled
/// by sqrt(area ratio); y_start is uniform in [0, max(0, height - length)].
RainLayer generate_layer(const RainLayerSpec& spec);

/// Alpha-blends every segment onto a copy of `content`, in segment order.
/// Out-of-bounds pixels are clipped; the input buffer is untouched.
ImageBuffer composite(const ImageBuffer& content, const RainLayer& layer,
                      const Rgba& paint);

/// Same, painting with the layer's own geometry color.
ImageBuffer composite(const ImageBuffer& content, const RainLayer& layer);

/// Pixels covered by one segment, clipped to width x height, deduplicated and
/// sorted row-major. Rasterization steps unit distances along
/// (cos a, sin a) with thickness offsets along (sin a, -cos a); coordinates
/// round half-up, no anti-aliasing.
std::vector<std::pair<int, int>> segment_pixels(const StreakSegment& seg, int width,
                                                int height);

/// Length range of the layer at target resolution: the geometry range scaled
/// by sqrt(area ratio), each endpoint rounded half-up and clamped to >= 1.
std::pair<int, int> scaled_length_range(const RainLayerSpec& spec);

/// One segment per line: "x y length angle thickness".
void write_layer_text(const RainLayer& layer, const std::filesystem::path& path);

}  // namespace rainsd
