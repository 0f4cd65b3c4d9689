#include "core/streaks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "core/error.hpp"
#include "core/numeric.hpp"
#include "core/rng.hpp"

namespace rainsd {

namespace {

int wrap_mod(std::int64_t v, int m) {
  const std::int64_t r = v % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

}  // namespace

std::pair<int, int> scaled_length_range(const RainLayerSpec& spec) {
  const double root_s = std::sqrt(
      area_scale(spec.count_model, spec.target_width, spec.target_height));
  const int lo = static_cast<int>(
      std::max<std::int64_t>(1, round_half_up(spec.geometry.length_min * root_s)));
  const int hi = static_cast<int>(std::max<std::int64_t>(
      lo, round_half_up(spec.geometry.length_max * root_s)));
  return {lo, hi};
}

RainLayer generate_layer(const RainLayerSpec& spec) {
  if (spec.target_width < 1 || spec.target_height < 1) {
    throw Error::invalid("layer spec has empty target dimensions");
  }
  validate_geometry(spec.geometry);  // specs can be built by hand
  RainLayer layer;
  layer.spec = spec;
  if (spec.streak_count <= 0) return layer;

  const int interval = spec.geometry.interval;
  const int grid_size = (spec.target_width + interval - 1) / interval;
  const auto [len_lo, len_hi] = scaled_length_range(spec);

  Xoshiro256ss rng(spec.seed);
  layer.segments.reserve(static_cast<std::size_t>(spec.streak_count));
  for (std::int64_t i = 0; i < spec.streak_count; ++i) {
    const std::int64_t anchor_grid =
        static_cast<std::int64_t>(i % grid_size) * interval;
    const auto jitter = static_cast<std::int64_t>(rng.next_below(
        static_cast<std::uint64_t>(interval)));
    StreakSegment seg;
    seg.x_anchor = wrap_mod(anchor_grid - jitter, spec.target_width);
    seg.length = static_cast<int>(rng.next_int(len_lo, len_hi));
    const int y_max = std::max(0, spec.target_height - seg.length);
    seg.y_start = static_cast<int>(rng.next_int(0, y_max));
    seg.angle_degrees = spec.geometry.angle_degrees;
    seg.thickness = spec.geometry.thickness;
    layer.segments.push_back(seg);
  }
  return layer;
}

std::vector<std::pair<int, int>> segment_pixels(const StreakSegment& seg, int width,
                                                int height) {
  const double rad = seg.angle_degrees * std::numbers::pi / 180.0;
  const double dx = std::cos(rad), dy = std::sin(rad);
  const double px = std::sin(rad), py = -std::cos(rad);  // thickness direction

  std::vector<std::pair<int, int>> pixels;
  pixels.reserve(static_cast<std::size_t>(seg.length) * seg.thickness);
  for (int t = 0; t < seg.thickness; ++t) {
    for (int i = 0; i < seg.length; ++i) {
      const int x = static_cast<int>(round_half_up(seg.x_anchor + i * dx + t * px));
      const int y = static_cast<int>(round_half_up(seg.y_start + i * dy + t * py));
      if (x >= 0 && x < width && y >= 0 && y < height) pixels.emplace_back(x, y);
    }
  }
  std::sort(pixels.begin(), pixels.end(),
            [](const auto& a, const auto& b) {
              return a.second != b.second ? a.second < b.second : a.first < b.first;
            });
  pixels.erase(std::unique(pixels.begin(), pixels.end()), pixels.end());
  return pixels;
}

ImageBuffer composite(const ImageBuffer& content, const RainLayer& layer,
                      const Rgba& paint) {
  if (content.width() != layer.spec.target_width ||
      content.height() != layer.spec.target_height) {
    throw Error::invalid("layer dimensions " + std::to_string(layer.spec.target_width) +
                         "x" + std::to_string(layer.spec.target_height) +
                         " do not match image " + std::to_string(content.width()) + "x" +
                         std::to_string(content.height()));
  }
  ImageBuffer out = content;
  for (const auto& seg : layer.segments) {
    for (const auto& [x, y] : segment_pixels(seg, out.width(), out.height())) {
      out.set_pixel(x, y, blend_pixel(out.pixel(x, y), paint));
    }
  }
  return out;
}

ImageBuffer composite(const ImageBuffer& content, const RainLayer& layer) {
  return composite(content, layer, layer.spec.geometry.color);
}

void write_layer_text(const RainLayer& layer, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error::io("cannot write " + path.string());
  for (const auto& seg : layer.segments) {
    out << seg.x_anchor << ' ' << seg.y_start << ' ' << seg.length << ' '
        << seg.angle_degrees << ' ' << seg.thickness << '\n';
  }
  if (!out) throw Error::io("short write to " + path.string());
}

}  // namespace rainsd
