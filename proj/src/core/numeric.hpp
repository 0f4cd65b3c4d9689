#pragma once

#include <cmath>
#include <cstdint>

namespace rainsd {

/// Round-half-up, the single rounding rule for pixel math, streak counts and
/// rasterization. floor(x + 0.5) so ties go toward +infinity on all platforms.
inline std::int64_t round_half_up(double x) {
  return static_cast<std::int64_t>(std::floor(x + 0.5));
}

/// Round and clamp a real value into the 8-bit channel range.
inline std::uint8_t to_channel(double x) {
  const std::int64_t v = round_half_up(x);
  if (v < 0) return 0;
  if (v > 255) return 255;
  return static_cast<std::uint8_t>(v);
}

}  // namespace rainsd
