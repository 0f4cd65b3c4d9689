#include "core/rain_model.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/numeric.hpp"

namespace rainsd {

namespace {

void validate_model(const CountModel& m) {
  if (m.k <= 0.0) throw Error::invalid("count model k must be > 0");
  if (m.gamma <= 0.0) throw Error::invalid("count model gamma must be > 0");
  if (m.reference_width < 1 || m.reference_height < 1) {
    throw Error::invalid("count model reference dimensions must be >= 1");
  }
}

void validate_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error::invalid("target dimensions must be >= 1, got " + std::to_string(width) +
                         "x" + std::to_string(height));
  }
}

}  // namespace

void validate_geometry(const StreakGeometry& g) {
  if (g.length_min < 1 || g.length_min > g.length_max) {
    throw Error::invalid("streak length range must satisfy 1 <= min <= max, got [" +
                         std::to_string(g.length_min) + ", " + std::to_string(g.length_max) +
                         "]");
  }
  if (g.thickness < 1) throw Error::invalid("streak thickness must be >= 1");
  if (g.interval < 1) throw Error::invalid("streak interval must be >= 1");
  if (g.color.alpha < 0.0 || g.color.alpha > 1.0) {
    throw Error::invalid("streak alpha must lie in [0, 1]");
  }
}

double area_scale(const CountModel& model, int width, int height) {
  validate_model(model);
  validate_dims(width, height);
  return (static_cast<double>(width) * height) /
         (static_cast<double>(model.reference_width) * model.reference_height);
}

std::int64_t streak_count(const CountModel& model, RainfallRate rate, int width,
                          int height) {
  if (rate.mm_per_hour < 0.0) throw Error::invalid("rainfall rate must be >= 0");
  const double s = area_scale(model, width, height);
  if (rate.mm_per_hour == 0.0) return 0;
  return round_half_up(model.k * std::pow(rate.mm_per_hour, model.gamma) * s);
}

RainLayerSpec resolve_spec(RainfallRate rate, const StreakGeometry& geometry,
                           int width, int height, std::uint64_t seed,
                           const CountModel& model) {
  validate_geometry(geometry);
  RainLayerSpec spec;
  spec.rate = rate;
  spec.geometry = geometry;
  spec.target_width = width;
  spec.target_height = height;
  spec.seed = seed;
  spec.count_model = model;
  spec.streak_count = streak_count(model, rate, width, height);
  return spec;
}

}  // namespace rainsd
