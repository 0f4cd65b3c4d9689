#pragma once

#include "core/tensor.hpp"

namespace rainsd {

struct FadainConfig {
  double epsilon = 1e-5;  // added to sigma(z) before the division
};

/// Feature adaptive instance normalization: renormalizes the content feature
/// z to carry the style feature f's per-channel distribution,
///
///   out[c,h,w] = std_f[c] * (z[c,h,w] - mean_z[c]) / (std_z[c] + eps) + mean_f[c].
///
/// z and f must share the channel count; spatial extents may differ since
/// only f's statistics are consumed. The output has z's shape.
Tensor fadain(const Tensor& z, const Tensor& f, const FadainConfig& cfg = {});

}  // namespace rainsd
