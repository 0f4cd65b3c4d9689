#pragma once

#include <vector>

#include "core/tensor.hpp"

namespace rainsd {

/// Kernel weights (out x in x k x k) plus per-output-channel bias.
struct ConvParams {
  Tensor weight;
  std::vector<float> bias;
};

/// 2-D convolution on a C x H x W tensor with zero padding (k-1)/2 per side;
/// out extent = (in + 2*pad - k) / stride + 1. Accumulates in double.
Tensor conv2d(const Tensor& in, const ConvParams& p, int stride);

Tensor leaky_relu(Tensor x, double slope = 0.2);

/// Per-channel instance normalization: (x - mean_c) / (std_c + eps).
Tensor instance_norm(const Tensor& x, double eps);

/// Nearest-neighbor 2x upsampling of a C x H x W tensor.
Tensor upsample2x_nn(const Tensor& x);

/// Elementwise sum; shapes must match.
Tensor add(const Tensor& a, const Tensor& b);

}  // namespace rainsd
