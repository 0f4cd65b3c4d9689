#include "core/nn_ops.hpp"

#include <string>

#include "core/error.hpp"

namespace rainsd {

Tensor conv2d(const Tensor& in, const ConvParams& p, int stride) {
  if (in.rank() != 3) throw Error::invalid("conv2d expects a rank-3 input");
  if (p.weight.rank() != 4) throw Error::invalid("conv2d expects rank-4 weights");
  const auto out_ch = static_cast<std::size_t>(p.weight.shape()[0]);
  const auto in_ch = static_cast<std::size_t>(p.weight.shape()[1]);
  const auto k = static_cast<int>(p.weight.shape()[2]);
  if (p.weight.shape()[3] != p.weight.shape()[2]) {
    throw Error::invalid("conv2d kernels must be square");
  }
  if (in.shape()[0] != in_ch) {
    throw Error::invalid("conv2d channel mismatch: input has " +
                         std::to_string(in.shape()[0]) + ", weights expect " +
                         std::to_string(in_ch));
  }
  if (p.bias.size() != out_ch) throw Error::invalid("conv2d bias length mismatch");
  if (stride < 1) throw Error::invalid("conv2d stride must be >= 1");

  const int in_h = static_cast<int>(in.shape()[1]);
  const int in_w = static_cast<int>(in.shape()[2]);
  const int pad = (k - 1) / 2;
  const int out_h = (in_h + 2 * pad - k) / stride + 1;
  const int out_w = (in_w + 2 * pad - k) / stride + 1;
  if (out_h < 1 || out_w < 1) throw Error::invalid("conv2d output would be empty");

  Tensor out({out_ch, static_cast<std::uint64_t>(out_h), static_cast<std::uint64_t>(out_w)});
  const float* w = p.weight.data().data();
  for (std::size_t oc = 0; oc < out_ch; ++oc) {
    for (int oh = 0; oh < out_h; ++oh) {
      for (int ow = 0; ow < out_w; ++ow) {
        double acc = p.bias[oc];
        for (std::size_t ic = 0; ic < in_ch; ++ic) {
          for (int kh = 0; kh < k; ++kh) {
            const int ih = oh * stride + kh - pad;
            if (ih < 0 || ih >= in_h) continue;
            for (int kw = 0; kw < k; ++kw) {
              const int iw = ow * stride + kw - pad;
              if (iw < 0 || iw >= in_w) continue;
              acc += static_cast<double>(w[((oc * in_ch + ic) * k + kh) * k + kw]) *
                     in.at(ic, ih, iw);
            }
          }
        }
        out.at(oc, oh, ow) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

Tensor leaky_relu(Tensor x, double slope) {
  for (float& v : x.data()) {
    if (v < 0.0f) v = static_cast<float>(slope * v);
  }
  return x;
}

Tensor instance_norm(const Tensor& x, double eps) {
  const ChannelStats stats = channel_stats(x);
  const std::size_t channels = x.shape()[0];
  const std::size_t spatial = static_cast<std::size_t>(x.shape()[1] * x.shape()[2]);
  Tensor out(x.shape());
  for (std::size_t c = 0; c < channels; ++c) {
    const double mean = stats.mean[c];
    const double inv = 1.0 / (stats.std[c] + eps);
    const float* src = x.data().data() + c * spatial;
    float* dst = out.data().data() + c * spatial;
    for (std::size_t i = 0; i < spatial; ++i) {
      dst[i] = static_cast<float>((src[i] - mean) * inv);
    }
  }
  return out;
}

Tensor upsample2x_nn(const Tensor& x) {
  if (x.rank() != 3) throw Error::invalid("upsample2x_nn expects a rank-3 input");
  const std::uint64_t c = x.shape()[0], h = x.shape()[1], w = x.shape()[2];
  Tensor out({c, h * 2, w * 2});
  for (std::uint64_t ch = 0; ch < c; ++ch) {
    for (std::uint64_t y = 0; y < 2 * h; ++y) {
      for (std::uint64_t xx = 0; xx < 2 * w; ++xx) {
        out.at(ch, y, xx) = x.at(ch, y / 2, xx / 2);
      }
    }
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw Error::invalid("add: shape mismatch");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

}  // namespace rainsd
