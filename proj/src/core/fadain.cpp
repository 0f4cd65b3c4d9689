#include "core/fadain.hpp"

#include <string>

#include "core/error.hpp"

namespace rainsd {

Tensor fadain(const Tensor& z, const Tensor& f, const FadainConfig& cfg) {
  if (z.rank() != 3 || f.rank() != 3) {
    throw Error::invalid("fadain expects rank-3 tensors");
  }
  if (z.shape()[0] != f.shape()[0]) {
    throw Error::invalid("fadain channel mismatch: content has " +
                         std::to_string(z.shape()[0]) + ", style has " +
                         std::to_string(f.shape()[0]));
  }
  if (cfg.epsilon <= 0.0) throw Error::invalid("fadain epsilon must be > 0");

  const ChannelStats zs = channel_stats(z);
  const ChannelStats fs = channel_stats(f);

  const std::size_t channels = z.shape()[0];
  const std::size_t spatial = static_cast<std::size_t>(z.shape()[1] * z.shape()[2]);
  Tensor out(z.shape());
  for (std::size_t c = 0; c < channels; ++c) {
    const double scale = fs.std[c] / (zs.std[c] + cfg.epsilon);
    const double shift = fs.mean[c];
    const double mean_z = zs.mean[c];
    const float* src = z.data().data() + c * spatial;
    float* dst = out.data().data() + c * spatial;
    for (std::size_t i = 0; i < spatial; ++i) {
      dst[i] = static_cast<float>(scale * (src[i] - mean_z) + shift);
    }
  }
  return out;
}

}  // namespace rainsd
