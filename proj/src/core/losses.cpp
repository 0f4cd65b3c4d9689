#include "core/losses.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace rainsd {

namespace {

ConvParams seeded_conv(const std::string& name, std::uint64_t seed, std::uint64_t out_ch,
                       std::uint64_t in_ch, std::uint64_t kernel) {
  Xoshiro256ss rng(mix_seed(seed, fnv1a64(name + ".weight")));
  Tensor weight({out_ch, in_ch, kernel, kernel});
  for (float& v : weight.data()) v = static_cast<float>(rng.next_real(-0.1, 0.1));
  return {std::move(weight), std::vector<float>(out_ch, 0.0f)};
}

double mean_squared_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw Error::invalid("feature shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

double mean_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw Error::invalid("feature shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += std::abs(static_cast<double>(a[i]) - b[i]);
  }
  return acc / static_cast<double>(a.size());
}

double hinge_real(double d_real) { return -std::min(-1.0 + d_real, 0.0); }
double hinge_fake(double d_fake) { return -std::min(-1.0 - d_fake, 0.0); }

}  // namespace

Critic::Critic(int base_channels, std::uint64_t seed) {
  if (base_channels < 1) throw Error::invalid("critic base_channels must be >= 1");
  const auto base = static_cast<std::uint64_t>(base_channels);
  layers_.push_back(seeded_conv("critic.l1", seed, base, 3, 3));
  layers_.push_back(seeded_conv("critic.l2", seed, base * 2, base, 3));
  layers_.push_back(seeded_conv("critic.l3", seed, base * 4, base * 2, 3));
  out_ = seeded_conv("critic.out", seed, 1, base * 4, 3);
}

CriticOutput Critic::evaluate(const Tensor& img) const {
  if (img.rank() != 3 || img.shape()[0] != 3) {
    throw Error::invalid("critic expects a 3 x H x W tensor");
  }
  CriticOutput out;
  Tensor x = img;
  for (const auto& layer : layers_) {
    x = leaky_relu(conv2d(x, layer, 2), 0.2);
    out.features.push_back(x);
  }
  const Tensor score_map = conv2d(x, out_, 1);
  double acc = 0.0;
  for (float v : score_map.data()) acc += v;
  out.score = acc / static_cast<double>(score_map.size());
  return out;
}

double perceptual_loss(const FeaturePyramid& generated, const FeaturePyramid& content) {
  if (generated.levels.empty() || generated.levels.size() != content.levels.size()) {
    throw Error::invalid("perceptual_loss: pyramid level counts differ");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < generated.levels.size(); ++i) {
    acc += mean_squared_diff(generated.levels[i], content.levels[i]);
  }
  return acc / static_cast<double>(generated.levels.size());
}

double feature_matching_loss(const CriticOutput& generated, const CriticOutput& style) {
  if (generated.features.empty() || generated.features.size() != style.features.size()) {
    throw Error::invalid("feature_matching_loss: layer counts differ");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < generated.features.size(); ++i) {
    acc += mean_abs_diff(generated.features[i], style.features[i]);
  }
  return acc / static_cast<double>(generated.features.size());
}

double generator_loss(const CriticOutput& critic_on_generated,
                      const FeaturePyramid& generated_feats,
                      const FeaturePyramid& content_feats,
                      const CriticOutput& critic_on_style, const LossWeights& w) {
  if (w.lambda_p < 0.0 || w.lambda_fm < 0.0) {
    throw Error::invalid("loss weights must be non-negative");
  }
  return -critic_on_generated.score +
         w.lambda_p * perceptual_loss(generated_feats, content_feats) +
         w.lambda_fm * feature_matching_loss(critic_on_generated, critic_on_style);
}

double discriminator_loss(double d_real, double d_fake) {
  if (!std::isfinite(d_real) || !std::isfinite(d_fake)) {
    throw Error::invalid("critic scores must be finite");
  }
  return hinge_real(d_real) + hinge_fake(d_fake);
}

double discriminator_loss(std::span<const double> d_real, std::span<const double> d_fake) {
  if (d_real.empty() || d_fake.empty()) {
    throw Error::invalid("discriminator_loss: empty score batch");
  }
  double real_acc = 0.0, fake_acc = 0.0;
  for (double v : d_real) real_acc += hinge_real(v);
  for (double v : d_fake) fake_acc += hinge_fake(v);
  return real_acc / static_cast<double>(d_real.size()) +
         fake_acc / static_cast<double>(d_fake.size());
}

Tensor fd_gradient(const LossFn& loss, const Tensor& at, double h) {
  if (h <= 0.0) throw Error::invalid("fd_gradient step must be > 0");
  Tensor grad(at.shape());
  Tensor probe = at;
  for (std::size_t i = 0; i < at.size(); ++i) {
    const float original = at[i];
    const auto plus = static_cast<float>(original + h);
    const auto minus = static_cast<float>(original - h);
    probe[i] = plus;
    const double up = loss(probe);
    probe[i] = minus;
    const double down = loss(probe);
    probe[i] = original;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw Error::invalid("fd_gradient: loss is not finite near the probe point");
    }
    const double step = static_cast<double>(plus) - static_cast<double>(minus);
    if (step == 0.0) {
      throw Error::invalid("fd_gradient: step vanished under float rounding");
    }
    grad[i] = static_cast<float>((up - down) / step);
  }
  return grad;
}

std::vector<double> pixel_descent_demo(const Tensor& initial, const LossFn& objective,
                                       int steps, double learning_rate, double fd_step) {
  if (steps < 1) throw Error::invalid("pixel_descent_demo needs steps >= 1");
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(steps) + 1);
  Tensor x = initial;
  double value = objective(x);
  if (!std::isfinite(value)) throw Error::invalid("objective diverged at the initial point");
  trace.push_back(value);
  for (int s = 0; s < steps; ++s) {
    const Tensor grad = fd_gradient(objective, x, fd_step);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = static_cast<float>(x[i] - learning_rate * grad[i]);
    }
    value = objective(x);
    if (!std::isfinite(value)) {
      throw Error::invalid("objective diverged at step " + std::to_string(s + 1));
    }
    trace.push_back(value);
  }
  return trace;
}

}  // namespace rainsd
