#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "core/network.hpp"
#include "core/tensor.hpp"

namespace rainsd {

struct LossWeights {
  double lambda_p = 1.0;
  double lambda_fm = 1.0;
};

/// Scalar critic score plus the per-layer features the feature-matching loss
/// consumes.
struct CriticOutput {
  double score = 0.0;
  std::vector<Tensor> features;
};

/// Three stride-2 convolution layers (leaky-ReLU 0.2) recording per-layer
/// features, then a 3x3 conv to one channel whose spatial mean is the score.
/// Weights are seeded like the generator's (uniform [-0.1, 0.1), zero bias).
class Critic {
 public:
  Critic(int base_channels, std::uint64_t seed);

  /// img is a 3 x H x W tensor in [-1, 1].
  CriticOutput evaluate(const Tensor& img) const;

 private:
  std::vector<ConvParams> layers_;
  ConvParams out_;
};

/// Mean over pyramid levels of the mean-squared feature distance.
double perceptual_loss(const FeaturePyramid& generated, const FeaturePyramid& content);

/// Mean over critic layers of the mean absolute feature difference.
double feature_matching_loss(const CriticOutput& generated, const CriticOutput& style);

/// L_G = -score(g) + lambda_p * L_P(g, content) + lambda_fm * L_FM(g, style).
double generator_loss(const CriticOutput& critic_on_generated,
                      const FeaturePyramid& generated_feats,
                      const FeaturePyramid& content_feats,
                      const CriticOutput& critic_on_style, const LossWeights& w);

/// Hinge loss: -min(-1 + d_real, 0) - min(-1 - d_fake, 0).
double discriminator_loss(double d_real, double d_fake);

/// Batch form; each hinge term is averaged over its span.
double discriminator_loss(std::span<const double> d_real, std::span<const double> d_fake);

using LossFn = std::function<double(const Tensor&)>;

/// Central finite differences per element. The divisor is the realized step
/// (x_plus - x_minus) after float32 rounding, not the nominal 2h.
Tensor fd_gradient(const LossFn& loss, const Tensor& at, double h);

/// Gradient descent directly on image pixels via fd_gradient, critic and
/// encoders frozen. Returns the loss trace (steps + 1 values, initial first).
/// Non-finite losses raise instead of being swallowed.
std::vector<double> pixel_descent_demo(const Tensor& initial, const LossFn& objective,
                                       int steps, double learning_rate,
                                       double fd_step = 1e-3);

/// One line of the self-check table behind `rainsd loss-check`.
struct LossCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the loss invariants on seeded random instances.
std::vector<LossCheck> loss_check_suite(std::uint64_t seed);

std::string render_check_table(const std::vector<LossCheck>& checks);

}  // namespace rainsd
