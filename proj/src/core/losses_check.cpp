#include <cmath>
#include <sstream>

#include "core/losses.hpp"
#include "core/rng.hpp"

namespace rainsd {

namespace {

Tensor random_tensor(Xoshiro256ss& rng, std::vector<std::uint64_t> shape, double lo = -1.0,
                     double hi = 1.0) {
  Tensor t(std::move(shape));
  for (float& v : t.data()) v = static_cast<float>(rng.next_real(lo, hi));
  return t;
}

LossCheck check(std::string name, bool passed, std::string detail = {}) {
  return {std::move(name), passed, std::move(detail)};
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::vector<LossCheck> loss_check_suite(std::uint64_t seed) {
  std::vector<LossCheck> results;
  Xoshiro256ss rng(mix_seed(seed, fnv1a64("loss-check")));

  // Hand-computable hinge cases.
  {
    const bool ok = discriminator_loss(1.0, -1.0) == 0.0 &&
                    discriminator_loss(0.0, 0.0) == 2.0 &&
                    discriminator_loss(-2.0, 3.0) == 7.0;
    results.push_back(check("hinge hand cases (1,-1)->0 (0,0)->2 (-2,3)->7", ok));
  }

  // Non-negativity, zero exactly when both margins are met.
  {
    bool ok = true;
    for (int i = 0; i < 200 && ok; ++i) {
      const double real = rng.next_real(-3.0, 3.0);
      const double fake = rng.next_real(-3.0, 3.0);
      const double loss = discriminator_loss(real, fake);
      ok = loss >= 0.0 && ((loss == 0.0) == (real >= 1.0 && fake <= -1.0));
    }
    results.push_back(check("hinge loss >= 0, zero iff margins satisfied", ok));
  }

  // Generator loss decomposes and is monotone in the adversarial score.
  {
    Critic critic(4, seed);
    const Tensor img_a = random_tensor(rng, {3, 8, 8});
    const Tensor img_b = random_tensor(rng, {3, 8, 8});
    CriticOutput on_g = critic.evaluate(img_a);
    const CriticOutput on_s = critic.evaluate(img_b);
    FeaturePyramid gen_feats{{random_tensor(rng, {2, 4, 4}), random_tensor(rng, {4, 2, 2})}};
    FeaturePyramid content_feats{
        {random_tensor(rng, {2, 4, 4}), random_tensor(rng, {4, 2, 2})}};
    const LossWeights w;
    const double total = generator_loss(on_g, gen_feats, content_feats, on_s, w);
    const double parts = -on_g.score + w.lambda_p * perceptual_loss(gen_feats, content_feats) +
                         w.lambda_fm * feature_matching_loss(on_g, on_s);
    CriticOutput better = on_g;
    better.score += 0.5;
    const double improved = generator_loss(better, gen_feats, content_feats, on_s, w);
    const bool ok = std::abs(total - parts) < 1e-12 && improved < total;
    results.push_back(check("generator loss decomposition and score monotonicity", ok,
                            "L_G=" + fmt(total)));
  }

  // L_P and L_FM vanish exactly on identical features.
  {
    bool ok = true;
    for (int i = 0; i < 20 && ok; ++i) {
      FeaturePyramid a{{random_tensor(rng, {3, 4, 4})}};
      FeaturePyramid b{{a.levels[0]}};
      ok = perceptual_loss(a, b) == 0.0;
      FeaturePyramid c{{random_tensor(rng, {3, 4, 4})}};
      ok = ok && (perceptual_loss(a, c) > 0.0 || a.levels[0] == c.levels[0]);
      CriticOutput x{0.0, {a.levels[0]}};
      CriticOutput y{0.0, {a.levels[0]}};
      CriticOutput zz{0.0, {c.levels[0]}};
      ok = ok && feature_matching_loss(x, y) == 0.0 &&
           (feature_matching_loss(x, zz) > 0.0 || a.levels[0] == c.levels[0]);
    }
    results.push_back(check("L_P / L_FM zero exactly on identical features", ok));
  }

  // Finite differences reproduce the analytic mean-squared-error gradient.
  {
    const Tensor target = random_tensor(rng, {1, 4, 4});
    const Tensor at = random_tensor(rng, {1, 4, 4});
    const auto objective = [&target](const Tensor& x) {
      return perceptual_loss(FeaturePyramid{{x}}, FeaturePyramid{{target}});
    };
    const Tensor grad = fd_gradient(objective, at, 1e-3);
    double worst = 0.0;
    const double n = static_cast<double>(at.size());
    for (std::size_t i = 0; i < at.size(); ++i) {
      const double analytic = 2.0 * (static_cast<double>(at[i]) - target[i]) / n;
      const double rel = std::abs(grad[i] - analytic) / std::max(1e-12, std::abs(analytic));
      worst = std::max(worst, rel);
    }
    results.push_back(check("fd gradient matches analytic MSE gradient (rel < 1e-4)",
                            worst < 1e-4, "worst rel err " + fmt(worst)));
  }

  // The descent demo actually descends, and a zero learning rate stays flat.
  {
    const Tensor target = random_tensor(rng, {1, 4, 4});
    const Tensor start = random_tensor(rng, {1, 4, 4});
    const auto objective = [&target](const Tensor& x) {
      return perceptual_loss(FeaturePyramid{{x}}, FeaturePyramid{{target}});
    };
    const auto trace = pixel_descent_demo(start, objective, 50, 0.1);
    const bool descended = trace.back() < 0.5 * trace.front();
    const auto flat = pixel_descent_demo(start, objective, 3, 0.0);
    bool stayed_flat = true;
    for (double v : flat) stayed_flat = stayed_flat && v == flat.front();
    results.push_back(check("pixel descent halves the loss in 50 steps; lr 0 is flat",
                            descended && stayed_flat,
                            fmt(trace.front()) + " -> " + fmt(trace.back())));
  }

  return results;
}

std::string render_check_table(const std::vector<LossCheck>& checks) {
  std::size_t width = 0;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS  " : "FAIL  ") << c.name;
    if (!c.detail.empty()) {
      os << std::string(width - c.name.size() + 2, ' ') << c.detail;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace rainsd
