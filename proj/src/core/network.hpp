#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/image.hpp"
#include "core/nn_ops.hpp"
#include "core/tensor.hpp"

namespace rainsd {

/// Desk-scale configuration of the two-stream translation network.
struct NetworkConfig {
  int levels = 4;         // L; pyramid has L+1 levels
  int base_channels = 8;  // level i carries base_channels * 2^i channels
  int input_height = 0;   // both divisible by 2^levels
  int input_width = 0;
  std::uint64_t seed = 0;  // weight initialization
  // Division guard for the in-network normalizations. Must sit well below
  // the per-channel feature deviations (desk scale: as low as ~1e-4) or it
  // skews the statistics that FAdaIN transfers.
  double epsilon = 1e-8;
};

enum class Stream { content, style };

/// Multi-scale features: levels[i] is base*2^i x H/2^i x W/2^i.
struct FeaturePyramid {
  std::vector<Tensor> levels;
};

struct FadeBlockParams {
  ConvParams gamma;  // 3x3 conv of the content feature -> per-element scale
  ConvParams beta;   // 3x3 conv of the content feature -> per-element shift
  ConvParams conv;   // 3x3 residual conv
};

/// Per-level intermediates captured during generate(), keyed by level index.
struct GenerateTrace {
  std::map<int, Tensor> post_fadain;
};

/// FADE residual block: out = z + conv(lrelu(gamma(c) * norm(z) + beta(c)))
/// where norm is per-channel instance normalization. z and c share a shape.
Tensor fade_block(const Tensor& z, const Tensor& c, const FadeBlockParams& params,
                  double eps = 1e-5);

/// Two-stream encoder-decoder, forward pass only.
///
/// Encoders: a stride-1 stem (3x3 conv + leaky-ReLU 0.2) to base channels,
/// then per level a stride-2 residual downsampling block
/// (leaky-ReLU(3x3 stride-2 conv) + 1x1 stride-2 skip), doubling channels.
/// Generator: from the deepest level down, FAdaIN with the style feature,
/// a FADE residual block modulated by the content feature, a channel-halving
/// 3x3 conv + leaky-ReLU, then 2x nearest-neighbor upsampling (skipped at
/// level 0); finally a 3x3 conv to 3 channels, tanh, and [-1,1] -> [0,255].
///
/// Weights initialize uniform in [-0.1, 0.1) from per-parameter streams
/// derived as mix_seed(cfg.seed, fnv1a64(param_name)); biases start at zero.
class TwoStreamNet {
 public:
  explicit TwoStreamNet(const NetworkConfig& cfg);

  const NetworkConfig& config() const { return cfg_; }

  /// Encodes an image into the L+1 level pyramid. Image dimensions must
  /// equal the configured spatial input.
  FeaturePyramid encode(Stream stream, const ImageBuffer& img) const;

  /// Same on a 3 x H x W tensor already mapped to [-1, 1].
  FeaturePyramid encode(Stream stream, const Tensor& img) const;

  /// Runs the generator. z0 must be shaped as the deepest content level.
  ImageBuffer generate(const Tensor& z0, const FeaturePyramid& content,
                       const FeaturePyramid& style,
                       GenerateTrace* trace = nullptr) const;

  /// Noise for the deepest level, uniform in [-1, 1) from the "z0" stream of
  /// the given seed.
  Tensor make_noise(std::uint64_t seed) const;

  /// A copy of this net (same weights) accepting another input size.
  TwoStreamNet with_input_size(int height, int width) const;

  /// Weight directory: manifest.json maps parameter names to RSDT files.
  void save_weights(const std::filesystem::path& dir) const;
  static TwoStreamNet load_weights(const NetworkConfig& cfg,
                                   const std::filesystem::path& dir);

  /// Named parameter access, e.g. "gen.level2.gamma"; throws on unknown names.
  const ConvParams& param(const std::string& name) const;
  void set_param(const std::string& name, ConvParams params);

 private:
  TwoStreamNet(const NetworkConfig& cfg, std::map<std::string, ConvParams> params);

  Tensor encode_to_level0(Stream stream, const Tensor& img) const;

  NetworkConfig cfg_;
  std::map<std::string, ConvParams> params_;
};

/// Maps pixels linearly onto [0, 1] (the encoder input scale; black stays
/// exactly zero).
Tensor image_to_tensor(const ImageBuffer& img);

/// Generator output map: tanh range [-1, 1] to 8-bit channels
/// (round-half-up, clamped).
ImageBuffer tensor_to_image(const Tensor& t);

/// End-to-end translation: encodes content and style (the style image may
/// have its own dimensions), then generates with z0 drawn from noise_seed.
/// Weights come from weights_dir when given, otherwise from cfg.seed.
ImageBuffer translate(const NetworkConfig& cfg, const ImageBuffer& content,
                      const ImageBuffer& style,
                      const std::optional<std::filesystem::path>& weights_dir,
                      std::uint64_t noise_seed);

}  // namespace rainsd
