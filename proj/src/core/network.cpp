#include "core/network.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "core/error.hpp"
#include "core/fadain.hpp"
#include "core/numeric.hpp"
#include "core/rng.hpp"

namespace rainsd {

namespace {

struct ConvShape {
  std::uint64_t out_ch;
  std::uint64_t in_ch;
  std::uint64_t kernel;
};

void validate_config(const NetworkConfig& cfg) {
  if (cfg.levels < 1) throw Error::invalid("network levels must be >= 1");
  if (cfg.base_channels < 1) throw Error::invalid("network base_channels must be >= 1");
  const int div = 1 << cfg.levels;
  if (cfg.input_height < div || cfg.input_width < div ||
      cfg.input_height % div != 0 || cfg.input_width % div != 0) {
    throw Error::invalid("network input " + std::to_string(cfg.input_width) + "x" +
                         std::to_string(cfg.input_height) +
                         " must be divisible by 2^levels = " + std::to_string(div));
  }
  if (cfg.epsilon <= 0.0) throw Error::invalid("network epsilon must be > 0");
}

/// The full parameter plan; iteration order is the documented creation order.
std::map<std::string, ConvShape> parameter_plan(const NetworkConfig& cfg) {
  std::map<std::string, ConvShape> plan;
  const auto base = static_cast<std::uint64_t>(cfg.base_channels);
  for (const char* stream : {"content", "style"}) {
    plan[std::string(stream) + ".stem"] = {base, 3, 3};
    for (int i = 1; i <= cfg.levels; ++i) {
      const std::uint64_t in_ch = base << (i - 1);
      const std::uint64_t out_ch = base << i;
      plan[std::string(stream) + ".down" + std::to_string(i) + ".main"] = {out_ch, in_ch, 3};
      plan[std::string(stream) + ".down" + std::to_string(i) + ".skip"] = {out_ch, in_ch, 1};
    }
  }
  for (int i = cfg.levels; i >= 0; --i) {
    const std::uint64_t ch = base << i;
    const std::string prefix = "gen.level" + std::to_string(i);
    plan[prefix + ".gamma"] = {ch, ch, 3};
    plan[prefix + ".beta"] = {ch, ch, 3};
    plan[prefix + ".conv"] = {ch, ch, 3};
    if (i > 0) plan["gen.to_next" + std::to_string(i)] = {ch >> 1, ch, 3};
  }
  plan["gen.out"] = {3, base, 3};
  return plan;
}

ConvParams init_conv(const std::string& name, const ConvShape& shape,
                     std::uint64_t master_seed) {
  Xoshiro256ss rng(mix_seed(master_seed, fnv1a64(name + ".weight")));
  Tensor weight({shape.out_ch, shape.in_ch, shape.kernel, shape.kernel});
  for (float& v : weight.data()) v = static_cast<float>(rng.next_real(-0.1, 0.1));
  return {std::move(weight), std::vector<float>(shape.out_ch, 0.0f)};
}

void check_conv_shape(const std::string& name, const ConvParams& p, const ConvShape& s) {
  const std::vector<std::uint64_t> want{s.out_ch, s.in_ch, s.kernel, s.kernel};
  if (p.weight.shape() != want || p.bias.size() != s.out_ch) {
    throw Error::invalid("parameter '" + name + "' has unexpected shape");
  }
}

constexpr double kLreluSlope = 0.2;

}  // namespace

Tensor fade_block(const Tensor& z, const Tensor& c, const FadeBlockParams& params,
                  double eps) {
  if (z.shape() != c.shape()) {
    throw Error::invalid("fade_block: content feature shape must match z");
  }
  const Tensor normed = instance_norm(z, eps);
  const Tensor scale = conv2d(c, params.gamma, 1);
  const Tensor shift = conv2d(c, params.beta, 1);
  Tensor h(z.shape());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = scale[i] * normed[i] + shift[i];
  return add(z, conv2d(leaky_relu(std::move(h), kLreluSlope), params.conv, 1));
}

TwoStreamNet::TwoStreamNet(const NetworkConfig& cfg) : cfg_(cfg) {
  validate_config(cfg_);
  for (const auto& [name, shape] : parameter_plan(cfg_)) {
    params_.emplace(name, init_conv(name, shape, cfg_.seed));
  }
}

TwoStreamNet::TwoStreamNet(const NetworkConfig& cfg,
                           std::map<std::string, ConvParams> params)
    : cfg_(cfg), params_(std::move(params)) {
  validate_config(cfg_);
}

const ConvParams& TwoStreamNet::param(const std::string& name) const {
  const auto it = params_.find(name);
  if (it == params_.end()) throw Error::invalid("unknown parameter '" + name + "'");
  return it->second;
}

void TwoStreamNet::set_param(const std::string& name, ConvParams params) {
  const auto it = params_.find(name);
  if (it == params_.end()) throw Error::invalid("unknown parameter '" + name + "'");
  check_conv_shape(name, params, parameter_plan(cfg_).at(name));
  it->second = std::move(params);
}

Tensor image_to_tensor(const ImageBuffer& img) {
  Tensor t({3, static_cast<std::uint64_t>(img.height()),
            static_cast<std::uint64_t>(img.width())});
  const auto bytes = img.bytes();
  const std::size_t spatial = static_cast<std::size_t>(img.width()) * img.height();
  for (std::size_t i = 0; i < spatial; ++i) {
    for (std::size_t ch = 0; ch < 3; ++ch) {
      t.data()[ch * spatial + i] = static_cast<float>(bytes[i * 3 + ch] / 255.0);
    }
  }
  return t;
}

ImageBuffer tensor_to_image(const Tensor& t) {
  if (t.rank() != 3 || t.shape()[0] != 3) {
    throw Error::invalid("tensor_to_image expects a 3 x H x W tensor");
  }
  const int height = static_cast<int>(t.shape()[1]);
  const int width = static_cast<int>(t.shape()[2]);
  const std::size_t spatial = static_cast<std::size_t>(width) * height;
  ImageBuffer img(width, height);
  auto bytes = img.bytes();
  for (std::size_t i = 0; i < spatial; ++i) {
    for (std::size_t ch = 0; ch < 3; ++ch) {
      bytes[i * 3 + ch] = to_channel((t.data()[ch * spatial + i] + 1.0) / 2.0 * 255.0);
    }
  }
  return img;
}

FeaturePyramid TwoStreamNet::encode(Stream stream, const ImageBuffer& img) const {
  if (img.width() != cfg_.input_width || img.height() != cfg_.input_height) {
    throw Error::invalid("encode: image " + std::to_string(img.width()) + "x" +
                         std::to_string(img.height()) + " does not match configured " +
                         std::to_string(cfg_.input_width) + "x" +
                         std::to_string(cfg_.input_height));
  }
  return encode(stream, image_to_tensor(img));
}

FeaturePyramid TwoStreamNet::encode(Stream stream, const Tensor& img) const {
  if (img.rank() != 3 || img.shape()[0] != 3 ||
      img.shape()[1] != static_cast<std::uint64_t>(cfg_.input_height) ||
      img.shape()[2] != static_cast<std::uint64_t>(cfg_.input_width)) {
    throw Error::invalid("encode: tensor shape does not match configured input");
  }
  const std::string prefix = stream == Stream::content ? "content" : "style";
  FeaturePyramid pyr;
  pyr.levels.reserve(static_cast<std::size_t>(cfg_.levels) + 1);
  pyr.levels.push_back(leaky_relu(conv2d(img, param(prefix + ".stem"), 1), kLreluSlope));
  for (int i = 1; i <= cfg_.levels; ++i) {
    const std::string block = prefix + ".down" + std::to_string(i);
    const Tensor& prev = pyr.levels.back();
    Tensor main = leaky_relu(conv2d(prev, param(block + ".main"), 2), kLreluSlope);
    pyr.levels.push_back(add(main, conv2d(prev, param(block + ".skip"), 2)));
  }
  return pyr;
}

Tensor TwoStreamNet::make_noise(std::uint64_t seed) const {
  Xoshiro256ss rng(mix_seed(seed, fnv1a64("z0")));
  Tensor z({static_cast<std::uint64_t>(cfg_.base_channels) << cfg_.levels,
            static_cast<std::uint64_t>(cfg_.input_height >> cfg_.levels),
            static_cast<std::uint64_t>(cfg_.input_width >> cfg_.levels)});
  for (float& v : z.data()) v = static_cast<float>(rng.next_real(-1.0, 1.0));
  return z;
}

ImageBuffer TwoStreamNet::generate(const Tensor& z0, const FeaturePyramid& content,
                                   const FeaturePyramid& style,
                                   GenerateTrace* trace) const {
  const auto level_count = static_cast<std::size_t>(cfg_.levels) + 1;
  if (content.levels.size() != level_count || style.levels.size() != level_count) {
    throw Error::invalid("generate: pyramids must have levels+1 entries");
  }
  for (int i = 0; i <= cfg_.levels; ++i) {
    const std::uint64_t want_ch = static_cast<std::uint64_t>(cfg_.base_channels) << i;
    const std::uint64_t want_h = static_cast<std::uint64_t>(cfg_.input_height >> i);
    const std::uint64_t want_w = static_cast<std::uint64_t>(cfg_.input_width >> i);
    const auto& c = content.levels[static_cast<std::size_t>(i)];
    if (c.shape() != std::vector<std::uint64_t>{want_ch, want_h, want_w}) {
      throw Error::invalid("generate: content level " + std::to_string(i) +
                           " has unexpected shape");
    }
    const auto& s = style.levels[static_cast<std::size_t>(i)];
    if (s.rank() != 3 || s.shape()[0] != want_ch) {
      throw Error::invalid("generate: style level " + std::to_string(i) +
                           " has unexpected channel count");
    }
  }
  if (z0.shape() != content.levels.back().shape()) {
    throw Error::invalid("generate: z0 must be shaped as the deepest level");
  }

  Tensor z = z0;
  for (int i = cfg_.levels; i >= 0; --i) {
    const auto li = static_cast<std::size_t>(i);
    z = fadain(z, style.levels[li], {cfg_.epsilon});
    if (trace) trace->post_fadain.emplace(i, z);
    const std::string prefix = "gen.level" + std::to_string(i);
    z = fade_block(z, content.levels[li],
                   {param(prefix + ".gamma"), param(prefix + ".beta"),
                    param(prefix + ".conv")},
                   cfg_.epsilon);
    if (i > 0) {
      z = leaky_relu(conv2d(z, param("gen.to_next" + std::to_string(i)), 1), kLreluSlope);
      z = upsample2x_nn(z);
    }
  }
  Tensor rgb = conv2d(z, param("gen.out"), 1);
  for (float& v : rgb.data()) v = std::tanh(v);
  return tensor_to_image(rgb);
}

TwoStreamNet TwoStreamNet::with_input_size(int height, int width) const {
  NetworkConfig cfg = cfg_;
  cfg.input_height = height;
  cfg.input_width = width;
  return {cfg, params_};
}

void TwoStreamNet::save_weights(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nlohmann::json tensors = nlohmann::json::object();
  for (const auto& [name, conv] : params_) {
    const std::string weight_file = name + ".weight.rsdt";
    const std::string bias_file = name + ".bias.rsdt";
    write_tensor(conv.weight, dir / weight_file);
    write_tensor(Tensor({conv.bias.size()}, conv.bias), dir / bias_file);
    tensors[name + ".weight"] = weight_file;
    tensors[name + ".bias"] = bias_file;
  }
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw Error::io("cannot write " + (dir / "manifest.json").string());
  out << nlohmann::json{{"tensors", tensors}}.dump(2) << "\n";
}

TwoStreamNet TwoStreamNet::load_weights(const NetworkConfig& cfg,
                                        const std::filesystem::path& dir) {
  validate_config(cfg);
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw Error::io("cannot open " + manifest_path.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw Error::format("bad weights manifest " + manifest_path.string() + ": " + e.what());
  }
  if (!manifest.contains("tensors") || !manifest["tensors"].is_object()) {
    throw Error::format("weights manifest missing 'tensors' object");
  }
  const auto& tensors = manifest["tensors"];
  auto fetch = [&](const std::string& key) -> Tensor {
    if (!tensors.contains(key)) {
      throw Error::format("weights manifest missing tensor '" + key + "'");
    }
    return read_tensor(dir / tensors[key].get<std::string>());
  };

  std::map<std::string, ConvParams> params;
  for (const auto& [name, shape] : parameter_plan(cfg)) {
    Tensor weight = fetch(name + ".weight");
    Tensor bias = fetch(name + ".bias");
    if (bias.rank() != 1) throw Error::format("bias tensor for '" + name + "' must be rank 1");
    ConvParams conv{std::move(weight), bias.data()};
    check_conv_shape(name, conv, shape);
    params.emplace(name, std::move(conv));
  }
  return {cfg, std::move(params)};
}

ImageBuffer translate(const NetworkConfig& cfg, const ImageBuffer& content,
                      const ImageBuffer& style,
                      const std::optional<std::filesystem::path>& weights_dir,
                      std::uint64_t noise_seed) {
  NetworkConfig content_cfg = cfg;
  content_cfg.input_height = content.height();
  content_cfg.input_width = content.width();
  const TwoStreamNet net = weights_dir
                               ? TwoStreamNet::load_weights(content_cfg, *weights_dir)
                               : TwoStreamNet(content_cfg);
  const FeaturePyramid content_pyr = net.encode(Stream::content, content);
  const TwoStreamNet style_net = net.with_input_size(style.height(), style.width());
  const FeaturePyramid style_pyr = style_net.encode(Stream::style, style);
  return net.generate(net.make_noise(noise_seed), content_pyr, style_pyr);
}

}  // namespace rainsd
