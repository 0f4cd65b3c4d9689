#include "core/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "core/error.hpp"

namespace rainsd {

namespace {

using nlohmann::json;

/// Checked view over one JSON object; records which keys were consumed and
/// rejects leftovers with their path.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw Error::format(path_ + " must be a JSON object");
  }

  template <typename T>
  void get(const char* key, T& into) {
    if (!node_.contains(key)) return;
    seen_.insert(key);
    try {
      into = node_[key].get<T>();
    } catch (const json::exception&) {
      throw Error::format(path_ + "." + key + " has the wrong type");
    }
  }

  bool has(const char* key) {
    if (node_.contains(key)) {
      seen_.insert(key);
      return true;
    }
    return false;
  }

  const json& raw(const char* key) { return node_[key]; }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) {
        throw Error::format("unknown config key " + path_ + "." + key);
      }
    }
  }

  const std::string& path() const { return path_; }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void parse_rain(Section sec, GlobalConfig& cfg) {
  sec.get("k", cfg.rain_model.k);
  sec.get("gamma", cfg.rain_model.gamma);
  sec.get("reference_width", cfg.rain_model.reference_width);
  sec.get("reference_height", cfg.rain_model.reference_height);
  sec.get("length_min", cfg.rain_geometry.length_min);
  sec.get("length_max", cfg.rain_geometry.length_max);
  sec.get("thickness", cfg.rain_geometry.thickness);
  sec.get("angle_degrees", cfg.rain_geometry.angle_degrees);
  sec.get("alpha", cfg.rain_geometry.color.alpha);
  sec.get("interval", cfg.rain_geometry.interval);
  if (sec.has("color")) {
    const json& color = sec.raw("color");
    if (!color.is_array() || color.size() != 3) {
      throw Error::format(sec.path() + ".color must be [r, g, b]");
    }
    for (const auto& ch : color) {
      if (!ch.is_number_unsigned() || ch.get<std::uint64_t>() > 255) {
        throw Error::format(sec.path() + ".color channels must be integers in 0..255");
      }
    }
    cfg.rain_geometry.color.r = color[0].get<std::uint8_t>();
    cfg.rain_geometry.color.g = color[1].get<std::uint8_t>();
    cfg.rain_geometry.color.b = color[2].get<std::uint8_t>();
  }
  sec.finish();
}

void parse_pipeline(Section sec, GlobalConfig& cfg) {
  sec.get("n_rainy_sources", cfg.plan.n_rainy_sources);
  sec.get("rates", cfg.plan.rates);
  sec.get("n_clear_train", cfg.plan.n_clear_train);
  sec.get("n_test_clear", cfg.plan.n_test_clear);
  sec.get("master_seed", cfg.plan.master_seed);
  std::string weights;
  sec.get("weights_dir", weights);
  if (!weights.empty()) cfg.weights_dir = weights;
  sec.finish();
}

void parse_network(Section sec, GlobalConfig& cfg) {
  sec.get("levels", cfg.network.levels);
  sec.get("base_channels", cfg.network.base_channels);
  sec.get("seed", cfg.network.seed);
  sec.get("epsilon", cfg.network.epsilon);
  sec.finish();
}

void parse_losses(Section sec, GlobalConfig& cfg) {
  sec.get("lambda_p", cfg.losses.weights.lambda_p);
  sec.get("lambda_fm", cfg.losses.weights.lambda_fm);
  sec.get("critic_base_channels", cfg.losses.critic_base_channels);
  sec.finish();
}

void parse_metrics(Section sec, GlobalConfig& cfg) {
  sec.get("iou_threshold", cfg.metrics.iou_threshold);
  sec.get("num_classes", cfg.metrics.num_classes);
  sec.finish();
}

}  // namespace

GlobalConfig default_config() {
  GlobalConfig cfg;
  cfg.plan.n_rainy_sources = 10;
  for (int r = 10; r <= 100; r += 10) cfg.plan.rates.push_back(r);
  cfg.plan.n_clear_train = 10;
  cfg.plan.n_test_clear = 5;
  return cfg;
}

GlobalConfig parse_config(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error::format("bad config " + origin + ": " + e.what());
  }
  GlobalConfig cfg = default_config();
  Section root(doc, "$");
  root.get("seed", cfg.seed);
  root.get("log_level", cfg.log_level);
  if (root.has("rain")) parse_rain({root.raw("rain"), "$.rain"}, cfg);
  if (root.has("pipeline")) parse_pipeline({root.raw("pipeline"), "$.pipeline"}, cfg);
  if (root.has("network")) parse_network({root.raw("network"), "$.network"}, cfg);
  if (root.has("losses")) parse_losses({root.raw("losses"), "$.losses"}, cfg);
  if (root.has("metrics")) parse_metrics({root.raw("metrics"), "$.metrics"}, cfg);
  root.finish();
  return cfg;
}

GlobalConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error::io("cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

}  // namespace rainsd
