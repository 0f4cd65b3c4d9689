#include "rainsd.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include <nlohmann/json.hpp>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/fadain.hpp"
#include "core/image.hpp"
#include "core/losses.hpp"
#include "core/metrics.hpp"
#include "core/network.hpp"
#include "core/pipeline.hpp"
#include "core/probe.hpp"
#include "core/streaks.hpp"
#include "core/tensor.hpp"

struct rainsd_image {
  rainsd::ImageBuffer buffer;
};

struct rainsd_tensor {
  rainsd::Tensor tensor;
};

struct rainsd_config {
  rainsd::GlobalConfig config;
};

namespace {

thread_local std::string g_last_error;

rainsd_status status_for(const rainsd::Error& e) {
  switch (e.kind()) {
    case rainsd::ErrorKind::invalid_argument: return RAINSD_ERR_INVALID_ARGUMENT;
    case rainsd::ErrorKind::io: return RAINSD_ERR_IO;
    case rainsd::ErrorKind::format: return RAINSD_ERR_FORMAT;
    case rainsd::ErrorKind::internal: return RAINSD_ERR_INTERNAL;
  }
  return RAINSD_ERR_INTERNAL;
}

/// Runs fn, translating exceptions into status codes + the thread-local
/// message. No exception escapes the C boundary.
template <typename Fn>
rainsd_status guarded(Fn&& fn) {
  try {
    fn();
    return RAINSD_OK;
  } catch (const rainsd::Error& e) {
    g_last_error = e.what();
    return status_for(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RAINSD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RAINSD_ERR_INTERNAL;
  }
}

rainsd_status require(bool ok, const char* message) {
  if (ok) return RAINSD_OK;
  g_last_error = message;
  return RAINSD_ERR_INVALID_ARGUMENT;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RAINSD_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // auto
}

}  // namespace

extern "C" {

const char* rainsd_last_error(void) { return g_last_error.c_str(); }

const char* rainsd_version(void) { return "0.1.0"; }

rainsd_status rainsd_image_load(const char* path, rainsd_image** out) {
  if (auto s = require(path && out, "path and out must be non-null")) return s;
  return guarded([&] { *out = new rainsd_image{rainsd::load_image(path)}; });
}

rainsd_status rainsd_image_save(const rainsd_image* img, const char* path) {
  if (auto s = require(img && path, "image and path must be non-null")) return s;
  return guarded([&] { rainsd::save_image(img->buffer, path); });
}

rainsd_status rainsd_image_create(int32_t width, int32_t height,
                                  const uint8_t* rgb_or_null, rainsd_image** out) {
  if (auto s = require(out != nullptr, "out must be non-null")) return s;
  return guarded([&] {
    if (rgb_or_null) {
      const std::size_t n = static_cast<std::size_t>(width) * height * 3;
      *out = new rainsd_image{
          rainsd::ImageBuffer(width, height,
                              std::vector<std::uint8_t>(rgb_or_null, rgb_or_null + n))};
    } else {
      *out = new rainsd_image{rainsd::ImageBuffer(width, height)};
    }
  });
}

int32_t rainsd_image_width(const rainsd_image* img) {
  return img ? img->buffer.width() : 0;
}

int32_t rainsd_image_height(const rainsd_image* img) {
  return img ? img->buffer.height() : 0;
}

const uint8_t* rainsd_image_pixels(const rainsd_image* img) {
  return img ? img->buffer.bytes().data() : nullptr;
}

void rainsd_image_free(rainsd_image* img) { delete img; }

rainsd_status rainsd_config_load(const char* path_or_null, rainsd_config** out) {
  if (auto s = require(out != nullptr, "out must be non-null")) return s;
  return guarded([&] {
    *out = new rainsd_config{path_or_null ? rainsd::load_config(path_or_null)
                                          : rainsd::default_config()};
  });
}

void rainsd_config_free(rainsd_config* cfg) { delete cfg; }

rainsd_status rainsd_rain_apply(const rainsd_config* cfg, const rainsd_image* in,
                                double rate_mm_per_h, uint64_t seed,
                                rainsd_image** out) {
  if (auto s = require(cfg && in && out, "cfg, in and out must be non-null")) return s;
  return guarded([&] {
    const auto spec = rainsd::resolve_spec({rate_mm_per_h}, cfg->config.rain_geometry,
                                           in->buffer.width(), in->buffer.height(), seed,
                                           cfg->config.rain_model);
    *out = new rainsd_image{rainsd::composite(in->buffer, rainsd::generate_layer(spec))};
  });
}

rainsd_status rainsd_rain_dump_layer(const rainsd_config* cfg, int32_t width,
                                     int32_t height, double rate_mm_per_h,
                                     uint64_t seed, const char* path) {
  if (auto s = require(cfg && path, "cfg and path must be non-null")) return s;
  return guarded([&] {
    const auto spec = rainsd::resolve_spec({rate_mm_per_h}, cfg->config.rain_geometry,
                                           width, height, seed, cfg->config.rain_model);
    rainsd::write_layer_text(rainsd::generate_layer(spec), path);
  });
}

rainsd_status rainsd_tensor_read(const char* path, rainsd_tensor** out) {
  if (auto s = require(path && out, "path and out must be non-null")) return s;
  return guarded([&] { *out = new rainsd_tensor{rainsd::read_tensor(path)}; });
}

rainsd_status rainsd_tensor_write(const rainsd_tensor* t, const char* path) {
  if (auto s = require(t && path, "tensor and path must be non-null")) return s;
  return guarded([&] { rainsd::write_tensor(t->tensor, path); });
}

rainsd_status rainsd_tensor_create(const uint64_t* extents, uint32_t rank,
                                   const float* data_or_null, rainsd_tensor** out) {
  if (auto s = require(extents && out, "extents and out must be non-null")) return s;
  return guarded([&] {
    std::vector<std::uint64_t> shape(extents, extents + rank);
    if (data_or_null) {
      std::size_t n = 1;
      for (auto e : shape) n *= static_cast<std::size_t>(e);
      *out = new rainsd_tensor{
          rainsd::Tensor(std::move(shape), std::vector<float>(data_or_null, data_or_null + n))};
    } else {
      *out = new rainsd_tensor{rainsd::Tensor(std::move(shape))};
    }
  });
}

uint32_t rainsd_tensor_rank(const rainsd_tensor* t) {
  return t ? static_cast<uint32_t>(t->tensor.rank()) : 0;
}

uint64_t rainsd_tensor_extent(const rainsd_tensor* t, uint32_t axis) {
  if (!t || axis >= t->tensor.rank()) return 0;
  return t->tensor.shape()[axis];
}

const float* rainsd_tensor_data(const rainsd_tensor* t) {
  return t ? t->tensor.data().data() : nullptr;
}

void rainsd_tensor_free(rainsd_tensor* t) { delete t; }

rainsd_status rainsd_fadain(const rainsd_tensor* content, const rainsd_tensor* style,
                            double epsilon, rainsd_tensor** out) {
  if (auto s = require(content && style && out, "content, style and out must be non-null"))
    return s;
  return guarded([&] {
    rainsd::FadainConfig cfg;
    if (epsilon > 0.0) cfg.epsilon = epsilon;
    *out = new rainsd_tensor{rainsd::fadain(content->tensor, style->tensor, cfg)};
  });
}

rainsd_status rainsd_translate(const rainsd_config* cfg, const rainsd_image* content,
                               const rainsd_image* style,
                               const char* weights_dir_or_null, uint64_t seed,
                               rainsd_image** out) {
  if (auto s = require(cfg && content && style && out,
                       "cfg, content, style and out must be non-null"))
    return s;
  return guarded([&] {
    std::optional<std::filesystem::path> weights;
    if (weights_dir_or_null) weights = weights_dir_or_null;
    *out = new rainsd_image{rainsd::translate(cfg->config.network, content->buffer,
                                              style->buffer, weights, seed)};
  });
}

rainsd_status rainsd_pipeline_run(const rainsd_config* cfg, const char* annotations,
                                  const char* images_dir, const char* out_dir,
                                  int dry_run, int threads,
                                  const char* report_json_or_null,
                                  rainsd_pipeline_report* report) {
  if (auto s = require(cfg && annotations && report, "cfg, annotations and report must be non-null"))
    return s;
  if (auto s = require(dry_run || (images_dir && out_dir),
                       "images_dir and out_dir are required unless dry_run"))
    return s;
  return guarded([&] {
    const auto attrs = rainsd::ingest_attributes(annotations);
    const auto manifest = rainsd::plan_splits(attrs, cfg->config.plan);
    *report = {};
    report->planned_total = manifest.entries.size();
    report->planned_train_a = manifest.count(rainsd::Split::train_a);
    report->planned_train_b = manifest.count(rainsd::Split::train_b);
    report->planned_test_a = manifest.count(rainsd::Split::test_a);

    rainsd::ExecutionReport exec;
    if (!dry_run) {
      rainsd::MaterializeConfig mat;
      mat.images_root = images_dir;
      mat.output_root = out_dir;
      mat.count_model = cfg->config.rain_model;
      mat.geometry = cfg->config.rain_geometry;
      if (cfg->config.weights_dir) {
        mat.network = cfg->config.network;
        mat.weights_dir = cfg->config.weights_dir;
        mat.noise_seed = cfg->config.seed;
      }
      mat.threads = resolve_threads(threads);
      exec = rainsd::materialize(manifest, mat);
      report->processed = exec.processed;
      report->skipped = exec.skipped;
      report->failed = exec.failed;
    }

    if (report_json_or_null) {
      nlohmann::json failures = nlohmann::json::array();
      for (const auto& f : exec.failures) {
        failures.push_back({{"output", f.output_path}, {"error", f.message}});
      }
      const nlohmann::json doc{{"planned_total", report->planned_total},
                               {"planned_trainA", report->planned_train_a},
                               {"planned_trainB", report->planned_train_b},
                               {"planned_testA", report->planned_test_a},
                               {"dry_run", dry_run != 0},
                               {"processed", report->processed},
                               {"skipped", report->skipped},
                               {"failed", report->failed},
                               {"failures", failures}};
      std::ofstream out(report_json_or_null, std::ios::trunc);
      if (!out) throw rainsd::Error::io(std::string("cannot write report ") + report_json_or_null);
      out << doc.dump(2) << "\n";
    }
  });
}

rainsd_status rainsd_probe_run(const char* features_dir,
                               const char* baseline_dir_or_null,
                               const char* out_path) {
  if (auto s = require(features_dir && out_path, "features_dir and out_path must be non-null"))
    return s;
  return guarded([&] {
    const auto probed = rainsd::probe(rainsd::load_feature_dir(features_dir));
    std::string table;
    rainsd::ComparisonReport cmp;
    const rainsd::ComparisonReport* cmp_ptr = nullptr;
    if (baseline_dir_or_null) {
      const auto baseline =
          rainsd::probe(rainsd::load_feature_dir(baseline_dir_or_null));
      cmp = rainsd::compare(probed, baseline);
      table = rainsd::render_comparison_table(probed, baseline, cmp);
      cmp_ptr = &cmp;
    } else {
      table = rainsd::render_probe_table(probed);
    }
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw rainsd::Error::io(std::string("cannot write report ") + out_path);
    out << table;
    rainsd::write_probe_csv(probed, cmp_ptr, std::string(out_path) + ".csv");
  });
}

rainsd_status rainsd_eval_run(const rainsd_config* cfg, const char* predictions,
                              const char* ground_truth,
                              const char* masks_pred_dir_or_null,
                              const char* masks_gt_dir_or_null,
                              rainsd_eval_report* out) {
  if (auto s = require(cfg && predictions && ground_truth && out,
                       "cfg, predictions, ground_truth and out must be non-null"))
    return s;
  if (auto s = require((masks_pred_dir_or_null == nullptr) == (masks_gt_dir_or_null == nullptr),
                       "mask directories must be given together"))
    return s;
  return guarded([&] {
    *out = {};
    const auto preds = rainsd::read_detections(predictions, /*with_score=*/true);
    const auto gts = rainsd::read_detections(ground_truth, /*with_score=*/false);
    const auto det =
        rainsd::detection_metrics(preds, gts, cfg->config.metrics.iou_threshold);
    out->recall_pct = det.recall_pct;
    out->map_pct = det.map_pct;
    out->recall_defined = det.recall_defined ? 1 : 0;
    out->map_defined = det.map_defined ? 1 : 0;
    if (masks_pred_dir_or_null) {
      const auto seg = rainsd::segmentation_metrics(
          rainsd::read_mask_dir(masks_pred_dir_or_null),
          rainsd::read_mask_dir(masks_gt_dir_or_null), cfg->config.metrics.num_classes);
      out->miou_pct = seg.miou_pct;
      out->accuracy_pct = seg.accuracy_pct;
      out->seg_defined = 1;
    }
  });
}

rainsd_status rainsd_loss_check(uint64_t seed, char** table_out, int32_t* failures_out) {
  if (auto s = require(table_out && failures_out, "table_out and failures_out must be non-null"))
    return s;
  return guarded([&] {
    const auto checks = rainsd::loss_check_suite(seed);
    const std::string table = rainsd::render_check_table(checks);
    std::int32_t failures = 0;
    for (const auto& c : checks) {
      if (!c.passed) ++failures;
    }
    char* copy = static_cast<char*>(std::malloc(table.size() + 1));
    if (!copy) throw std::bad_alloc();
    std::memcpy(copy, table.c_str(), table.size() + 1);
    *table_out = copy;
    *failures_out = failures;
  });
}

void rainsd_string_free(char* s) { std::free(s); }

}  // extern "C"
