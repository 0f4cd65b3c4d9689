// rainsd command-line tool. Talks to the toolkit exclusively through the
// public C API in rainsd.h; everything else here is flag parsing and output
// formatting.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rainsd.h"

namespace {

bool g_quiet = false;

void log_info(const std::string& msg) {
  if (!g_quiet) std::cerr << "[info] " << msg << "\n";
}

void log_error(const std::string& msg) { std::cerr << "[error] " << msg << "\n"; }

// Operational failure: report and signal exit code 1.
struct CommandError {
  std::string message;
};

// Flag-combination failure: report and signal exit code 2.
struct UsageError {
  std::string message;
};

void check(rainsd_status status, const std::string& what) {
  if (status != RAINSD_OK) {
    throw CommandError{what + ": " + rainsd_last_error()};
  }
}

using ConfigHandle = std::unique_ptr<rainsd_config, decltype(&rainsd_config_free)>;
using ImageHandle = std::unique_ptr<rainsd_image, decltype(&rainsd_image_free)>;
using TensorHandle = std::unique_ptr<rainsd_tensor, decltype(&rainsd_tensor_free)>;

ConfigHandle load_config(const std::string& path) {
  rainsd_config* cfg = nullptr;
  check(rainsd_config_load(path.empty() ? nullptr : path.c_str(), &cfg),
        path.empty() ? "loading default config" : "loading config " + path);
  return {cfg, rainsd_config_free};
}

ImageHandle load_image(const std::string& path) {
  rainsd_image* img = nullptr;
  check(rainsd_image_load(path.c_str(), &img), "loading " + path);
  return {img, rainsd_image_free};
}

TensorHandle load_tensor(const std::string& path) {
  rainsd_tensor* t = nullptr;
  check(rainsd_tensor_read(path.c_str(), &t), "loading " + path);
  return {t, rainsd_tensor_free};
}

struct RainArgs {
  std::string input, output, config, dump_layer;
  double rate = 0.0;
  std::uint64_t seed = 0;
};

void run_rain(const RainArgs& args) {
  const ConfigHandle cfg = load_config(args.config);
  const ImageHandle input = load_image(args.input);
  rainsd_image* rained = nullptr;
  check(rainsd_rain_apply(cfg.get(), input.get(), args.rate, args.seed, &rained),
        "applying rain");
  const ImageHandle output(rained, rainsd_image_free);
  check(rainsd_image_save(output.get(), args.output.c_str()), "saving " + args.output);
  if (!args.dump_layer.empty()) {
    check(rainsd_rain_dump_layer(cfg.get(), rainsd_image_width(input.get()),
                                 rainsd_image_height(input.get()), args.rate, args.seed,
                                 args.dump_layer.c_str()),
          "dumping layer");
  }
  log_info("wrote " + args.output);
}

struct FadainArgs {
  std::string content, style, output;
  double epsilon = 0.0;  // 0 = library default
};

void run_fadain(const FadainArgs& args) {
  const TensorHandle content = load_tensor(args.content);
  const TensorHandle style = load_tensor(args.style);
  rainsd_tensor* result = nullptr;
  check(rainsd_fadain(content.get(), style.get(), args.epsilon, &result), "fadain");
  const TensorHandle output(result, rainsd_tensor_free);
  check(rainsd_tensor_write(output.get(), args.output.c_str()), "saving " + args.output);
  log_info("wrote " + args.output);
}

struct TranslateArgs {
  std::string content, style, weights, output, config;
  std::uint64_t seed = 0;
};

void run_translate(const TranslateArgs& args) {
  const ConfigHandle cfg = load_config(args.config);
  const ImageHandle content = load_image(args.content);
  const ImageHandle style = load_image(args.style);
  rainsd_image* generated = nullptr;
  check(rainsd_translate(cfg.get(), content.get(), style.get(),
                         args.weights.empty() ? nullptr : args.weights.c_str(), args.seed,
                         &generated),
        "translating");
  const ImageHandle output(generated, rainsd_image_free);
  check(rainsd_image_save(output.get(), args.output.c_str()), "saving " + args.output);
  log_info("wrote " + args.output);
}

struct PipelineArgs {
  std::string annotations, images, output, plan, report;
  bool dry_run = false;
  int threads = 0;
};

void run_pipeline(const PipelineArgs& args) {
  if (!args.dry_run && (args.images.empty() || args.output.empty())) {
    throw UsageError{"--images and --out are required unless --dry-run is given"};
  }
  const ConfigHandle cfg = load_config(args.plan);
  rainsd_pipeline_report report{};
  check(rainsd_pipeline_run(cfg.get(), args.annotations.c_str(),
                            args.images.empty() ? nullptr : args.images.c_str(),
                            args.output.empty() ? nullptr : args.output.c_str(),
                            args.dry_run ? 1 : 0, args.threads,
                            args.report.empty() ? nullptr : args.report.c_str(), &report),
        "pipeline");
  std::ostringstream os;
  os << "planned " << report.planned_total << " entries (trainA " << report.planned_train_a
     << ", trainB " << report.planned_train_b << ", testA " << report.planned_test_a
     << ")";
  log_info(os.str());
  if (!args.dry_run) {
    std::ostringstream run;
    run << "processed " << report.processed << ", skipped " << report.skipped
        << ", failed " << report.failed;
    log_info(run.str());
    if (report.failed > 0) {
      throw CommandError{"pipeline finished with " + std::to_string(report.failed) +
                         " failed entries"};
    }
  }
}

struct ProbeArgs {
  std::string features, baseline, output;
};

void run_probe(const ProbeArgs& args) {
  check(rainsd_probe_run(args.features.c_str(),
                         args.baseline.empty() ? nullptr : args.baseline.c_str(),
                         args.output.c_str()),
        "probe");
  if (!g_quiet) {
    std::ifstream report(args.output);
    std::cout << report.rdbuf();
  }
  log_info("wrote " + args.output + " and " + args.output + ".csv");
}

struct EvalArgs {
  std::string preds, gts, masks_pred, masks_gt, config, report;
};

void print_eval_table(const rainsd_eval_report& r) {
  std::printf("%-28s%12s%12s\n", "", "Recall (%)", "mAP (%)");
  if (r.recall_defined) {
    std::printf("%-28s%12.2f%12.2f\n", "Traffic object detection", r.recall_pct,
                r.map_pct);
  } else {
    std::printf("%-28s%12s%12s\n", "Traffic object detection", "n/a", "n/a");
  }
  if (r.seg_defined) {
    std::printf("%-28s%12s%12s\n", "", "mIoU (%)", "Acc. (%)");
    std::printf("%-28s%12.2f%12.2f\n", "Segmentation", r.miou_pct, r.accuracy_pct);
  }
}

void run_eval(const EvalArgs& args) {
  if (args.masks_pred.empty() != args.masks_gt.empty()) {
    throw UsageError{"--masks-pred and --masks-gt must be given together"};
  }
  const ConfigHandle cfg = load_config(args.config);
  rainsd_eval_report report{};
  check(rainsd_eval_run(cfg.get(), args.preds.c_str(), args.gts.c_str(),
                        args.masks_pred.empty() ? nullptr : args.masks_pred.c_str(),
                        args.masks_gt.empty() ? nullptr : args.masks_gt.c_str(), &report),
        "eval");
  if (!g_quiet) print_eval_table(report);
  if (!args.report.empty()) {
    std::ofstream out(args.report, std::ios::trunc);
    if (!out) throw CommandError{"cannot write report " + args.report};
    out << "{\n"
        << "  \"recall_pct\": " << report.recall_pct << ",\n"
        << "  \"map_pct\": " << report.map_pct << ",\n"
        << "  \"miou_pct\": " << report.miou_pct << ",\n"
        << "  \"accuracy_pct\": " << report.accuracy_pct << ",\n"
        << "  \"recall_defined\": " << (report.recall_defined ? "true" : "false") << ",\n"
        << "  \"map_defined\": " << (report.map_defined ? "true" : "false") << ",\n"
        << "  \"seg_defined\": " << (report.seg_defined ? "true" : "false") << "\n"
        << "}\n";
  }
}

struct LossCheckArgs {
  std::string report;
  std::uint64_t seed = 0;
};

void run_loss_check(const LossCheckArgs& args) {
  char* table = nullptr;
  std::int32_t failures = 0;
  check(rainsd_loss_check(args.seed, &table, &failures), "loss-check");
  const std::unique_ptr<char, decltype(&rainsd_string_free)> guard(table,
                                                                   rainsd_string_free);
  std::cout << table;
  if (!args.report.empty()) {
    std::ofstream out(args.report, std::ios::trunc);
    if (!out) throw CommandError{"cannot write report " + args.report};
    out << "{ \"failures\": " << failures << " }\n";
  }
  if (failures > 0) {
    throw CommandError{std::to_string(failures) + " loss checks failed"};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rainfall-parameterized rain synthesis and evaluation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.add_flag("--quiet", g_quiet, "suppress informational logging");

  RainArgs rain;
  auto* rain_cmd = app.add_subcommand("rain", "composite rain streaks onto an image");
  rain_cmd->add_option("--in", rain.input, "input image (png/ppm)")->required();
  rain_cmd->add_option("--out", rain.output, "output image")->required();
  rain_cmd->add_option("--rate", rain.rate, "rainfall rate in mm/h")->required();
  rain_cmd->add_option("--seed", rain.seed, "layer seed");
  rain_cmd->add_option("--config", rain.config, "config file");
  rain_cmd->add_option("--dump-layer", rain.dump_layer, "write segments as text");

  FadainArgs fadain;
  auto* fadain_cmd =
      app.add_subcommand("fadain", "transfer per-channel feature statistics");
  fadain_cmd->add_option("--content", fadain.content, "content tensor (rsdt)")->required();
  fadain_cmd->add_option("--style", fadain.style, "style tensor (rsdt)")->required();
  fadain_cmd->add_option("--out", fadain.output, "output tensor")->required();
  fadain_cmd->add_option("--epsilon", fadain.epsilon, "denominator guard (default 1e-5)");

  TranslateArgs translate;
  auto* translate_cmd =
      app.add_subcommand("translate", "two-stream style translation forward pass");
  translate_cmd->add_option("--content", translate.content, "content image")->required();
  translate_cmd->add_option("--style", translate.style, "style image")->required();
  translate_cmd->add_option("--weights", translate.weights, "weight directory");
  translate_cmd->add_option("--seed", translate.seed, "noise seed");
  translate_cmd->add_option("--out", translate.output, "output image")->required();
  translate_cmd->add_option("--config", translate.config, "config file");

  PipelineArgs pipeline;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "build a dataset from a plan");
  pipeline_cmd->add_option("--annotations", pipeline.annotations, "BDD-style json")
      ->required();
  pipeline_cmd->add_option("--images", pipeline.images, "source image root");
  pipeline_cmd->add_option("--out", pipeline.output, "output root");
  pipeline_cmd->add_option("--plan", pipeline.plan, "plan config file");
  pipeline_cmd->add_flag("--dry-run", pipeline.dry_run, "plan and count, write nothing");
  pipeline_cmd->add_option("--threads", pipeline.threads,
                           "worker cap (default: RAINSD_THREADS or auto)");
  pipeline_cmd->add_option("--report", pipeline.report, "write a json report");

  ProbeArgs probe;
  auto* probe_cmd = app.add_subcommand("probe", "per-layer style distribution report");
  probe_cmd->add_option("--features", probe.features, "directory of f<k>.rsdt")->required();
  probe_cmd->add_option("--baseline", probe.baseline, "baseline feature directory");
  probe_cmd->add_option("--out", probe.output, "report path")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "detection/segmentation metrics");
  eval_cmd->add_option("--preds", eval.preds, "prediction records (jsonl)")->required();
  eval_cmd->add_option("--gts", eval.gts, "ground-truth records (jsonl)")->required();
  eval_cmd->add_option("--masks-pred", eval.masks_pred, "predicted label images");
  eval_cmd->add_option("--masks-gt", eval.masks_gt, "ground-truth label images");
  eval_cmd->add_option("--config", eval.config, "config file");
  eval_cmd->add_option("--report", eval.report, "write a json report");

  LossCheckArgs loss_check;
  auto* loss_cmd = app.add_subcommand("loss-check", "run the loss invariant suite");
  loss_cmd->add_option("--seed", loss_check.seed, "suite seed");
  loss_cmd->add_option("--report", loss_check.report, "write a json report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "[error] " << e.what() << "\n";
    for (const auto& extra : app.remaining(true)) {
      std::cerr << "[error] unknown argument or subcommand: " << extra << "\n";
    }
    std::cerr << "run 'rainsd --help' for usage\n";
    return 2;
  }

  try {
    if (rain_cmd->parsed()) run_rain(rain);
    if (fadain_cmd->parsed()) run_fadain(fadain);
    if (translate_cmd->parsed()) run_translate(translate);
    if (pipeline_cmd->parsed()) run_pipeline(pipeline);
    if (probe_cmd->parsed()) run_probe(probe);
    if (eval_cmd->parsed()) run_eval(eval);
    if (loss_cmd->parsed()) run_loss_check(loss_check);
  } catch (const UsageError& e) {
    log_error(e.message);
    std::cerr << "run 'rainsd --help' for usage\n";
    return 2;
  } catch (const CommandError& e) {
    log_error(e.message);
    return 1;
  }
  return 0;
}
