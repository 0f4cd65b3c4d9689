#include "core/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/streaks.hpp"

namespace rainsd {

namespace {

using nlohmann::json;

Weather parse_weather(const std::string& v) {
  if (v == "clear") return Weather::clear;
  if (v == "rainy") return Weather::rainy;
  return Weather::other;
}

TimeOfDay parse_timeofday(const std::string& v) {
  if (v == "daytime") return TimeOfDay::daytime;
  if (v == "night") return TimeOfDay::night;
  return TimeOfDay::other;
}

std::string format_rate(double rate) {
  std::ostringstream os;
  os << rate;
  return os.str();
}

/// "a/b/img.png" + rate 20 -> "img_r20.png" under the given split directory.
std::string synth_output_name(const std::string& dir, const std::string& source,
                              double rate) {
  const std::filesystem::path p(source);
  return dir + "/" + p.stem().string() + "_r" + format_rate(rate) +
         p.extension().string();
}

std::string copy_output_name(const std::string& dir, const std::string& source) {
  return dir + "/" + std::filesystem::path(source).filename().string();
}

void seeded_shuffle(std::vector<std::size_t>& indices, std::uint64_t seed) {
  Xoshiro256ss rng(seed);
  for (std::size_t i = indices.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(indices[i - 1], indices[j]);
  }
}

json entry_to_json(const ManifestEntry& e) {
  json record{{"output", e.output_path},
              {"source", e.source_path},
              {"split", split_name(e.split)}};
  if (e.rate) record["rate"] = *e.rate;
  if (e.seed) record["seed"] = *e.seed;
  return record;
}

ManifestEntry entry_from_json(const json& record, std::size_t line_no) {
  try {
    ManifestEntry e;
    e.output_path = record.at("output").get<std::string>();
    e.source_path = record.at("source").get<std::string>();
    e.split = parse_split(record.at("split").get<std::string>());
    if (record.contains("rate")) e.rate = record["rate"].get<double>();
    if (record.contains("seed")) e.seed = record["seed"].get<std::uint64_t>();
    return e;
  } catch (const json::exception& ex) {
    throw Error::format("manifest line " + std::to_string(line_no) + ": " + ex.what());
  }
}

}  // namespace

std::string split_name(Split s) {
  switch (s) {
    case Split::train_a: return "trainA";
    case Split::train_b: return "trainB";
    case Split::test_a: return "testA";
    case Split::eval_clear: return "eval_clear";
    case Split::eval_rainy: return "eval_rainy";
  }
  throw Error::internal("unreachable split value");
}

Split parse_split(const std::string& name) {
  if (name == "trainA") return Split::train_a;
  if (name == "trainB") return Split::train_b;
  if (name == "testA") return Split::test_a;
  if (name == "eval_clear") return Split::eval_clear;
  if (name == "eval_rainy") return Split::eval_rainy;
  throw Error::format("unknown split '" + name + "'");
}

std::size_t DatasetManifest::count(Split s) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [s](const auto& e) { return e.split == s; }));
}

std::vector<FrameAttributes> ingest_attributes(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error::io("cannot open annotation file " + file.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error::format("bad annotation file " + file.string() + ": " + e.what());
  }
  if (!doc.is_array()) {
    throw Error::format("annotation file must be a JSON array: " + file.string());
  }
  std::vector<FrameAttributes> attrs;
  attrs.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& record = doc[i];
    if (!record.is_object() || !record.contains("name") || !record["name"].is_string()) {
      throw Error::format("annotation record " + std::to_string(i) +
                          " is malformed (missing string 'name')");
    }
    FrameAttributes a;
    a.name = record["name"].get<std::string>();
    if (record.contains("attributes")) {
      const json& ra = record["attributes"];
      if (!ra.is_object()) {
        throw Error::format("annotation record " + std::to_string(i) +
                            " has a non-object 'attributes'");
      }
      if (ra.contains("weather") && ra["weather"].is_string()) {
        a.weather = parse_weather(ra["weather"].get<std::string>());
      }
      if (ra.contains("timeofday") && ra["timeofday"].is_string()) {
        a.timeofday = parse_timeofday(ra["timeofday"].get<std::string>());
      }
    }
    attrs.push_back(std::move(a));
  }
  return attrs;
}

DatasetManifest plan_splits(const std::vector<FrameAttributes>& attrs,
                            const SplitPlan& plan) {
  if (plan.n_rainy_sources > 0 && plan.rates.empty()) {
    throw Error::invalid("plan has rainy sources but an empty rate sweep");
  }
  for (double r : plan.rates) {
    if (r < 0.0) throw Error::invalid("rates must be >= 0");
  }

  std::vector<std::size_t> rainy_pool, clear_pool;
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i].weather == Weather::rainy) rainy_pool.push_back(i);
    if (attrs[i].weather == Weather::clear) clear_pool.push_back(i);
  }
  const std::uint64_t clear_needed = plan.n_clear_train + plan.n_test_clear;
  if (rainy_pool.size() < plan.n_rainy_sources) {
    throw Error::invalid("insufficient rainy sources: required " +
                         std::to_string(plan.n_rainy_sources) + ", available " +
                         std::to_string(rainy_pool.size()));
  }
  if (clear_pool.size() < clear_needed) {
    throw Error::invalid("insufficient clear sources: required " +
                         std::to_string(clear_needed) + ", available " +
                         std::to_string(clear_pool.size()));
  }

  seeded_shuffle(rainy_pool, mix_seed(plan.master_seed, fnv1a64("rainy")));
  seeded_shuffle(clear_pool, mix_seed(plan.master_seed, fnv1a64("clear")));

  DatasetManifest manifest;
  auto add_synth = [&](Split split, const std::string& dir, const std::string& source,
                       double rate) {
    ManifestEntry e;
    e.output_path = synth_output_name(dir, source, rate);
    e.source_path = source;
    e.split = split;
    e.rate = rate;
    e.seed = mix_seed(plan.master_seed, fnv1a64(e.output_path));
    manifest.entries.push_back(std::move(e));
  };
  auto add_copy = [&](Split split, const std::string& dir, const std::string& source) {
    ManifestEntry e;
    e.output_path = copy_output_name(dir, source);
    e.source_path = source;
    e.split = split;
    manifest.entries.push_back(std::move(e));
  };

  for (std::uint64_t i = 0; i < plan.n_rainy_sources; ++i) {
    const std::string& source = attrs[rainy_pool[i]].name;
    for (double rate : plan.rates) add_synth(Split::train_b, "trainB", source, rate);
  }
  for (std::uint64_t i = 0; i < plan.n_clear_train; ++i) {
    add_copy(Split::train_a, "trainA", attrs[clear_pool[i]].name);
  }
  for (std::uint64_t i = 0; i < plan.n_test_clear; ++i) {
    const std::string& source = attrs[clear_pool[plan.n_clear_train + i]].name;
    add_copy(Split::test_a, "testA", source);
    if (!plan.rates.empty()) {
      add_copy(Split::eval_clear, "eval/clear", source);
      add_synth(Split::eval_rainy, "eval/rainy", source,
                plan.rates[i % plan.rates.size()]);
    }
  }

  std::set<std::string> seen;
  for (const auto& e : manifest.entries) {
    if (!seen.insert(e.output_path).second) {
      throw Error::invalid("duplicate output path in plan: " + e.output_path);
    }
  }
  return manifest;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error::io("cannot write " + path.string());
  for (const auto& e : manifest.entries) out << entry_to_json(e).dump() << '\n';
  if (!out) throw Error::io("short write to " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error::io("cannot open manifest " + path.string());
  DatasetManifest manifest;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw Error::format("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    manifest.entries.push_back(entry_from_json(record, line_no));
  }
  return manifest;
}

ExecutionReport materialize(const DatasetManifest& manifest, const MaterializeConfig& cfg) {
  if (cfg.output_root.empty()) throw Error::invalid("output root is empty");
  std::filesystem::create_directories(cfg.output_root);

  // Previously recorded entries; a matching record plus an existing output
  // file marks an entry as done.
  std::map<std::string, ManifestEntry> recorded;
  const auto manifest_path = cfg.output_root / "manifest.jsonl";
  if (std::filesystem::exists(manifest_path)) {
    for (auto& e : read_manifest(manifest_path).entries) {
      recorded.emplace(e.output_path, std::move(e));
    }
  }

  ExecutionReport report;
  std::mutex report_mutex;
  parallel_for(manifest.entries.size(), cfg.threads, [&](std::size_t i) {
    const ManifestEntry& entry = manifest.entries[i];
    const auto out_path = cfg.output_root / entry.output_path;
    try {
      const auto prior = recorded.find(entry.output_path);
      if (prior != recorded.end() && prior->second == entry &&
          std::filesystem::exists(out_path)) {
        const std::lock_guard<std::mutex> lock(report_mutex);
        ++report.skipped;
        return;
      }
      std::filesystem::create_directories(out_path.parent_path());
      const auto src_path = cfg.images_root / entry.source_path;
      if (entry.rate) {
        const ImageBuffer source = load_image(src_path);
        const RainLayerSpec spec =
            resolve_spec({*entry.rate}, cfg.geometry, source.width(), source.height(),
                         entry.seed.value_or(0), cfg.count_model);
        ImageBuffer result = composite(source, generate_layer(spec));
        if (cfg.network && cfg.weights_dir) {
          result = translate(*cfg.network, source, result, cfg.weights_dir,
                             mix_seed(cfg.noise_seed, fnv1a64(entry.output_path)));
        }
        save_image(result, out_path);
      } else {
        if (!std::filesystem::exists(src_path)) {
          throw Error::io("source file missing: " + src_path.string());
        }
        std::filesystem::copy_file(src_path, out_path,
                                   std::filesystem::copy_options::overwrite_existing);
      }
      const std::lock_guard<std::mutex> lock(report_mutex);
      ++report.processed;
    } catch (const std::exception& e) {
      const std::lock_guard<std::mutex> lock(report_mutex);
      ++report.failed;
      report.failures.push_back({entry.output_path, e.what()});
    }
  });

  // Keep failure order stable regardless of worker scheduling.
  std::sort(report.failures.begin(), report.failures.end(),
            [](const auto& a, const auto& b) { return a.output_path < b.output_path; });
  write_manifest(manifest, manifest_path);
  return report;
}

}  // namespace rainsd
