#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "core/image.hpp"
#include "core/network.hpp"
#include "core/rng.hpp"
#include "core/tensor.hpp"
#include "test_util.hpp"

using namespace rainsd;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

CliResult run_cli(const std::string& args, const std::filesystem::path& scratch,
                  bool raw_command = false) {
  const auto out_path = scratch / "stdout.txt";
  const auto err_path = scratch / "stderr.txt";
  const std::string cmd = (raw_command ? args
                                       : std::string(RAINSD_CLI_PATH) + " " + args) +
                          " > " + out_path.string() + " 2> " + err_path.string();
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

void write_random_image(const std::filesystem::path& path, int w, int h,
                        std::uint64_t seed) {
  Xoshiro256ss rng(seed);
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h * 3);
  for (auto& b : data) b = static_cast<std::uint8_t>(rng.next_below(256));
  save_image(ImageBuffer(w, h, data), path);
}

}  // namespace

TEST_CASE("rain subcommand happy path is deterministic") {
  test::TempDir dir("cli_rain");
  write_random_image(dir / "in.ppm", 32, 32, 1);
  // rate 800 so the default model derives a non-empty layer at 32x32
  const std::string base = "rain --in " + (dir / "in.ppm").string() + " --rate 800 --seed 7";
  auto first = run_cli(base + " --out " + (dir / "a.png").string() + " --dump-layer " +
                           (dir / "layer.txt").string(),
                       dir.path());
  CHECK(first.exit_code == 0);
  CHECK(std::filesystem::exists(dir / "a.png"));
  CHECK(std::filesystem::exists(dir / "layer.txt"));

  auto second = run_cli(base + " --out " + (dir / "b.png").string(), dir.path());
  CHECK(second.exit_code == 0);
  CHECK(slurp(dir / "a.png") == slurp(dir / "b.png"));

  auto reseeded = run_cli("rain --in " + (dir / "in.ppm").string() +
                              " --rate 800 --seed 8 --out " + (dir / "c.png").string(),
                          dir.path());
  CHECK(reseeded.exit_code == 0);
  CHECK(slurp(dir / "a.png") != slurp(dir / "c.png"));
}

TEST_CASE("usage errors exit with code 2") {
  test::TempDir dir("cli_usage");
  const auto unknown = run_cli("bogus", dir.path());
  CHECK(unknown.exit_code == 2);
  CHECK(unknown.err.find("bogus") != std::string::npos);

  const auto missing = run_cli("rain --rate 10 --out x.png", dir.path());
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("--in") != std::string::npos);

  const auto none = run_cli("", dir.path());
  CHECK(none.exit_code == 2);

  // Conditionally-required flags are usage errors too.
  const auto no_out = run_cli("pipeline --annotations a.json", dir.path());
  CHECK(no_out.exit_code == 2);
  const auto half_masks = run_cli(
      "eval --preds p.jsonl --gts g.jsonl --masks-pred mp", dir.path());
  CHECK(half_masks.exit_code == 2);
}

TEST_CASE("operational errors exit with code 1") {
  test::TempDir dir("cli_oper");
  const auto r = run_cli("rain --in " + (dir / "missing.ppm").string() +
                             " --rate 10 --out " + (dir / "out.ppm").string(),
                         dir.path());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("missing.ppm") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
  test::TempDir dir("cli_help");
  const auto r = run_cli("--help", dir.path());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("rain") != std::string::npos);
}

TEST_CASE("fadain subcommand transfers statistics between rsdt files") {
  test::TempDir dir("cli_fadain");
  Xoshiro256ss rng(3);
  const Tensor content = test::random_tensor(rng, {2, 4, 4});
  const Tensor style = test::random_tensor(rng, {2, 3, 5}, 2.0, 4.0);
  write_tensor(content, dir / "c.rsdt");
  write_tensor(style, dir / "s.rsdt");
  const auto r = run_cli("fadain --content " + (dir / "c.rsdt").string() + " --style " +
                             (dir / "s.rsdt").string() + " --out " +
                             (dir / "out.rsdt").string(),
                         dir.path());
  CHECK(r.exit_code == 0);
  const Tensor out = read_tensor(dir / "out.rsdt");
  const auto got = channel_stats(out);
  const auto want = channel_stats(style);
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(got.mean[c] == doctest::Approx(want.mean[c]).epsilon(1e-3));
    CHECK(got.std[c] == doctest::Approx(want.std[c]).epsilon(1e-3));
  }
}

TEST_CASE("translate subcommand writes a deterministic image") {
  test::TempDir dir("cli_translate");
  write_random_image(dir / "content.ppm", 16, 16, 4);
  write_random_image(dir / "style.ppm", 16, 16, 5);
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"network": {"levels": 2, "base_channels": 2, "seed": 11}})";
  }
  const std::string base = "translate --content " + (dir / "content.ppm").string() +
                           " --style " + (dir / "style.ppm").string() + " --seed 6" +
                           " --config " + (dir / "cfg.json").string();
  const auto a = run_cli(base + " --out " + (dir / "a.ppm").string(), dir.path());
  REQUIRE(a.exit_code == 0);
  const auto b = run_cli(base + " --out " + (dir / "b.ppm").string(), dir.path());
  REQUIRE(b.exit_code == 0);
  CHECK(slurp(dir / "a.ppm") == slurp(dir / "b.ppm"));
  const ImageBuffer img = load_image(dir / "a.ppm");
  CHECK(img.width() == 16);
  CHECK(img.height() == 16);
}

TEST_CASE("translate subcommand loads weight directories") {
  test::TempDir dir("cli_weights");
  write_random_image(dir / "content.ppm", 8, 8, 21);
  write_random_image(dir / "style.ppm", 8, 8, 22);
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"network": {"levels": 2, "base_channels": 2, "seed": 31}})";
  }
  NetworkConfig net_cfg;
  net_cfg.levels = 2;
  net_cfg.base_channels = 2;
  net_cfg.input_height = 8;
  net_cfg.input_width = 8;
  net_cfg.seed = 31;
  const TwoStreamNet net(net_cfg);
  net.save_weights(dir / "weights");

  const std::string base = "translate --content " + (dir / "content.ppm").string() +
                           " --style " + (dir / "style.ppm").string() + " --seed 2" +
                           " --config " + (dir / "cfg.json").string();
  const auto from_seed = run_cli(base + " --out " + (dir / "seeded.ppm").string(),
                                 dir.path());
  REQUIRE(from_seed.exit_code == 0);
  const auto from_dir = run_cli(base + " --weights " + (dir / "weights").string() +
                                    " --out " + (dir / "loaded.ppm").string(),
                                dir.path());
  REQUIRE(from_dir.exit_code == 0);
  // Same seed initialized the saved weights, so both paths must agree.
  CHECK(slurp(dir / "seeded.ppm") == slurp(dir / "loaded.ppm"));

  const auto missing = run_cli(base + " --weights " + (dir / "nope").string() +
                                   " --out " + (dir / "x.ppm").string(),
                               dir.path());
  CHECK(missing.exit_code == 1);
}

TEST_CASE("pipeline subcommand materializes, resumes, and dry-runs") {
  test::TempDir dir("cli_pipeline");
  std::filesystem::create_directories(dir / "img");
  std::ofstream ann(dir / "ann.json");
  ann << "[";
  for (int i = 0; i < 4; ++i) {
    if (i) ann << ",";
    const std::string name = "r" + std::to_string(i) + ".ppm";
    ann << R"({"name":")" << name << R"(","attributes":{"weather":"rainy"}})";
    write_random_image(dir / "img" / name, 16, 16, 100 + i);
  }
  ann << "]";
  ann.close();
  {
    std::ofstream plan(dir / "plan.json");
    plan << R"({"pipeline": {"n_rainy_sources": 2, "rates": [10, 20, 30],
                "n_clear_train": 0, "n_test_clear": 0, "master_seed": 5}})";
  }
  const std::string base = "pipeline --annotations " + (dir / "ann.json").string() +
                           " --images " + (dir / "img").string() + " --plan " +
                           (dir / "plan.json").string();

  const auto dry = run_cli("--quiet " + base + " --dry-run --report " +
                               (dir / "dry.json").string(),
                           dir.path());
  CHECK(dry.exit_code == 0);
  const std::string dry_report = slurp(dir / "dry.json");
  CHECK(dry_report.find("\"planned_trainB\": 6") != std::string::npos);
  CHECK(!std::filesystem::exists(dir / "out"));

  const auto first = run_cli(base + " --out " + (dir / "out").string() + " --report " +
                                 (dir / "run1.json").string(),
                             dir.path());
  CHECK(first.exit_code == 0);
  CHECK(slurp(dir / "run1.json").find("\"processed\": 6") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "out" / "manifest.jsonl"));

  const auto second = run_cli(base + " --out " + (dir / "out").string() + " --report " +
                                  (dir / "run2.json").string(),
                              dir.path());
  CHECK(second.exit_code == 0);
  const std::string rerun = slurp(dir / "run2.json");
  CHECK(rerun.find("\"processed\": 0") != std::string::npos);
  CHECK(rerun.find("\"skipped\": 6") != std::string::npos);
}

TEST_CASE("RAINSD_THREADS parallelism never changes pipeline output bytes") {
  test::TempDir dir("cli_threads");
  std::filesystem::create_directories(dir / "img");
  std::ofstream ann(dir / "ann.json");
  ann << "[";
  for (int i = 0; i < 6; ++i) {
    if (i) ann << ",";
    const std::string name = "r" + std::to_string(i) + ".ppm";
    ann << R"({"name":")" << name << R"(","attributes":{"weather":"rainy"}})";
    write_random_image(dir / "img" / name, 16, 16, 200 + i);
  }
  ann << "]";
  ann.close();
  {
    std::ofstream plan(dir / "plan.json");
    plan << R"({"rain": {"k": 40}, "pipeline": {"n_rainy_sources": 6, "rates": [30, 70],
                "n_clear_train": 0, "n_test_clear": 0, "master_seed": 8}})";
  }
  const std::string base = "pipeline --annotations " + (dir / "ann.json").string() +
                           " --images " + (dir / "img").string() + " --plan " +
                           (dir / "plan.json").string();
  const auto serial = run_cli("--quiet " + base + " --out " + (dir / "one").string() +
                                  " --threads 1",
                              dir.path());
  REQUIRE(serial.exit_code == 0);
  const auto parallel = run_cli("env RAINSD_THREADS=4 " + std::string(RAINSD_CLI_PATH) +
                                    " --quiet " + base + " --out " +
                                    (dir / "many").string(),
                                dir.path(), /*raw_command=*/true);
  REQUIRE(parallel.exit_code == 0);
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(dir / "one")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), dir / "one");
    CHECK(slurp(entry.path()) == slurp(dir / "many" / rel));
  }
}

TEST_CASE("probe subcommand reports relative changes") {
  test::TempDir dir("cli_probe");
  std::filesystem::create_directories(dir / "feat");
  std::filesystem::create_directories(dir / "base");
  Tensor probe_layer({1, 2, 2});
  for (float& v : probe_layer.data()) v = 1.79f;
  Tensor base_layer({1, 2, 2});
  for (float& v : base_layer.data()) v = 2.0f;
  write_tensor(probe_layer, dir / "feat" / "f6.rsdt");
  write_tensor(base_layer, dir / "base" / "f6.rsdt");
  const auto r = run_cli("probe --features " + (dir / "feat").string() + " --baseline " +
                             (dir / "base").string() + " --out " +
                             (dir / "report.txt").string(),
                         dir.path());
  CHECK(r.exit_code == 0);
  const std::string report = slurp(dir / "report.txt");
  CHECK(report.find("f6") != std::string::npos);
  CHECK(report.find("-10.50") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "report.txt.csv"));

  // Without a baseline the report is a plain per-layer table.
  const auto solo = run_cli("probe --features " + (dir / "feat").string() + " --out " +
                                (dir / "solo.txt").string(),
                            dir.path());
  CHECK(solo.exit_code == 0);
  const std::string solo_report = slurp(dir / "solo.txt");
  CHECK(solo_report.find("f6") != std::string::npos);
  CHECK(solo_report.find("mean") != std::string::npos);
}

TEST_CASE("eval subcommand prints the metric table and writes reports") {
  test::TempDir dir("cli_eval");
  {
    std::ofstream preds(dir / "preds.jsonl");
    preds << R"({"image_id":"a","class_id":0,"box":[0,0,10,10],"score":0.9})" << "\n";
  }
  {
    std::ofstream gts(dir / "gts.jsonl");
    gts << R"({"image_id":"a","class_id":0,"box":[0,0,10,10]})" << "\n";
  }
  std::filesystem::create_directories(dir / "mp");
  std::filesystem::create_directories(dir / "mg");
  ImageBuffer mask(4, 4);
  for (int x = 0; x < 4; ++x) mask.set_pixel(x, 0, {1, 1, 1});
  save_image(mask, dir / "mp" / "a.png");
  save_image(mask, dir / "mg" / "a.png");

  const auto r = run_cli("eval --preds " + (dir / "preds.jsonl").string() + " --gts " +
                             (dir / "gts.jsonl").string() + " --masks-pred " +
                             (dir / "mp").string() + " --masks-gt " +
                             (dir / "mg").string() + " --report " +
                             (dir / "eval.json").string(),
                         dir.path());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("Recall") != std::string::npos);
  CHECK(r.out.find("100.00") != std::string::npos);
  const std::string report = slurp(dir / "eval.json");
  CHECK(report.find("\"recall_pct\": 100") != std::string::npos);
  CHECK(report.find("\"miou_pct\": 100") != std::string::npos);
}

TEST_CASE("loss-check subcommand passes and emits the table") {
  test::TempDir dir("cli_loss");
  const auto r = run_cli("loss-check --seed 7 --report " + (dir / "lc.json").string(),
                         dir.path());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(slurp(dir / "lc.json").find("\"failures\": 0") != std::string::npos);
}
