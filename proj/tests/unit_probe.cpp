#include <doctest.h>

#include <cmath>
#include <fstream>

#include "core/error.hpp"
#include "core/probe.hpp"
#include "test_util.hpp"

using namespace rainsd;

TEST_CASE("probe of a constant layer") {
  Tensor layer({2, 3, 3});
  for (float& v : layer.data()) v = 2.0f;
  const auto reports = probe(std::vector<Tensor>{layer});
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].layer_id == 0);
  CHECK(reports[0].scalar_mean == doctest::Approx(2.0));
  CHECK(reports[0].scalar_std == doctest::Approx(0.0));
}

TEST_CASE("identical layers yield identical reports") {
  Xoshiro256ss rng(71);
  const Tensor t = test::random_tensor(rng, {3, 4, 4});
  const auto reports = probe(std::vector<Tensor>{t, t});
  CHECK(reports[0].scalar_mean == reports[1].scalar_mean);
  CHECK(reports[0].scalar_std == reports[1].scalar_std);
}

TEST_CASE("probe matches a brute-force loop oracle") {
  Xoshiro256ss rng(72);
  std::vector<Tensor> layers;
  for (int l = 0; l < 3; ++l) layers.push_back(test::random_tensor(rng, {2, 5, 4}));
  const auto reports = probe(layers);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    double mean_acc = 0.0, std_acc = 0.0;
    for (std::size_t c = 0; c < 2; ++c) {
      double sum = 0.0;
      for (std::size_t h = 0; h < 5; ++h) {
        for (std::size_t w = 0; w < 4; ++w) sum += layers[l].at(c, h, w);
      }
      const double mean = sum / 20.0;
      double sq = 0.0;
      for (std::size_t h = 0; h < 5; ++h) {
        for (std::size_t w = 0; w < 4; ++w) {
          sq += (layers[l].at(c, h, w) - mean) * (layers[l].at(c, h, w) - mean);
        }
      }
      mean_acc += mean;
      std_acc += std::sqrt(sq / 20.0);
    }
    CHECK(reports[l].scalar_mean == doctest::Approx(mean_acc / 2.0).epsilon(1e-6));
    CHECK(reports[l].scalar_std == doctest::Approx(std_acc / 2.0).epsilon(1e-6));
  }
}

TEST_CASE("compare(x, x) is identically zero") {
  Xoshiro256ss rng(73);
  std::vector<Tensor> layers;
  for (int l = 0; l < 4; ++l) layers.push_back(test::random_tensor(rng, {2, 4, 4}));
  const auto reports = probe(layers);
  const auto cmp = compare(reports, reports);
  for (const auto& layer : cmp.layers) {
    CHECK(layer.mean_defined);
    CHECK(layer.relative_mean_change_pct == 0.0);
    CHECK(layer.relative_std_change_pct == 0.0);
  }
}

TEST_CASE("a 0.895 mean ratio reports -10.5 percent") {
  // Construction reproducing the reported magnitude: a layer whose scalar
  // mean is 0.895x the baseline is 10.5% lower.
  Tensor baseline({1, 2, 2});
  for (float& v : baseline.data()) v = 2.0f;
  Tensor lower({1, 2, 2});
  for (float& v : lower.data()) v = 2.0f * 0.895f;
  const auto cmp = compare(probe(std::vector<Tensor>{lower}),
                           probe(std::vector<Tensor>{baseline}));
  REQUIRE(cmp.layers.size() == 1);
  CHECK(cmp.layers[0].mean_defined);
  CHECK(cmp.layers[0].relative_mean_change_pct == doctest::Approx(-10.5).epsilon(1e-4));
}

TEST_CASE("handcrafted two-layer comparison matches hand arithmetic") {
  Tensor a0({1, 1, 2}, {1.0f, 3.0f});   // mean 2, std 1
  Tensor a1({1, 1, 2}, {2.0f, 6.0f});   // mean 4, std 2
  Tensor b0({1, 1, 2}, {3.0f, 5.0f});   // mean 4, std 1
  Tensor b1({1, 1, 2}, {-1.0f, 9.0f});  // mean 4, std 5
  const auto cmp = compare(probe(std::vector<Tensor>{a0, a1}),
                           probe(std::vector<Tensor>{b0, b1}));
  CHECK(cmp.layers[0].relative_mean_change_pct == doctest::Approx(-50.0));
  CHECK(cmp.layers[0].relative_std_change_pct == doctest::Approx(0.0));
  CHECK(cmp.layers[1].relative_mean_change_pct == doctest::Approx(0.0));
  CHECK(cmp.layers[1].relative_std_change_pct == doctest::Approx(-60.0));
}

TEST_CASE("comparison is antisymmetric at the numerator level") {
  Xoshiro256ss rng(74);
  const auto a = probe(std::vector<Tensor>{test::random_tensor(rng, {2, 4, 4})});
  const auto b = probe(std::vector<Tensor>{test::random_tensor(rng, {2, 4, 4})});
  const auto ab = compare(a, b);
  const auto ba = compare(b, a);
  // (a-b) and (b-a) differ only in sign; denominators differ.
  const double num_ab = ab.layers[0].relative_mean_change_pct *
                        std::abs(b[0].scalar_mean) / 100.0;
  const double num_ba = ba.layers[0].relative_mean_change_pct *
                        std::abs(a[0].scalar_mean) / 100.0;
  CHECK(num_ab == doctest::Approx(-num_ba).epsilon(1e-9));
}

TEST_CASE("zero baselines are flagged undefined") {
  Tensor zero({1, 2, 2});
  Tensor nonzero({1, 2, 2});
  for (float& v : nonzero.data()) v = 1.0f;
  const auto cmp = compare(probe(std::vector<Tensor>{nonzero}),
                           probe(std::vector<Tensor>{zero}));
  CHECK(!cmp.layers[0].mean_defined);
  CHECK(!cmp.layers[0].std_defined);
}

TEST_CASE("layer count and id mismatches are rejected") {
  Xoshiro256ss rng(75);
  const auto one = probe(std::vector<Tensor>{test::random_tensor(rng, {1, 2, 2})});
  const auto two = probe(std::vector<Tensor>{test::random_tensor(rng, {1, 2, 2}),
                                             test::random_tensor(rng, {1, 2, 2})});
  CHECK_THROWS_AS(compare(one, two), Error);

  const auto ids_a = probe(std::vector<std::pair<int, Tensor>>{
      {3, test::random_tensor(rng, {1, 2, 2})}});
  const auto ids_b = probe(std::vector<std::pair<int, Tensor>>{
      {4, test::random_tensor(rng, {1, 2, 2})}});
  CHECK_THROWS_AS(compare(ids_a, ids_b), Error);
}

TEST_CASE("probe survives a serialization round trip") {
  test::TempDir dir("probe_rt");
  Xoshiro256ss rng(76);
  const Tensor t = test::random_tensor(rng, {3, 5, 5});
  write_tensor(t, dir / "f1.rsdt");
  const auto direct = probe(std::vector<Tensor>{t});
  const auto loaded = probe(load_feature_dir(dir.path()));
  CHECK(direct[0].scalar_mean == loaded[0].scalar_mean);
  CHECK(direct[0].scalar_std == loaded[0].scalar_std);
}

TEST_CASE("load_feature_dir orders by layer index and validates content") {
  test::TempDir dir("probe_dir");
  Xoshiro256ss rng(77);
  write_tensor(test::random_tensor(rng, {1, 2, 2}), dir / "f10.rsdt");
  write_tensor(test::random_tensor(rng, {1, 2, 2}), dir / "f2.rsdt");
  write_tensor(test::random_tensor(rng, {1, 2, 2}), dir / "f7.rsdt");
  {
    std::ofstream out(dir / "notes.txt");
    out << "ignored";
  }
  const auto layers = load_feature_dir(dir.path());
  REQUIRE(layers.size() == 3);
  CHECK(layers[0].first == 2);
  CHECK(layers[1].first == 7);
  CHECK(layers[2].first == 10);
  CHECK_THROWS_AS(load_feature_dir(dir / "missing"), Error);
}

TEST_CASE("report renderers emit tables and csv") {
  test::TempDir dir("probe_render");
  Xoshiro256ss rng(78);
  const auto probed = probe(std::vector<Tensor>{test::random_tensor(rng, {1, 3, 3}),
                                                test::random_tensor(rng, {1, 3, 3})});
  const auto baseline = probe(std::vector<Tensor>{test::random_tensor(rng, {1, 3, 3}),
                                                  test::random_tensor(rng, {1, 3, 3})});
  const auto cmp = compare(probed, baseline);
  const std::string table = render_comparison_table(probed, baseline, cmp);
  CHECK(table.find("f0") != std::string::npos);
  CHECK(table.find("f1") != std::string::npos);
  write_probe_csv(probed, &cmp, dir / "probe.csv");
  std::ifstream in(dir / "probe.csv");
  std::string header;
  REQUIRE(std::getline(in, header));
  CHECK(header ==
        "layer_id,scalar_mean,scalar_std,relative_mean_change_pct,"
        "relative_std_change_pct,defined");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
}
