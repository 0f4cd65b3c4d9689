#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "core/error.hpp"
#include "core/tensor.hpp"
#include "test_util.hpp"

using namespace rainsd;

TEST_CASE("channel_stats constant tensor") {
  Tensor t({2, 3, 4});
  for (float& v : t.data()) v = 5.0f;
  const auto stats = channel_stats(t);
  for (int c = 0; c < 2; ++c) {
    CHECK(stats.mean[c] == doctest::Approx(5.0));
    CHECK(stats.std[c] == doctest::Approx(0.0));
  }
}

TEST_CASE("channel_stats two-point arithmetic") {
  Tensor t({1, 1, 2}, {1.0f, 3.0f});
  const auto stats = channel_stats(t);
  CHECK(stats.mean[0] == doctest::Approx(2.0));
  CHECK(stats.std[0] == doctest::Approx(1.0));
}

TEST_CASE("channel_stats matches a scalar double-loop oracle") {
  Xoshiro256ss rng(31);
  const Tensor t = test::random_tensor(rng, {4, 7, 5}, -3.0, 3.0);
  const auto stats = channel_stats(t);
  for (std::size_t c = 0; c < 4; ++c) {
    double sum = 0.0;
    for (std::size_t h = 0; h < 7; ++h) {
      for (std::size_t w = 0; w < 5; ++w) sum += t.at(c, h, w);
    }
    const double mean = sum / 35.0;
    double sq = 0.0;
    for (std::size_t h = 0; h < 7; ++h) {
      for (std::size_t w = 0; w < 5; ++w) {
        sq += (t.at(c, h, w) - mean) * (t.at(c, h, w) - mean);
      }
    }
    CHECK(stats.mean[c] == doctest::Approx(mean).epsilon(1e-6));
    CHECK(stats.std[c] == doctest::Approx(std::sqrt(sq / 35.0)).epsilon(1e-6));
  }
}

TEST_CASE("channel_stats affine equivariance") {
  Xoshiro256ss rng(32);
  for (int i = 0; i < 20; ++i) {
    const Tensor t = test::random_tensor(rng, {3, 6, 6}, -2.0, 2.0);
    const double a = rng.next_real(-3.0, 3.0);
    const double b = rng.next_real(-2.0, 2.0);
    Tensor scaled = t;
    for (float& v : scaled.data()) v = static_cast<float>(a * v + b);
    const auto base = channel_stats(t);
    const auto affine = channel_stats(scaled);
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(affine.mean[c] == doctest::Approx(a * base.mean[c] + b).epsilon(1e-5));
      CHECK(affine.std[c] ==
            doctest::Approx(std::abs(a) * base.std[c]).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("channel_stats rejects non-rank-3 tensors") {
  CHECK_THROWS_AS(channel_stats(Tensor({4})), Error);
  CHECK_THROWS_AS(channel_stats(Tensor({2, 2, 2, 2})), Error);
}

TEST_CASE("rsdt round trip is bit-exact") {
  test::TempDir dir("rsdt");
  Xoshiro256ss rng(33);
  for (int i = 0; i < 20; ++i) {
    const auto rank = static_cast<std::size_t>(rng.next_int(1, 4));
    std::vector<std::uint64_t> shape;
    for (std::size_t r = 0; r < rank; ++r) {
      shape.push_back(static_cast<std::uint64_t>(rng.next_int(1, 6)));
    }
    const Tensor t = test::random_tensor(rng, shape, -100.0, 100.0);
    const auto path = dir / ("t" + std::to_string(i) + ".rsdt");
    write_tensor(t, path);
    const Tensor back = read_tensor(path);
    CHECK(back.shape() == t.shape());
    CHECK(std::memcmp(back.data().data(), t.data().data(),
                      t.size() * sizeof(float)) == 0);
  }
}

TEST_CASE("one-element tensor serializes to header plus 4 payload bytes") {
  test::TempDir dir("rsdt1");
  const Tensor t({1}, {3.5f});
  const auto path = dir / "one.rsdt";
  write_tensor(t, path);
  CHECK(std::filesystem::file_size(path) == 4 + 4 + 8 + 4);
  const Tensor back = read_tensor(path);
  CHECK(back.size() == 1);
  CHECK(back[0] == 3.5f);
}

TEST_CASE("rsdt rejects bad magic, truncation and oversized extents") {
  test::TempDir dir("rsdtbad");
  {
    std::ofstream out(dir / "magic.rsdt", std::ios::binary);
    out << "NOPE";
    out.write("\x01\x00\x00\x00", 4);
  }
  CHECK_THROWS_AS(read_tensor(dir / "magic.rsdt"), Error);

  const Tensor t({2, 2}, {1.f, 2.f, 3.f, 4.f});
  write_tensor(t, dir / "ok.rsdt");
  {
    // Drop the last payload byte.
    std::ifstream in(dir / "ok.rsdt", std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    bytes.pop_back();
    std::ofstream out(dir / "trunc.rsdt", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_AS(read_tensor(dir / "trunc.rsdt"), Error);
  {
    // Huge extent whose product overflows.
    std::ofstream out(dir / "huge.rsdt", std::ios::binary);
    out << "RSDT";
    out.write("\x02\x00\x00\x00", 4);
    const unsigned char big[8] = {0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0x7f};
    out.write(reinterpret_cast<const char*>(big), 8);
    out.write(reinterpret_cast<const char*>(big), 8);
  }
  CHECK_THROWS_AS(read_tensor(dir / "huge.rsdt"), Error);
}

TEST_CASE("tensors reject non-finite values and bad shapes") {
  CHECK_THROWS_AS(Tensor({2}, {1.0f, std::numeric_limits<float>::infinity()}), Error);
  CHECK_THROWS_AS(Tensor({2}, {1.0f, std::nanf("")}), Error);
  CHECK_THROWS_AS(Tensor({0}), Error);
  CHECK_THROWS_AS(Tensor({2, 2}, {1.0f}), Error);
  CHECK_THROWS_AS(Tensor({1, 1, 1, 1, 1}), Error);
}
