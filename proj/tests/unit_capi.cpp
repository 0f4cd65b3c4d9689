#include <doctest.h>

#include <cstring>
#include <fstream>
#include <string>

#include "rainsd.h"
#include "test_util.hpp"

using rainsd::test::TempDir;

TEST_CASE("image create/save/load through the C API") {
  TempDir dir("capi_img");
  std::vector<uint8_t> pixels(8 * 4 * 3);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = static_cast<uint8_t>(i * 7 % 251);
  }
  rainsd_image* img = nullptr;
  REQUIRE(rainsd_image_create(8, 4, pixels.data(), &img) == RAINSD_OK);
  CHECK(rainsd_image_width(img) == 8);
  CHECK(rainsd_image_height(img) == 4);
  const auto path = (dir / "img.png").string();
  REQUIRE(rainsd_image_save(img, path.c_str()) == RAINSD_OK);

  rainsd_image* loaded = nullptr;
  REQUIRE(rainsd_image_load(path.c_str(), &loaded) == RAINSD_OK);
  CHECK(std::memcmp(rainsd_image_pixels(loaded), pixels.data(), pixels.size()) == 0);
  rainsd_image_free(img);
  rainsd_image_free(loaded);
}

TEST_CASE("errors surface as status codes with messages") {
  rainsd_image* img = nullptr;
  CHECK(rainsd_image_load("/nonexistent/x.png", &img) == RAINSD_ERR_IO);
  CHECK(std::string(rainsd_last_error()).find("x.png") != std::string::npos);
  CHECK(rainsd_image_load(nullptr, &img) == RAINSD_ERR_INVALID_ARGUMENT);
  CHECK(rainsd_image_create(0, 5, nullptr, &img) == RAINSD_ERR_INVALID_ARGUMENT);

  TempDir dir("capi_err");
  {
    std::ofstream out(dir / "junk.png");
    out << "not a png";
  }
  rainsd_image* bad = nullptr;
  CHECK(rainsd_image_load((dir / "junk.png").string().c_str(), &bad) ==
        RAINSD_ERR_FORMAT);
}

TEST_CASE("rain application is deterministic through the C API") {
  TempDir dir("capi_rain");
  rainsd_config* cfg = nullptr;
  REQUIRE(rainsd_config_load(nullptr, &cfg) == RAINSD_OK);
  rainsd_image* base = nullptr;
  REQUIRE(rainsd_image_create(32, 32, nullptr, &base) == RAINSD_OK);

  rainsd_image* a = nullptr;
  rainsd_image* b = nullptr;
  REQUIRE(rainsd_rain_apply(cfg, base, 40.0, 7, &a) == RAINSD_OK);
  REQUIRE(rainsd_rain_apply(cfg, base, 40.0, 7, &b) == RAINSD_OK);
  const std::size_t n = 32 * 32 * 3;
  CHECK(std::memcmp(rainsd_image_pixels(a), rainsd_image_pixels(b), n) == 0);

  rainsd_image* c = nullptr;
  REQUIRE(rainsd_rain_apply(cfg, base, 40.0, 8, &c) == RAINSD_OK);
  CHECK(std::memcmp(rainsd_image_pixels(a), rainsd_image_pixels(c), n) != 0);

  const auto layer_path = (dir / "layer.txt").string();
  REQUIRE(rainsd_rain_dump_layer(cfg, 32, 32, 40.0, 7, layer_path.c_str()) == RAINSD_OK);
  std::ifstream layer(layer_path);
  std::string line;
  CHECK(std::getline(layer, line));

  rainsd_image_free(a);
  rainsd_image_free(b);
  rainsd_image_free(c);
  rainsd_image_free(base);
  rainsd_config_free(cfg);
}

TEST_CASE("tensor round trip and fadain through the C API") {
  TempDir dir("capi_tensor");
  const uint64_t extents[3] = {2, 3, 3};
  std::vector<float> values(18);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<float>(i) * 0.25f - 1.0f;
  }
  rainsd_tensor* t = nullptr;
  REQUIRE(rainsd_tensor_create(extents, 3, values.data(), &t) == RAINSD_OK);
  CHECK(rainsd_tensor_rank(t) == 3);
  CHECK(rainsd_tensor_extent(t, 1) == 3);

  const auto path = (dir / "t.rsdt").string();
  REQUIRE(rainsd_tensor_write(t, path.c_str()) == RAINSD_OK);
  rainsd_tensor* back = nullptr;
  REQUIRE(rainsd_tensor_read(path.c_str(), &back) == RAINSD_OK);
  CHECK(std::memcmp(rainsd_tensor_data(back), values.data(),
                    values.size() * sizeof(float)) == 0);

  rainsd_tensor* styled = nullptr;
  REQUIRE(rainsd_fadain(t, back, 0.0, &styled) == RAINSD_OK);
  CHECK(rainsd_tensor_rank(styled) == 3);

  rainsd_tensor* mismatched = nullptr;
  const uint64_t other_extents[3] = {3, 2, 2};
  rainsd_tensor* other = nullptr;
  REQUIRE(rainsd_tensor_create(other_extents, 3, nullptr, &other) == RAINSD_OK);
  CHECK(rainsd_fadain(t, other, 0.0, &mismatched) == RAINSD_ERR_INVALID_ARGUMENT);

  rainsd_tensor_free(t);
  rainsd_tensor_free(back);
  rainsd_tensor_free(styled);
  rainsd_tensor_free(other);
}

TEST_CASE("loss check runs through the C API") {
  char* table = nullptr;
  int32_t failures = -1;
  REQUIRE(rainsd_loss_check(7, &table, &failures) == RAINSD_OK);
  REQUIRE(table != nullptr);
  CHECK(failures == 0);
  CHECK(std::string(table).find("PASS") != std::string::npos);
  rainsd_string_free(table);
}

TEST_CASE("translate produces a deterministic image through the C API") {
  rainsd_config* cfg = nullptr;
  TempDir dir("capi_translate");
  {
    std::ofstream out(dir / "cfg.json");
    out << R"({"network": {"levels": 2, "base_channels": 2, "seed": 5}})";
  }
  REQUIRE(rainsd_config_load((dir / "cfg.json").string().c_str(), &cfg) == RAINSD_OK);
  rainsd_image* content = nullptr;
  rainsd_image* style = nullptr;
  REQUIRE(rainsd_image_create(8, 8, nullptr, &content) == RAINSD_OK);
  std::vector<uint8_t> style_px(8 * 8 * 3, 180);
  REQUIRE(rainsd_image_create(8, 8, style_px.data(), &style) == RAINSD_OK);

  rainsd_image* out_a = nullptr;
  rainsd_image* out_b = nullptr;
  REQUIRE(rainsd_translate(cfg, content, style, nullptr, 3, &out_a) == RAINSD_OK);
  REQUIRE(rainsd_translate(cfg, content, style, nullptr, 3, &out_b) == RAINSD_OK);
  CHECK(std::memcmp(rainsd_image_pixels(out_a), rainsd_image_pixels(out_b),
                    8 * 8 * 3) == 0);

  rainsd_image_free(out_a);
  rainsd_image_free(out_b);
  rainsd_image_free(content);
  rainsd_image_free(style);
  rainsd_config_free(cfg);
}
