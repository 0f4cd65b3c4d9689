#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace rainsd {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Paint color with a real opacity in [0, 1].
struct Rgba {
  std::uint8_t r = 0, g = 0, b = 0;
  double alpha = 1.0;
  bool operator==(const Rgba&) const = default;
};

/// H x W x 3 8-bit RGB raster, row-major. Immutable in pipeline contexts;
/// all operations below return new buffers.
class ImageBuffer {
 public:
  ImageBuffer(int width, int height, Rgb fill = {});
  ImageBuffer(int width, int height, std::vector<std::uint8_t> rgb_data);

  int width() const { return width_; }
  int height() const { return height_; }

  std::span<const std::uint8_t> bytes() const { return data_; }
  std::span<std::uint8_t> bytes() { return data_; }

  Rgb pixel(int x, int y) const {
    const std::size_t i = index(x, y);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }

  void set_pixel(int x, int y, Rgb c) {
    const std::size_t i = index(x, y);
    data_[i] = c.r;
    data_[i + 1] = c.g;
    data_[i + 2] = c.b;
  }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  bool operator==(const ImageBuffer&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// out = round_half_up(alpha * paint + (1 - alpha) * base), per channel.
Rgb blend_pixel(Rgb base, const Rgba& paint);

/// Decodes PNG or binary PPM (P6, maxval 255); the format is sniffed from the
/// file's leading bytes, not the extension.
ImageBuffer load_image(const std::filesystem::path& path);

/// Encodes by extension: ".png" or ".ppm". Both encodings are lossless.
void save_image(const ImageBuffer& img, const std::filesystem::path& path);

}  // namespace rainsd
