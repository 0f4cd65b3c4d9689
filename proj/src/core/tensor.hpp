#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace rainsd {

/// Dense 32-bit real tensor, ranks 1-4, row-major. Feature maps use the
/// canonical C x H x W layout. Values must be finite on construction.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::uint64_t> shape);  // zero-filled
  Tensor(std::vector<std::uint64_t> shape, std::vector<float> data);

  const std::vector<std::uint64_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }

  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

  float operator[](std::size_t i) const { return data_[i]; }
  float& operator[](std::size_t i) { return data_[i]; }

  /// Rank-3 accessors (c, h, w).
  float at(std::size_t c, std::size_t h, std::size_t w) const {
    return data_[(c * shape_[1] + h) * shape_[2] + w];
  }
  float& at(std::size_t c, std::size_t h, std::size_t w) {
    return data_[(c * shape_[1] + h) * shape_[2] + w];
  }

  bool operator==(const Tensor&) const = default;

 private:
  std::vector<std::uint64_t> shape_;
  std::vector<float> data_;
};

/// Per-channel spatial mean and population standard deviation.
struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> std;
};

/// Instance statistics of a C x H x W tensor; population (biased) variance,
/// accumulated in double precision.
ChannelStats channel_stats(const Tensor& t);

/// RSDT tensor file, the bit-exact interchange format:
///   magic "RSDT" | u32 LE rank | rank x u64 LE extents |
///   row-major payload of f32 LE IEEE-754 values.
void write_tensor(const Tensor& t, const std::filesystem::path& path);
Tensor read_tensor(const std::filesystem::path& path);

}  // namespace rainsd
