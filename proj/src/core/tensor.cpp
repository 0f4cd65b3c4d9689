#include "core/tensor.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "core/error.hpp"

namespace rainsd {

namespace {

std::size_t checked_element_count(const std::vector<std::uint64_t>& shape) {
  if (shape.empty() || shape.size() > 4) {
    throw Error::invalid("tensor rank must be 1..4, got " + std::to_string(shape.size()));
  }
  std::uint64_t n = 1;
  for (std::uint64_t e : shape) {
    if (e == 0) throw Error::invalid("tensor extents must be >= 1");
    if (e > std::numeric_limits<std::uint32_t>::max() ||
        n > std::numeric_limits<std::size_t>::max() / e) {
      throw Error::format("tensor extents overflow");
    }
    n *= e;
  }
  return static_cast<std::size_t>(n);
}

void check_finite(const std::vector<float>& data) {
  for (float v : data) {
    if (!std::isfinite(v)) throw Error::invalid("tensor values must be finite");
  }
}

void put_u32_le(std::ofstream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                         static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
  out.write(bytes, 4);
}

void put_u64_le(std::ofstream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>(v >> (8 * i));
  out.write(bytes, 8);
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

Tensor::Tensor(std::vector<std::uint64_t> shape)
    : shape_(std::move(shape)), data_(checked_element_count(shape_), 0.0f) {}

Tensor::Tensor(std::vector<std::uint64_t> shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != checked_element_count(shape_)) {
    throw Error::invalid("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape");
  }
  check_finite(data_);
}

ChannelStats channel_stats(const Tensor& t) {
  if (t.rank() != 3) {
    throw Error::invalid("channel_stats expects a rank-3 C x H x W tensor, got rank " +
                         std::to_string(t.rank()));
  }
  const std::size_t channels = t.shape()[0];
  const std::size_t spatial = static_cast<std::size_t>(t.shape()[1] * t.shape()[2]);
  ChannelStats stats;
  stats.mean.resize(channels);
  stats.std.resize(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    const float* p = t.data().data() + c * spatial;
    double sum = 0.0;
    for (std::size_t i = 0; i < spatial; ++i) sum += p[i];
    const double mean = sum / static_cast<double>(spatial);
    double sq = 0.0;
    for (std::size_t i = 0; i < spatial; ++i) {
      const double d = p[i] - mean;
      sq += d * d;
    }
    stats.mean[c] = mean;
    stats.std[c] = std::sqrt(sq / static_cast<double>(spatial));
  }
  return stats;
}

void write_tensor(const Tensor& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error::io("cannot write " + path.string());
  out.write("RSDT", 4);
  put_u32_le(out, static_cast<std::uint32_t>(t.rank()));
  for (std::uint64_t e : t.shape()) put_u64_le(out, e);
  for (float v : t.data()) put_u32_le(out, std::bit_cast<std::uint32_t>(v));
  if (!out) throw Error::io("short write to " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error::io("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 8 || std::memcmp(bytes.data(), "RSDT", 4) != 0) {
    throw Error::format("rsdt: bad magic in " + path.string());
  }
  const std::uint32_t rank = get_u32_le(bytes.data() + 4);
  if (rank < 1 || rank > 4) {
    throw Error::format("rsdt: rank " + std::to_string(rank) + " out of range in " +
                        path.string());
  }
  const std::size_t header = 8 + static_cast<std::size_t>(rank) * 8;
  if (bytes.size() < header) throw Error::format("rsdt: truncated header in " + path.string());
  std::vector<std::uint64_t> shape(rank);
  for (std::uint32_t i = 0; i < rank; ++i) {
    shape[i] = get_u64_le(bytes.data() + 8 + static_cast<std::size_t>(8) * i);
  }
  const std::size_t count = checked_element_count(shape);
  if (bytes.size() != header + count * 4) {
    throw Error::format("rsdt: payload size mismatch in " + path.string());
  }
  std::vector<float> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    data[i] = std::bit_cast<float>(get_u32_le(bytes.data() + header + 4 * i));
  }
  return {std::move(shape), std::move(data)};
}

}  // namespace rainsd
