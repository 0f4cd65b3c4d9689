#include "core/image.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "core/error.hpp"
#include "core/numeric.hpp"

namespace rainsd {

namespace {

std::size_t checked_size(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error::invalid("image dimensions must be >= 1, got " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error::io("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

constexpr unsigned char kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

// --- PPM (P6, maxval 255) ---

// Skips whitespace and '#' comments between header tokens.
std::size_t next_token(const std::vector<std::uint8_t>& bytes, std::size_t pos,
                       std::string& token) {
  const std::size_t n = bytes.size();
  while (pos < n) {
    if (std::isspace(bytes[pos])) {
      ++pos;
    } else if (bytes[pos] == '#') {
      while (pos < n && bytes[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  token.clear();
  while (pos < n && !std::isspace(bytes[pos])) token.push_back(static_cast<char>(bytes[pos++]));
  return pos;
}

int parse_ppm_int(const std::string& token, const char* what) {
  if (token.empty()) throw Error::format(std::string("ppm: truncated header before ") + what);
  for (char c : token) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw Error::format(std::string("ppm: bad ") + what + " '" + token + "'");
    }
  }
  try {
    return std::stoi(token);
  } catch (const std::exception&) {
    throw Error::format(std::string("ppm: ") + what + " out of range '" + token + "'");
  }
}

ImageBuffer decode_ppm(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
  std::string token;
  std::size_t pos = next_token(bytes, 0, token);
  if (token != "P6") throw Error::format("ppm: not a P6 file: " + origin);
  pos = next_token(bytes, pos, token);
  const int width = parse_ppm_int(token, "width");
  pos = next_token(bytes, pos, token);
  const int height = parse_ppm_int(token, "height");
  pos = next_token(bytes, pos, token);
  const int maxval = parse_ppm_int(token, "maxval");
  if (maxval != 255) throw Error::format("ppm: unsupported maxval " + std::to_string(maxval));
  if (pos >= bytes.size()) throw Error::format("ppm: truncated header: " + origin);
  ++pos;  // single whitespace byte after maxval
  const std::size_t need = checked_size(width, height);
  if (bytes.size() - pos < need) throw Error::format("ppm: truncated pixel data: " + origin);
  std::vector<std::uint8_t> data(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                 bytes.begin() + static_cast<std::ptrdiff_t>(pos + need));
  return {width, height, std::move(data)};
}

void encode_ppm(const ImageBuffer& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error::io("cannot write " + path.string());
  out << "P6\n" << img.width() << " " << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.bytes().data()),
            static_cast<std::streamsize>(img.bytes().size()));
  if (!out) throw Error::io("short write to " + path.string());
}

// --- PNG via libpng's simplified API ---

ImageBuffer decode_png(const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.string().c_str())) {
    throw Error::format("png: corrupt header in " + path.string() + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  const int width = static_cast<int>(png.width);
  const int height = static_cast<int>(png.height);
  std::vector<std::uint8_t> data(checked_size(width, height));
  if (!png_image_finish_read(&png, nullptr, data.data(), 0, nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    throw Error::format("png: decode failed for " + path.string() + ": " + msg);
  }
  return {width, height, std::move(data)};
}

void encode_png(const ImageBuffer& img, const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width());
  png.height = static_cast<png_uint_32>(img.height());
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.string().c_str(), 0, img.bytes().data(), 0,
                               nullptr)) {
    throw Error::io("png: encode failed for " + path.string() + ": " + png.message);
  }
}

}  // namespace

ImageBuffer::ImageBuffer(int width, int height, Rgb fill)
    : width_(width), height_(height), data_(checked_size(width, height)) {
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

ImageBuffer::ImageBuffer(int width, int height, std::vector<std::uint8_t> rgb_data)
    : width_(width), height_(height), data_(std::move(rgb_data)) {
  if (data_.size() != checked_size(width, height)) {
    throw Error::invalid("pixel data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(width) + "x" +
                         std::to_string(height) + "x3");
  }
}

Rgb blend_pixel(Rgb base, const Rgba& paint) {
  if (paint.alpha < 0.0 || paint.alpha > 1.0) {
    throw Error::invalid("alpha must lie in [0, 1], got " + std::to_string(paint.alpha));
  }
  const double a = paint.alpha;
  auto mix = [a](std::uint8_t p, std::uint8_t b) {
    return to_channel(a * p + (1.0 - a) * b);
  };
  return {mix(paint.r, base.r), mix(paint.g, base.g), mix(paint.b, base.b)};
}

ImageBuffer load_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngMagic, 8) == 0) {
    return decode_png(path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
    return decode_ppm(bytes, path.string());
  }
  if (bytes.size() < 8 && !bytes.empty() && bytes[0] == 0x89) {
    throw Error::format("corrupt header (truncated png): " + path.string());
  }
  throw Error::format("unsupported image format: " + path.string());
}

void save_image(const ImageBuffer& img, const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".png") {
    encode_png(img, path);
  } else if (ext == ".ppm") {
    encode_ppm(img, path);
  } else {
    throw Error::invalid("unsupported output extension '" + ext + "' (use .png or .ppm)");
  }
}

}  // namespace rainsd
