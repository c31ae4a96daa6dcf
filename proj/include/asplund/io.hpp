#pragma once

// Image and map files.
//
//   PGM  P5, maxval <= 255            -> 1 channel
//   PPM  P6, maxval <= 255            -> 3 channels
//   PNG  8-bit grey or RGB (palette expanded to RGB); no alpha, no 16-bit
//   PFM  "Pf" single-channel float map, bottom row first, scale -1.0 means
//        little-endian. +inf marks pixels outside the valid anchor region.
//
// Files hold classic intensities (0 = black). load_image converts them to the
// LIP scale with invert_intensity; save_image converts back and rounds.

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "asplund/errors.hpp"
#include "asplund/image.hpp"
#include "asplund/lip.hpp"
#include "asplund/probe_map.hpp"

namespace asplund {

/// 8-bit interleaved pixels exactly as stored in a file.
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> bytes;

  bool operator==(const RawImage&) const = default;
};

enum class ImageFormat { Pgm, Ppm, Png };

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& header,
                       const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw IoError("write failed for '" + path + "'");
}

// Netpbm-style header tokenizer: whitespace separated, '#' starts a comment.
class HeaderReader {
 public:
  HeaderReader(const std::vector<std::uint8_t>& buf, std::string format)
      : buf_(buf), format_(std::move(format)) {}

  std::string token() {
    skip_space();
    std::string t;
    while (pos_ < buf_.size() && !std::isspace(buf_[pos_]) && buf_[pos_] != '#') {
      t.push_back(static_cast<char>(buf_[pos_++]));
    }
    if (t.empty()) throw IoError(format_ + ": truncated header");
    return t;
  }

  long number() {
    const std::string t = token();
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (*end != '\0' || v <= 0) throw IoError(format_ + ": malformed header field '" + t + "'");
    return v;
  }

  double real() {
    const std::string t = token();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (*end != '\0' || !std::isfinite(v) || v == 0.0) {
      throw IoError(format_ + ": malformed scale '" + t + "'");
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t data_offset() {
    if (pos_ >= buf_.size() || !std::isspace(buf_[pos_])) {
      throw IoError(format_ + ": missing separator before pixel data");
    }
    return pos_ + 1;
  }

 private:
  void skip_space() {
    while (pos_ < buf_.size()) {
      if (buf_[pos_] == '#') {
        while (pos_ < buf_.size() && buf_[pos_] != '\n') ++pos_;
      } else if (std::isspace(buf_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& buf_;
  std::string format_;
  std::size_t pos_ = 0;
};

inline RawImage read_pnm(const std::vector<std::uint8_t>& buf) {
  HeaderReader hr(buf, "PNM");
  const std::string magic = hr.token();
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw IoError("PNM: unsupported variant '" + magic + "' (only binary P5/P6)");
  }
  const long w = hr.number();
  const long h = hr.number();
  const long maxval = hr.number();
  if (maxval > 255) throw IoError("PNM: unsupported bit depth (maxval " + std::to_string(maxval) + ")");
  const std::size_t offset = hr.data_offset();
  const std::size_t size = static_cast<std::size_t>(w) * h * channels;
  if (buf.size() - offset < size) throw IoError("PNM: truncated pixel data");
  RawImage img{static_cast<int>(w), static_cast<int>(h), channels, {}};
  img.bytes.assign(buf.begin() + offset, buf.begin() + offset + size);
  if (maxval != 255) {
    for (auto& b : img.bytes) b = static_cast<std::uint8_t>(std::lround(b * 255.0 / maxval));
  }
  return img;
}

inline RawImage read_png(const std::vector<std::uint8_t>& buf) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, buf.data(), buf.size())) {
    throw IoError(std::string("PNG: ") + png.message);
  }
  if (png.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&png);
    throw IoError("PNG: unsupported bit depth 16 (only 8-bit grey/RGB)");
  }
  if (png.format & PNG_FORMAT_FLAG_ALPHA) {
    png_image_free(&png);
    throw IoError("PNG: images with an alpha channel are not supported");
  }
  const bool colour = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = colour ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  RawImage img{static_cast<int>(png.width), static_cast<int>(png.height), colour ? 3 : 1, {}};
  img.bytes.resize(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, img.bytes.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw IoError("PNG: " + msg);
  }
  return img;
}

inline void write_png(const RawImage& img, const std::string& path) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width);
  png.height = static_cast<png_uint_32>(img.height);
  png.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png, path.c_str(), 0, img.bytes.data(), 0, nullptr)) {
    throw IoError("PNG: cannot write '" + path + "': " + png.message);
  }
}

inline std::string lower_extension(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

template <class T>
T to_little_endian(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

}  // namespace detail

inline ImageFormat format_for_path(const std::string& path) {
  const std::string ext = detail::lower_extension(path);
  if (ext == ".pgm") return ImageFormat::Pgm;
  if (ext == ".ppm") return ImageFormat::Ppm;
  if (ext == ".png") return ImageFormat::Png;
  throw IoError("unsupported image extension '" + ext + "' (use .pgm, .ppm or .png)");
}

/// Reads PGM/PPM/PNG, detected from the file's magic bytes.
inline RawImage read_raw(const std::string& path) {
  const auto buf = detail::read_file(path);
  if (buf.size() >= 8 && buf[0] == 0x89 && buf[1] == 'P' && buf[2] == 'N' && buf[3] == 'G') {
    return detail::read_png(buf);
  }
  if (buf.size() >= 2 && buf[0] == 'P') return detail::read_pnm(buf);
  throw IoError("'" + path + "': unrecognised image format");
}

inline void write_raw(const RawImage& img, const std::string& path) {
  if (img.bytes.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
    throw IoError("write_raw: pixel buffer does not match shape");
  }
  switch (format_for_path(path)) {
    case ImageFormat::Pgm:
    case ImageFormat::Ppm: {
      const bool grey = format_for_path(path) == ImageFormat::Pgm;
      if ((grey && img.channels != 1) || (!grey && img.channels != 3)) {
        throw IoError(std::string(grey ? "PGM" : "PPM") + ": cannot store " +
                      std::to_string(img.channels) + "-channel image");
      }
      std::ostringstream header;
      header << (grey ? "P5" : "P6") << "\n" << img.width << " " << img.height << "\n255\n";
      detail::write_file(path, header.str(), img.bytes.data(), img.bytes.size());
      return;
    }
    case ImageFormat::Png:
      if (img.channels != 1 && img.channels != 3) {
        throw IoError("PNG: cannot store " + std::to_string(img.channels) + "-channel image");
      }
      detail::write_png(img, path);
      return;
  }
}

/// Raw classic intensities to a LIP image.
inline MultichannelImage from_raw(const RawImage& raw, const GrayScaleParams& params = GrayScaleParams{}) {
  std::vector<double> data(raw.bytes.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = invert_intensity(raw.bytes[i], params);
  return MultichannelImage(raw.width, raw.height, raw.channels, std::move(data), params);
}

/// LIP image to classic 8-bit intensities, rounding to the nearest level.
inline RawImage to_raw(const MultichannelImage& img) {
  const double top = img.params().m() - 1.0;
  RawImage raw{img.width(), img.height(), img.channels(), {}};
  raw.bytes.reserve(img.samples().size());
  for (double v : img.samples()) {
    raw.bytes.push_back(static_cast<std::uint8_t>(std::clamp(std::lround(top - v), 0L, 255L)));
  }
  return raw;
}

inline MultichannelImage load_image(const std::string& path,
                                    const GrayScaleParams& params = GrayScaleParams{}) {
  return from_raw(read_raw(path), params);
}

inline void save_image(const MultichannelImage& img, const std::string& path) {
  write_raw(to_raw(img), path);
}

/// Single-precision PFM, little-endian, bottom row first.
inline void save_map(const DistanceMap& map, const std::string& path) {
  std::vector<float> data;
  data.reserve(static_cast<std::size_t>(map.width()) * map.height());
  for (int y = map.height() - 1; y >= 0; --y)
    for (int x = 0; x < map.width(); ++x)
      data.push_back(detail::to_little_endian(static_cast<float>(map.value(x, y))));
  std::ostringstream header;
  header << "Pf\n" << map.width() << " " << map.height() << "\n-1.0\n";
  detail::write_file(path, header.str(), data.data(), data.size() * sizeof(float));
}

inline DistanceMap load_map(const std::string& path) {
  const auto buf = detail::read_file(path);
  detail::HeaderReader hr(buf, "PFM");
  const std::string magic = hr.token();
  if (magic != "Pf") throw IoError("PFM: expected single-channel 'Pf', found '" + magic + "'");
  const long w = hr.number();
  const long h = hr.number();
  const double scale = hr.real();
  const std::size_t offset = hr.data_offset();
  const std::size_t count = static_cast<std::size_t>(w) * h;
  if (buf.size() - offset < count * sizeof(float)) throw IoError("PFM: truncated data");
  const bool little = scale < 0.0;
  DistanceMap map(static_cast<int>(w), static_cast<int>(h));
  std::size_t k = 0;
  for (long y = h - 1; y >= 0; --y) {
    for (long x = 0; x < w; ++x, ++k) {
      std::array<std::uint8_t, 4> b;
      std::memcpy(b.data(), buf.data() + offset + k * 4, 4);
      if (little != (std::endian::native == std::endian::little)) std::reverse(b.begin(), b.end());
      const float v = std::bit_cast<float>(b);
      if (std::isinf(v) && v > 0) continue;
      if (!std::isfinite(v) || v < 0) {
        throw IoError("PFM: invalid distance value at (" + std::to_string(x) + "," +
                      std::to_string(y) + ")");
      }
      map.set(static_cast<int>(x), static_cast<int>(y), v);
    }
  }
  return map;
}

/// 8-bit grey rendering: valid pixels min-max normalized to [0, 255] (all 0
/// when the valid values are constant), invalid pixels black.
inline RawImage map_preview(const DistanceMap& map) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x)
      if (map.is_valid(x, y)) {
        lo = std::min(lo, map.value(x, y));
        hi = std::max(hi, map.value(x, y));
      }
  RawImage raw{map.width(), map.height(), 1,
               std::vector<std::uint8_t>(static_cast<std::size_t>(map.width()) * map.height(), 0)};
  if (!(hi > lo)) return raw;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x)
      if (map.is_valid(x, y)) {
        raw.bytes[static_cast<std::size_t>(y) * map.width() + x] =
            static_cast<std::uint8_t>(std::lround(255.0 * (map.value(x, y) - lo) / (hi - lo)));
      }
  return raw;
}

inline void save_map_preview(const DistanceMap& map, const std::string& path) {
  write_raw(map_preview(map), path);
}

}  // namespace asplund
