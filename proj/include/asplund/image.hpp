#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "asplund/errors.hpp"
#include "asplund/lip.hpp"

namespace asplund {

struct Pixel {
  int x = 0;
  int y = 0;

  auto operator<=>(const Pixel&) const = default;
};

/// Row-major ordering: y first, then x.
inline bool row_major_less(Pixel a, Pixel b) {
  return a.y != b.y ? a.y < b.y : a.x < b.x;
}

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool empty() const { return width <= 0 || height <= 0; }
  bool contains(Pixel p) const {
    return p.x >= x && p.x < x + width && p.y >= y && p.y < y + height;
  }
  bool operator==(const Rect&) const = default;
};

/// An ordered set of pixel coordinates. Duplicates are not removed.
class Region {
 public:
  Region() = default;
  explicit Region(std::vector<Pixel> pixels) : pixels_(std::move(pixels)) {}

  static Region rect(const Rect& r) {
    std::vector<Pixel> px;
    if (!r.empty()) {
      px.reserve(static_cast<std::size_t>(r.width) * r.height);
      for (int y = r.y; y < r.y + r.height; ++y)
        for (int x = r.x; x < r.x + r.width; ++x) px.push_back({x, y});
    }
    return Region(std::move(px));
  }

  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }
  std::span<const Pixel> pixels() const { return pixels_; }
  const Pixel& operator[](std::size_t i) const { return pixels_[i]; }

 private:
  std::vector<Pixel> pixels_;
};

/// L-channel image on the LIP scale, interleaved row-major storage.
/// Colour images use L = 3 in R, G, B order.
class MultichannelImage {
 public:
  MultichannelImage() = default;

  MultichannelImage(int width, int height, int channels,
                    GrayScaleParams params = GrayScaleParams{}, double fill = 0.0)
      : width_(width), height_(height), channels_(channels), params_(params) {
    check_shape(width, height, channels);
    detail::require_grey(fill, params_, "MultichannelImage");
    data_.assign(sample_count(), fill);
  }

  MultichannelImage(int width, int height, int channels, std::vector<double> data,
                    GrayScaleParams params = GrayScaleParams{})
      : width_(width), height_(height), channels_(channels),
        params_(params), data_(std::move(data)) {
    check_shape(width, height, channels);
    if (data_.size() != sample_count()) {
      throw UsageError("MultichannelImage: data size does not match shape");
    }
    for (double v : data_) detail::require_grey(v, params_, "MultichannelImage");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  const GrayScaleParams& params() const { return params_; }
  Rect bounds() const { return {0, 0, width_, height_}; }
  bool contains(Pixel p) const { return bounds().contains(p); }

  double at(int x, int y, int c) const { return data_[index(x, y) + c]; }

  void set(int x, int y, int c, double v) {
    detail::require_grey(v, params_, "MultichannelImage::set");
    data_[index(x, y) + c] = v;
  }

  std::span<const double> pixel(int x, int y) const {
    return {data_.data() + index(x, y), static_cast<std::size_t>(channels_)};
  }

  void set_pixel(int x, int y, std::span<const double> values) {
    if (values.size() != static_cast<std::size_t>(channels_)) {
      throw UsageError("set_pixel: channel count mismatch");
    }
    for (int c = 0; c < channels_; ++c) set(x, y, c, values[c]);
  }

  std::span<const double> samples() const { return data_; }

  /// Copy of the sub-rectangle r, which must lie inside the image.
  MultichannelImage crop(const Rect& r) const {
    if (r.empty() || r.x < 0 || r.y < 0 || r.x + r.width > width_ ||
        r.y + r.height > height_) {
      throw UsageError("crop: rectangle outside image");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(r.width) * r.height * channels_);
    for (int y = r.y; y < r.y + r.height; ++y) {
      const auto* row = data_.data() + index(r.x, y);
      out.insert(out.end(), row, row + static_cast<std::size_t>(r.width) * channels_);
    }
    return MultichannelImage(r.width, r.height, channels_, std::move(out), params_);
  }

  /// Applies fn(value, x, y, c) -> value to every sample.
  template <class Fn>
  MultichannelImage transformed(Fn&& fn) const {
    MultichannelImage out = *this;
    for (int y = 0; y < height_; ++y)
      for (int x = 0; x < width_; ++x)
        for (int c = 0; c < channels_; ++c)
          out.set(x, y, c, fn(at(x, y, c), x, y, c));
    return out;
  }

  bool operator==(const MultichannelImage&) const = default;

 private:
  static void check_shape(int width, int height, int channels) {
    if (width < 1 || height < 1 || channels < 1) {
      std::ostringstream os;
      os << "image shape must be positive (got " << width << "x" << height
         << "x" << channels << ")";
      throw UsageError(os.str());
    }
  }

  std::size_t sample_count() const {
    return static_cast<std::size_t>(width_) * height_ * channels_;
  }

  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  GrayScaleParams params_;
  std::vector<double> data_;
};

/// Single-channel LIP image.
class LipImage {
 public:
  LipImage(int width, int height, GrayScaleParams params = GrayScaleParams{},
           double fill = 0.0)
      : image_(width, height, 1, params, fill) {}

  LipImage(int width, int height, std::vector<double> data,
           GrayScaleParams params = GrayScaleParams{})
      : image_(width, height, 1, std::move(data), params) {}

  int width() const { return image_.width(); }
  int height() const { return image_.height(); }
  const GrayScaleParams& params() const { return image_.params(); }
  bool contains(Pixel p) const { return image_.contains(p); }

  double at(int x, int y) const { return image_.at(x, y, 0); }
  void set(int x, int y, double v) { image_.set(x, y, 0, v); }

  const MultichannelImage& as_multichannel() const { return image_; }

 private:
  MultichannelImage image_;
};

inline LipImage extract_channel(const MultichannelImage& img, int c) {
  if (c < 0 || c >= img.channels()) throw UsageError("extract_channel: bad channel");
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(img.width()) * img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) data.push_back(img.at(x, y, c));
  return LipImage(img.width(), img.height(), std::move(data), img.params());
}

/// Classic-intensity samples (0 = black) to a LIP image, or back: the map is
/// its own inverse.
inline MultichannelImage invert_intensity(const MultichannelImage& img) {
  const GrayScaleParams& p = img.params();
  std::vector<double> out(img.samples().begin(), img.samples().end());
  for (double& v : out) v = invert_intensity(v, p);
  return MultichannelImage(img.width(), img.height(), img.channels(), std::move(out), p);
}

}  // namespace asplund
