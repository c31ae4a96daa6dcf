#pragma once

// Maps of Asplund distances: the probe slides over the image and each valid
// anchor receives the distance between the probe and the window under it.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "asplund/errors.hpp"
#include "asplund/image.hpp"
#include "asplund/lip.hpp"
#include "asplund/metrics.hpp"
#include "asplund/parallel.hpp"

namespace asplund {

/// A template image plus the pixel of its support that sits on the anchor.
class Probe {
 public:
  /// Anchor at ((W-1)/2, (H-1)/2).
  explicit Probe(MultichannelImage image)
      : Probe(image, Pixel{(image.width() - 1) / 2, (image.height() - 1) / 2}) {}

  Probe(MultichannelImage image, Pixel anchor)
      : image_(std::move(image)), anchor_(anchor) {
    if (!image_.contains(anchor_)) throw UsageError("probe anchor lies outside the template");
  }

  const MultichannelImage& image() const { return image_; }
  Pixel anchor() const { return anchor_; }
  int width() const { return image_.width(); }
  int height() const { return image_.height(); }

  /// Support of the probe when its anchor sits on `at`.
  Rect support_at(Pixel at) const {
    return {at.x - anchor_.x, at.y - anchor_.y, image_.width(), image_.height()};
  }

 private:
  MultichannelImage image_;
  Pixel anchor_;
};

/// Per-pixel distances; pixels without a valid anchor hold +infinity.
class DistanceMap {
 public:
  DistanceMap(int width, int height)
      : width_(width), height_(height),
        values_(checked_size(width, height), std::numeric_limits<double>::infinity()),
        valid_(values_.size(), 0) {}

  int width() const { return width_; }
  int height() const { return height_; }

  double value(int x, int y) const { return values_[index(x, y)]; }
  bool is_valid(int x, int y) const { return valid_[index(x, y)] != 0; }
  bool is_valid(Pixel p) const { return is_valid(p.x, p.y); }
  double value(Pixel p) const { return value(p.x, p.y); }

  void set(int x, int y, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError("DistanceMap: distances must be finite and >= 0");
    }
    values_[index(x, y)] = v;
    valid_[index(x, y)] = 1;
  }

  void invalidate(int x, int y) {
    values_[index(x, y)] = std::numeric_limits<double>::infinity();
    valid_[index(x, y)] = 0;
  }

  std::size_t valid_count() const {
    std::size_t n = 0;
    for (auto v : valid_) n += v;
    return n;
  }

  std::span<const double> values() const { return values_; }

  bool operator==(const DistanceMap&) const = default;

 private:
  friend struct MapWriter;

  static std::size_t checked_size(int width, int height) {
    if (width < 1 || height < 1) throw UsageError("DistanceMap: shape must be positive");
    return static_cast<std::size_t>(width) * height;
  }
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  int width_;
  int height_;
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
};

struct MapOptions {
  unsigned threads = 1;  ///< 0 = one per core
};

// Row-level writes that skip the per-call validation of DistanceMap::set.
struct MapWriter {
  static void put(DistanceMap& m, int x, int y, double v) {
    m.values_[m.index(x, y)] = v;
    m.valid_[m.index(x, y)] = 1;
  }
};

namespace detail {

inline void require_probe_fits(const MultichannelImage& f, const Probe& probe) {
  require_compatible(probe.image(), f, "distance_map");
  if (probe.width() > f.width() || probe.height() > f.height()) {
    std::ostringstream os;
    os << "probe " << probe.width() << "x" << probe.height()
       << " is larger than image " << f.width() << "x" << f.height();
    throw UsageError(os.str());
  }
}

inline std::vector<double> log_samples(const MultichannelImage& img) {
  std::vector<double> out(img.samples().begin(), img.samples().end());
  for (double& v : out) v = lip_log(v, img.params());
  return out;
}

// Shared sliding-window driver. eval(window_lower, window_upper) receives the
// per-pixel bounds of one window and returns its distance.
template <class MakeEval>
DistanceMap sweep(const MultichannelImage& f, const Probe& probe, const MapOptions& opts,
                  MakeEval&& make_eval) {
  require_probe_fits(f, probe);
  const int w = f.width();
  const int tw = probe.width();
  const int th = probe.height();
  const int channels = f.channels();
  const int cols = w - tw + 1;
  const int rows = f.height() - th + 1;
  const std::vector<double> image_log = log_samples(f);
  const std::vector<double> probe_log = log_samples(probe.image());
  const Pixel anchor = probe.anchor();
  const std::size_t support = static_cast<std::size_t>(tw) * th;

  DistanceMap map(f.width(), f.height());
  for_each_row(rows, opts.threads, [&](int oy) {
    auto eval = make_eval();
    std::vector<double> lower(support);
    std::vector<double> upper(support);
    for (int ox = 0; ox < cols; ++ox) {
      std::size_t k = 0;
      for (int ty = 0; ty < th; ++ty) {
        const double* img = image_log.data() +
                            (static_cast<std::size_t>(oy + ty) * w + ox) * channels;
        const double* prb = probe_log.data() + static_cast<std::size_t>(ty) * tw * channels;
        for (int tx = 0; tx < tw; ++tx, ++k) {
          double lo = std::numeric_limits<double>::infinity();
          double hi = 0.0;
          for (int c = 0; c < channels; ++c) {
            const double r = img[tx * channels + c] / prb[tx * channels + c];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
          }
          lower[k] = lo;
          upper[k] = hi;
        }
      }
      MapWriter::put(map, ox + anchor.x, oy + anchor.y, eval(lower, upper));
    }
  });
  return map;
}

}  // namespace detail

/// Distance from the probe to the window anchored at every valid pixel.
inline DistanceMap distance_map(const MultichannelImage& f, const Probe& probe,
                                const MapOptions& opts = {}) {
  return detail::sweep(f, probe, opts, [] {
    return [](std::span<const double> lower, std::span<const double> upper) {
      const double mu = *std::min_element(lower.begin(), lower.end());
      const double lambda = *std::max_element(upper.begin(), upper.end());
      return std::log(lambda / mu);
    };
  });
}

/// As distance_map, but each window may drop up to floor((1 - p) #support)
/// pixels before its bounds are taken.
inline DistanceMap distance_map_tol(const MultichannelImage& f, const Probe& probe,
                                    const ToleranceSpec& tol, const MapOptions& opts = {}) {
  const std::size_t support = static_cast<std::size_t>(probe.width()) * probe.height();
  const std::size_t budget = tol.discard_budget(support);
  if (budget >= support) {
    std::ostringstream os;
    os << "tolerance p=" << tol.kept() << " would discard every probe pixel";
    throw UsageError(os.str());
  }
  return detail::sweep(f, probe, opts, [budget] {
    return [budget, solver = detail::TrimmedBoundsSolver{}](
               std::span<const double> lower, std::span<const double> upper) mutable {
      return solver.solve(lower, upper, budget).distance();
    };
  });
}

struct MapMinimum {
  Pixel location;
  double value = 0.0;
};

/// Global minimum over valid pixels; the row-major first wins ties.
inline MapMinimum map_minimum(const DistanceMap& map) {
  std::optional<MapMinimum> best;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x)
      if (map.is_valid(x, y) && (!best || map.value(x, y) < best->value))
        best = MapMinimum{{x, y}, map.value(x, y)};
  if (!best) throw UsageError("map_minimum: map has no valid pixels");
  return *best;
}

}  // namespace asplund
