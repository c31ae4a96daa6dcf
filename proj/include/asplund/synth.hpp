#pragma once

// Synthetic scenes and perturbations: LIP relighting, lighting drift, seeded
// sensor noise, brick walls and disc scenes with known match locations.
//
// Random draws use std::mt19937_64 (fully specified by the standard) with
// hand-written uniform and Gaussian transforms, so a seed produces the same
// image on every standard library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "asplund/errors.hpp"
#include "asplund/image.hpp"
#include "asplund/lip.hpp"

namespace asplund {

namespace rng {

inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), n > 0, without modulo bias.
inline std::uint64_t below(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do v = gen(); while (v >= limit);
  return v % n;
}

/// Standard normal sample (Box-Muller, one value per call).
inline double gaussian(std::mt19937_64& gen) {
  double u1;
  do u1 = uniform01(gen); while (u1 <= 0.0);
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rng

struct NoiseSpec {
  double variance = 0.0;  ///< on the normalized [0, 1] intensity scale
  double density = 0.0;   ///< fraction of pixels hit
  std::uint64_t seed = 0;

  void validate() const {
    if (!(variance >= 0.0) || !std::isfinite(variance)) throw DomainError("noise variance must be >= 0");
    if (!(density >= 0.0 && density <= 1.0)) throw DomainError("noise density must lie in [0, 1]");
  }
};

enum class DriftAxis { Horizontal, Vertical };

struct DriftSpec {
  DriftAxis axis = DriftAxis::Vertical;
  double alpha_start = 1.0;
  double alpha_end = 1.0;

  void validate() const {
    if (!(alpha_start > 0.0 && alpha_end > 0.0) || !std::isfinite(alpha_start) ||
        !std::isfinite(alpha_end)) {
      throw DomainError("drift multipliers must be finite and > 0");
    }
  }
};

/// lip_mul(alpha, .) on every sample. alpha > 1 darkens, alpha < 1 brightens.
inline MultichannelImage global_relight(const MultichannelImage& img, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("relight factor must be > 0");
  const GrayScaleParams& p = img.params();
  return img.transformed([&](double v, int, int, int) { return lip_mul(alpha, v, p); });
}

/// Multiplier interpolated linearly along the axis: row (or column) i of n
/// gets alpha_start + (alpha_end - alpha_start) i / (n - 1).
inline MultichannelImage apply_drift(const MultichannelImage& img, const DriftSpec& drift) {
  drift.validate();
  const bool vertical = drift.axis == DriftAxis::Vertical;
  const int extent = vertical ? img.height() : img.width();
  const GrayScaleParams& p = img.params();
  auto alpha_at = [&](int i) {
    if (extent == 1) return drift.alpha_start;
    return drift.alpha_start + (drift.alpha_end - drift.alpha_start) * i / (extent - 1);
  };
  return img.transformed([&](double v, int x, int y, int) {
    return lip_mul(alpha_at(vertical ? y : x), v, p);
  });
}

/// Hits floor(density * #pixels) distinct pixels; every channel of a hit
/// pixel gets an independent N(0, variance) sample, scaled by M - 1, added in
/// classic intensity and clipped to [0, M - 1]. Other pixels are untouched.
inline MultichannelImage add_noise(const MultichannelImage& img, const NoiseSpec& spec) {
  spec.validate();
  const std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
  const auto hits = static_cast<std::size_t>(std::floor(spec.density * static_cast<double>(n) + 1e-9));
  if (hits == 0 || spec.variance == 0.0) return img;

  std::mt19937_64 gen(spec.seed);
  std::vector<std::uint32_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = 0; i < hits; ++i) {
    std::swap(order[i], order[i + rng::below(gen, n - i)]);
  }

  const double top = img.params().m() - 1.0;
  const double sigma = std::sqrt(spec.variance);
  MultichannelImage out = img;
  for (std::size_t k = 0; k < hits; ++k) {
    const int x = static_cast<int>(order[k] % img.width());
    const int y = static_cast<int>(order[k] / img.width());
    for (int c = 0; c < img.channels(); ++c) {
      const double classic = top - img.at(x, y, c);
      const double noisy = std::clamp(classic + sigma * rng::gaussian(gen) * top, 0.0, top);
      out.set(x, y, c, top - noisy);
    }
  }
  return out;
}

/// A generated image with the anchors where its canonical probe matches.
struct Scene {
  MultichannelImage image;
  std::vector<Pixel> ground_truth;  ///< row-major order
  Rect probe_rect;                  ///< probe support around ground_truth[0]

  MultichannelImage probe_image() const { return image.crop(probe_rect); }
};

/// Stack-bond wall: bricks of one colour separated by mortar lines, with a
/// mortar border. Colours are LIP values.
struct BrickSceneSpec {
  int columns = 4;
  int rows = 6;
  int brick_width = 60;
  int brick_height = 28;
  int mortar = 1;
  std::vector<double> brick_colour{75.0, 175.0, 205.0};
  std::vector<double> mortar_colour{55.0, 55.0, 65.0};
  /// Each brick's colour is LIP-multiplied by exp(U(-jitter, jitter)).
  double shade_jitter = 0.0;
  std::uint64_t seed = 0;
};

/// Canvas with round discs on a flat background. `count` discs use
/// disc_colour and are the ground truth; `distractors` use distractor_colour.
/// The square of side 2 (radius + padding) + 1 around each disc is kept free
/// of other discs and inside the canvas.
struct DiscSceneSpec {
  int width = 160;
  int height = 120;
  int radius = 7;
  int padding = 2;
  int count = 3;
  int distractors = 0;
  std::vector<double> background{40.0, 40.0, 40.0};
  std::vector<double> disc_colour{150.0, 60.0, 30.0};
  std::vector<double> distractor_colour{30.0, 70.0, 150.0};
  std::uint64_t seed = 0;
};

namespace detail {

inline void require_colour(const std::vector<double>& colour, std::size_t channels,
                           const GrayScaleParams& p, const char* what) {
  if (colour.size() != channels) {
    throw UsageError(std::string(what) + ": colour channel counts differ");
  }
  for (double v : colour) require_grey(v, p, what);
}

inline Pixel centred_anchor(const Rect& r) { return {r.x + (r.width - 1) / 2, r.y + (r.height - 1) / 2}; }

}  // namespace detail

inline Scene gen_bricks(const BrickSceneSpec& spec, const GrayScaleParams& params = GrayScaleParams{}) {
  if (spec.columns < 1 || spec.rows < 1 || spec.brick_width < 1 || spec.brick_height < 1 ||
      spec.mortar < 1) {
    throw UsageError("bricks: counts and sizes must be positive");
  }
  if (!(spec.shade_jitter >= 0.0)) throw UsageError("bricks: jitter must be >= 0");
  const std::size_t channels = spec.brick_colour.size();
  detail::require_colour(spec.brick_colour, channels, params, "bricks");
  detail::require_colour(spec.mortar_colour, channels, params, "bricks");

  const int w = spec.mortar + spec.columns * (spec.brick_width + spec.mortar);
  const int h = spec.mortar + spec.rows * (spec.brick_height + spec.mortar);
  MultichannelImage img(w, h, static_cast<int>(channels), params);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.set_pixel(x, y, spec.mortar_colour);

  std::mt19937_64 gen(spec.seed);
  Scene scene{img, {}, {}};
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.columns; ++c) {
      std::vector<double> colour = spec.brick_colour;
      if (spec.shade_jitter > 0.0) {
        const double alpha = std::exp(spec.shade_jitter * (2.0 * rng::uniform01(gen) - 1.0));
        for (double& v : colour) v = lip_mul(alpha, v, params);
      }
      const int x0 = spec.mortar + c * (spec.brick_width + spec.mortar);
      const int y0 = spec.mortar + r * (spec.brick_height + spec.mortar);
      for (int y = y0; y < y0 + spec.brick_height; ++y)
        for (int x = x0; x < x0 + spec.brick_width; ++x) scene.image.set_pixel(x, y, colour);
      const Rect support{x0 - spec.mortar, y0 - spec.mortar, spec.brick_width + 2 * spec.mortar,
                         spec.brick_height + 2 * spec.mortar};
      if (r == 0 && c == 0) scene.probe_rect = support;
      scene.ground_truth.push_back(detail::centred_anchor(support));
    }
  }
  return scene;
}

inline Scene gen_discs(const DiscSceneSpec& spec, const GrayScaleParams& params = GrayScaleParams{}) {
  if (spec.width < 1 || spec.height < 1 || spec.radius < 0 || spec.padding < 0 || spec.count < 1 ||
      spec.distractors < 0) {
    throw UsageError("discs: invalid geometry");
  }
  const std::size_t channels = spec.background.size();
  detail::require_colour(spec.background, channels, params, "discs");
  detail::require_colour(spec.disc_colour, channels, params, "discs");
  detail::require_colour(spec.distractor_colour, channels, params, "discs");

  const int half = spec.radius + spec.padding;
  const int side = 2 * half + 1;
  if (side > spec.width || side > spec.height) throw UsageError("discs: disc does not fit the canvas");

  std::mt19937_64 gen(spec.seed);
  std::vector<Pixel> centres;
  const int total = spec.count + spec.distractors;
  constexpr int kAttempts = 20000;
  for (int d = 0; d < total; ++d) {
    bool placed = false;
    for (int attempt = 0; attempt < kAttempts && !placed; ++attempt) {
      const Pixel c{half + static_cast<int>(rng::below(gen, spec.width - side + 1)),
                    half + static_cast<int>(rng::below(gen, spec.height - side + 1))};
      placed = std::all_of(centres.begin(), centres.end(), [&](Pixel o) {
        return std::abs(o.x - c.x) > 2 * half || std::abs(o.y - c.y) > 2 * half;
      });
      if (placed) centres.push_back(c);
    }
    if (!placed) {
      std::ostringstream os;
      os << "discs: cannot place " << total << " discs of radius " << spec.radius
         << " on a " << spec.width << "x" << spec.height << " canvas without overlap";
      throw UsageError(os.str());
    }
  }

  MultichannelImage img(spec.width, spec.height, static_cast<int>(channels), params);
  for (int y = 0; y < spec.height; ++y)
    for (int x = 0; x < spec.width; ++x) img.set_pixel(x, y, spec.background);
  const long r2 = static_cast<long>(spec.radius) * spec.radius;
  for (int d = 0; d < total; ++d) {
    const Pixel c = centres[d];
    const auto& colour = d < spec.count ? spec.disc_colour : spec.distractor_colour;
    for (int y = c.y - spec.radius; y <= c.y + spec.radius; ++y)
      for (int x = c.x - spec.radius; x <= c.x + spec.radius; ++x) {
        const long dx = x - c.x;
        const long dy = y - c.y;
        if (dx * dx + dy * dy <= r2) img.set_pixel(x, y, colour);
      }
  }

  std::vector<Pixel> truth(centres.begin(), centres.begin() + spec.count);
  std::sort(truth.begin(), truth.end(), row_major_less);
  const Rect probe{truth.front().x - half, truth.front().y - half, side, side};
  return Scene{std::move(img), std::move(truth), probe};
}

}  // namespace asplund
