#pragma once

// From distance maps to match locations: regional minima (optionally
// h-minima), one representative per minimum, score threshold and greedy
// suppression. Plateaus and minima use 4-connectivity.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "asplund/errors.hpp"
#include "asplund/image.hpp"
#include "asplund/probe_map.hpp"

namespace asplund {

class BinaryMask {
 public:
  BinaryMask(int width, int height)
      : width_(width), height_(height),
        bits_(static_cast<std::size_t>(width) * height, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  bool at(Pixel p) const { return at(p.x, p.y); }
  void set(int x, int y, bool on = true) { bits_[index(x, y)] = on ? 1 : 0; }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto b : bits_) n += b;
    return n;
  }

  bool operator==(const BinaryMask&) const = default;

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

namespace detail {

constexpr std::array<Pixel, 4> kNeighbours4{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

// Map values as a plain grid; invalid pixels are +inf.
inline std::vector<double> map_grid(const DistanceMap& map) {
  return {map.values().begin(), map.values().end()};
}

// Labels 4-connected components of pixels accepted by `member`, where two
// neighbours join when `same(a, b)` holds. Returns labels (-1 for non-members)
// and the component count. Labels follow row-major order of first pixel.
template <class Member, class Same>
std::pair<std::vector<int>, int> label_components(int w, int h, Member&& member, Same&& same) {
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<int> stack;
  int next = 0;
  for (int start = 0; start < w * h; ++start) {
    if (label[start] >= 0 || !member(start)) continue;
    label[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      const int px = p % w;
      const int py = p / w;
      for (Pixel d : kNeighbours4) {
        const int nx = px + d.x;
        const int ny = py + d.y;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const int q = ny * w + nx;
        if (label[q] >= 0 || !member(q) || !same(p, q)) continue;
        label[q] = next;
        stack.push_back(q);
      }
    }
    ++next;
  }
  return {std::move(label), next};
}

// Exact regional minima of a grid where +inf marks pixels outside the domain.
inline BinaryMask plateau_minima(const std::vector<double>& v, int w, int h) {
  auto finite = [&](int p) { return std::isfinite(v[p]); };
  auto [label, count] =
      label_components(w, h, finite, [&](int a, int b) { return v[a] == v[b]; });
  std::vector<std::uint8_t> is_min(count, 1);
  for (int p = 0; p < w * h; ++p) {
    if (label[p] < 0) continue;
    const int px = p % w;
    const int py = p / w;
    for (Pixel d : kNeighbours4) {
      const int nx = px + d.x;
      const int ny = py + d.y;
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      if (v[ny * w + nx] < v[p]) {
        is_min[label[p]] = 0;
        break;
      }
    }
  }
  BinaryMask mask(w, h);
  for (int p = 0; p < w * h; ++p)
    if (label[p] >= 0 && is_min[label[p]]) mask.set(p % w, p / w);
  return mask;
}

}  // namespace detail

/// Grey-level reconstruction by erosion of `marker` above `mask` (marker >=
/// mask pointwise), 4-connectivity. Computed with alternating raster and
/// anti-raster sweeps until nothing changes; the fixpoint is the same as that
/// of iterated elementary geodesic erosions.
inline std::vector<double> reconstruct_by_erosion(std::vector<double> marker,
                                                  const std::vector<double>& mask, int w, int h) {
  if (marker.size() != mask.size() || marker.size() != static_cast<std::size_t>(w) * h) {
    throw UsageError("reconstruct_by_erosion: size mismatch");
  }
  for (std::size_t i = 0; i < marker.size(); ++i) marker[i] = std::max(marker[i], mask[i]);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int p = y * w + x;
        double m = marker[p];
        if (x > 0) m = std::min(m, marker[p - 1]);
        if (y > 0) m = std::min(m, marker[p - w]);
        m = std::max(m, mask[p]);
        if (m != marker[p]) {
          marker[p] = m;
          changed = true;
        }
      }
    }
    for (int y = h - 1; y >= 0; --y) {
      for (int x = w - 1; x >= 0; --x) {
        const int p = y * w + x;
        double m = marker[p];
        if (x + 1 < w) m = std::min(m, marker[p + 1]);
        if (y + 1 < h) m = std::min(m, marker[p + w]);
        m = std::max(m, mask[p]);
        if (m != marker[p]) {
          marker[p] = m;
          changed = true;
        }
      }
    }
  }
  return marker;
}

/// h = 0: regional minima of the map. h > 0: h-minima, i.e. regional minima
/// of the reconstruction by erosion of map + h over the map. Invalid pixels
/// never belong to a minimum.
inline BinaryMask regional_minima(const DistanceMap& map, double h = 0.0) {
  if (!(h >= 0.0) || !std::isfinite(h)) throw UsageError("regional_minima: h must be >= 0");
  const int w = map.width();
  const int ht = map.height();
  std::vector<double> v = detail::map_grid(map);
  if (h > 0.0) {
    std::vector<double> raised = v;
    for (double& x : raised) x += h;
    v = reconstruct_by_erosion(std::move(raised), v, w, ht);
  }
  return detail::plateau_minima(v, w, ht);
}

struct ProbeShape {
  int width = 1;
  int height = 1;
  Pixel anchor{0, 0};

  static ProbeShape of(const Probe& p) { return {p.width(), p.height(), p.anchor()}; }
  bool operator==(const ProbeShape&) const = default;
};

struct Match {
  Pixel location;
  double score = 0.0;

  bool operator==(const Match&) const = default;
};

/// Matches sorted by ascending score; pairwise Chebyshev distance at least
/// the suppression radius used to build it.
struct MatchSet {
  std::vector<Match> matches;
  ProbeShape probe;

  bool empty() const { return matches.empty(); }
  std::size_t size() const { return matches.size(); }
};

struct MatchOptions {
  double score_max = std::numeric_limits<double>::infinity();
  int min_separation = 0;
  double h = 0.0;
};

inline int chebyshev(Pixel a, Pixel b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

inline MatchSet extract_matches(const DistanceMap& map, const MatchOptions& opts,
                                ProbeShape shape = {}) {
  if (!(opts.score_max >= 0.0)) throw UsageError("extract_matches: score_max must be >= 0");
  if (opts.min_separation < 0) throw UsageError("extract_matches: min_separation must be >= 0");
  const BinaryMask mask = regional_minima(map, opts.h);
  const int w = map.width();
  const int h = map.height();
  auto [label, count] = detail::label_components(
      w, h, [&](int p) { return mask.at(p % w, p / w); }, [](int, int) { return true; });

  // Lowest map value per component; row-major scan keeps the first on ties.
  std::vector<std::optional<Match>> best(count);
  for (int p = 0; p < w * h; ++p) {
    if (label[p] < 0) continue;
    const Match m{{p % w, p / w}, map.value(p % w, p / w)};
    auto& b = best[label[p]];
    if (!b || m.score < b->score) b = m;
  }

  std::vector<Match> candidates;
  for (const auto& b : best)
    if (b && b->score <= opts.score_max) candidates.push_back(*b);
  std::sort(candidates.begin(), candidates.end(), [](const Match& a, const Match& b) {
    if (a.score != b.score) return a.score < b.score;
    return row_major_less(a.location, b.location);
  });

  MatchSet out;
  out.probe = shape;
  for (const Match& c : candidates) {
    const bool clear = std::all_of(out.matches.begin(), out.matches.end(), [&](const Match& k) {
      return chebyshev(k.location, c.location) >= opts.min_separation;
    });
    if (clear) out.matches.push_back(c);
  }
  return out;
}

inline MatchSet extract_matches(const DistanceMap& map, double score_max, int min_separation,
                                ProbeShape shape = {}) {
  return extract_matches(map, MatchOptions{score_max, min_separation, 0.0}, shape);
}

/// Copy of `image` with a one-pixel outline of the probe support drawn around
/// every match. Default colour is LIP 0 (white) on every channel.
inline MultichannelImage overlay(const MultichannelImage& image, const MatchSet& matches,
                                 std::vector<double> colour = {}) {
  if (colour.empty()) colour.assign(image.channels(), 0.0);
  if (colour.size() != static_cast<std::size_t>(image.channels())) {
    throw UsageError("overlay: colour channel count differs from image");
  }
  MultichannelImage out = image;
  const ProbeShape& s = matches.probe;
  for (const Match& m : matches.matches) {
    const int x0 = m.location.x - s.anchor.x;
    const int y0 = m.location.y - s.anchor.y;
    const int x1 = x0 + s.width - 1;
    const int y1 = y0 + s.height - 1;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const bool border = x == x0 || x == x1 || y == y0 || y == y1;
        if (border && out.contains({x, y})) out.set_pixel(x, y, colour);
      }
    }
  }
  return out;
}

/// Text form: "# probe WxH anchor ax,ay" then one "x y score" line per match.
inline std::string format_match_set(const MatchSet& set) {
  std::ostringstream os;
  os << "# probe " << set.probe.width << "x" << set.probe.height << " anchor "
     << set.probe.anchor.x << "," << set.probe.anchor.y << "\n";
  os << std::fixed << std::setprecision(6);
  for (const Match& m : set.matches) os << m.location.x << " " << m.location.y << " " << m.score << "\n";
  return os.str();
}

inline MatchSet parse_match_set(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  MatchSet set;
  if (!std::getline(is, line)) throw IoError("match list: missing header");
  {
    std::istringstream hs(line);
    std::string hash, word, dims, anchor_word, anchor;
    hs >> hash >> word >> dims >> anchor_word >> anchor;
    char x1 = 0;
    char c1 = 0;
    std::istringstream ds(dims);
    std::istringstream as(anchor);
    if (hash != "#" || word != "probe" || anchor_word != "anchor" ||
        !(ds >> set.probe.width >> x1 >> set.probe.height) || x1 != 'x' ||
        !(as >> set.probe.anchor.x >> c1 >> set.probe.anchor.y) || c1 != ',') {
      throw IoError("match list: malformed header '" + line + "'");
    }
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Match m;
    if (!(ls >> m.location.x >> m.location.y >> m.score)) {
      throw IoError("match list: malformed line '" + line + "'");
    }
    set.matches.push_back(m);
  }
  return set;
}

}  // namespace asplund
