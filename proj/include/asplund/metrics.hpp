#pragma once

// Asplund distances between LIP images.
//
// Every distance here reduces to the same computation: collect the LIP
// log-ratios r = lip_log(target) / lip_log(probe) over a set of samples, take
// lambda = max r and mu = min r, and return ln(lambda / mu). lambda (x) probe
// is the tightest homothetic copy of the probe lying above the target, mu (x)
// probe the tightest one below it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "asplund/errors.hpp"
#include "asplund/image.hpp"
#include "asplund/lip.hpp"

namespace asplund {

/// Lower and upper probing scalars, 0 < mu <= lambda.
struct ProbeBounds {
  double mu = 1.0;
  double lambda = 1.0;

  double distance() const { return std::log(lambda / mu); }
};

/// Fraction p of the points that must be kept; p = 1 disables tolerance.
class ToleranceSpec {
 public:
  explicit ToleranceSpec(double kept = 1.0) : kept_(kept) {
    if (!(kept > 0.0 && kept <= 1.0)) {
      std::ostringstream os;
      os << "tolerance p must lie in (0, 1] (got " << kept << ")";
      throw UsageError(os.str());
    }
  }

  double kept() const { return kept_; }

  /// Number of points that may be discarded out of n: floor((1 - p) n).
  /// The small offset absorbs representation error, so that p = 0.8 on ten
  /// points discards two rather than one.
  std::size_t discard_budget(std::size_t n) const {
    const double k = std::floor((1.0 - kept_) * static_cast<double>(n) + 1e-9);
    return k <= 0.0 ? 0 : static_cast<std::size_t>(k);
  }

 private:
  double kept_;
};

/// Per-sample LIP log-ratios of a target against a probe over a set of
/// points, stored point-major (all channels of point 0, then point 1, ...).
class RatioField {
 public:
  RatioField(std::size_t points, int channels, std::vector<double> ratios)
      : points_(points), channels_(channels), ratios_(std::move(ratios)) {
    if (ratios_.size() != points_ * static_cast<std::size_t>(channels_)) {
      throw UsageError("RatioField: size does not match shape");
    }
  }

  std::size_t points() const { return points_; }
  int channels() const { return channels_; }
  double at(std::size_t point, int c) const { return ratios_[point * channels_ + c]; }

  /// min_c r_c(x) for one point: the largest scalar keeping the probe below.
  double lower(std::size_t point) const {
    const auto* r = ratios_.data() + point * channels_;
    return *std::min_element(r, r + channels_);
  }
  /// max_c r_c(x): the smallest scalar keeping the probe above.
  double upper(std::size_t point) const {
    const auto* r = ratios_.data() + point * channels_;
    return *std::max_element(r, r + channels_);
  }

 private:
  std::size_t points_;
  int channels_;
  std::vector<double> ratios_;
};

namespace detail {

inline void require_compatible(const MultichannelImage& a, const MultichannelImage& b,
                               const char* what) {
  if (a.channels() != b.channels()) {
    std::ostringstream os;
    os << what << ": channel counts differ (" << a.channels() << " vs "
       << b.channels() << ")";
    throw UsageError(os.str());
  }
  if (!(a.params() == b.params())) {
    throw UsageError(std::string(what) + ": grey-scale parameters differ");
  }
}

inline void require_region(const Region& region, const MultichannelImage& a,
                           const MultichannelImage& b, const char* what) {
  if (region.empty()) throw UsageError(std::string(what) + ": empty region");
  for (Pixel p : region.pixels()) {
    if (!a.contains(p) || !b.contains(p)) {
      std::ostringstream os;
      os << what << ": region pixel (" << p.x << "," << p.y
         << ") lies outside an image domain";
      throw UsageError(os.str());
    }
  }
}

/// Exact solver for the tolerance problem: among all ways of discarding at
/// most `budget` points, minimize max(upper) / min(lower) over the kept ones.
///
/// For each split j, the j points with the smallest lower bound go first, then
/// the budget - j points with the largest upper bound among the rest. An
/// optimal kept set drops exactly the points below its mu plus those above its
/// lambda, so taking j = #(points below mu) reproduces it or something better.
/// Ties are broken by point index.
class TrimmedBoundsSolver {
 public:
  ProbeBounds solve(std::span<const double> lower, std::span<const double> upper,
                    std::size_t budget, std::vector<std::size_t>* discarded = nullptr) {
    const std::size_t n = lower.size();
    if (n == 0 || upper.size() != n) throw UsageError("tolerance: no points");
    if (budget >= n) {
      std::ostringstream os;
      os << "tolerance would discard " << budget << " of " << n << " points";
      throw UsageError(os.str());
    }
    if (discarded) discarded->clear();
    if (budget == 0) {
      return {*std::min_element(lower.begin(), lower.end()),
              *std::max_element(upper.begin(), upper.end())};
    }

    const std::size_t head = budget + 1;
    auto lower_first = [&](std::uint32_t a, std::uint32_t b) {
      return lower[a] != lower[b] ? lower[a] < lower[b] : a < b;
    };
    auto upper_first = [&](std::uint32_t a, std::uint32_t b) {
      return upper[a] != upper[b] ? upper[a] > upper[b] : a < b;
    };
    select_head(by_lower_, n, head, lower_first);
    select_head(by_upper_, n, head, upper_first);

    if (rank_lower_.size() < n) {
      rank_lower_.assign(n, kUnranked);
      rank_upper_.assign(n, kUnranked);
    }
    for (std::size_t k = 0; k < head; ++k) {
      rank_lower_[by_lower_[k]] = k;
      rank_upper_[by_upper_[k]] = k;
    }

    ProbeBounds best{};
    double best_ratio = std::numeric_limits<double>::infinity();
    std::size_t best_split = 0;
    std::size_t best_stop = 0;
    for (std::size_t j = 0; j <= budget; ++j) {
      // Upper side: skip points already dropped by the lower side, drop the
      // next budget - j, the following one is lambda.
      std::size_t stop = 0;
      std::size_t taken = 0;
      double lambda = 0.0;
      for (std::size_t pos = 0; pos < head; ++pos) {
        const std::uint32_t i = by_upper_[pos];
        if (rank_lower_[i] < j) continue;
        if (taken < budget - j) {
          ++taken;
          continue;
        }
        lambda = upper[i];
        stop = pos;
        break;
      }
      double mu = 0.0;
      for (std::size_t pos = j; pos < head; ++pos) {
        const std::uint32_t i = by_lower_[pos];
        if (rank_upper_[i] < stop) continue;
        mu = lower[i];
        break;
      }
      const double r = lambda / mu;
      if (r < best_ratio) {
        best_ratio = r;
        best = {mu, lambda};
        best_split = j;
        best_stop = stop;
      }
    }

    if (discarded) {
      for (std::size_t k = 0; k < best_split; ++k) discarded->push_back(by_lower_[k]);
      for (std::size_t pos = 0; pos < best_stop; ++pos) {
        const std::uint32_t i = by_upper_[pos];
        if (rank_lower_[i] >= best_split) discarded->push_back(i);
      }
      std::sort(discarded->begin(), discarded->end());
    }

    for (std::size_t k = 0; k < head; ++k) {
      rank_lower_[by_lower_[k]] = kUnranked;
      rank_upper_[by_upper_[k]] = kUnranked;
    }
    return best;
  }

 private:
  static constexpr std::size_t kUnranked = std::numeric_limits<std::size_t>::max();

  // Leaves the first `head` entries of idx sorted under the strict total
  // order `less`. One pass with a bounded max-heap: most indices are
  // rejected by a single comparison against the current worst kept entry.
  template <class Less>
  static void select_head(std::vector<std::uint32_t>& idx, std::size_t n, std::size_t head,
                          Less less) {
    idx.clear();
    for (std::uint32_t i = 0; i < n; ++i) {
      if (idx.size() < head) {
        idx.push_back(i);
        std::push_heap(idx.begin(), idx.end(), less);
      } else if (less(i, idx.front())) {
        std::pop_heap(idx.begin(), idx.end(), less);
        idx.back() = i;
        std::push_heap(idx.begin(), idx.end(), less);
      }
    }
    std::sort_heap(idx.begin(), idx.end(), less);
  }

  std::vector<std::uint32_t> by_lower_;
  std::vector<std::uint32_t> by_upper_;
  std::vector<std::size_t> rank_lower_;
  std::vector<std::size_t> rank_upper_;
};

}  // namespace detail

struct ColorDistance {
  double distance = 0.0;
  ProbeBounds bounds;
};

struct TolerantDistance {
  double distance = 0.0;
  ProbeBounds bounds;
  std::vector<Pixel> discarded;
};

/// Distance between two vector-pixels; `probe` is the one being scaled.
inline ColorDistance pixel_color_distance(std::span<const double> probe,
                                          std::span<const double> value,
                                          const GrayScaleParams& params = GrayScaleParams{}) {
  if (probe.size() != value.size() || probe.empty()) {
    throw UsageError("pixel_color_distance: channel counts differ");
  }
  ProbeBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t c = 0; c < probe.size(); ++c) {
    const double r = ratio(value[c], probe[c], params);
    b.mu = std::min(b.mu, r);
    b.lambda = std::max(b.lambda, r);
  }
  return {b.distance(), b};
}

/// Ratios of `target` against `probe` over `region`, both images sharing the
/// region's coordinate frame.
inline RatioField ratio_field(const MultichannelImage& probe, const MultichannelImage& target,
                              const Region& region) {
  detail::require_compatible(probe, target, "ratio_field");
  detail::require_region(region, probe, target, "ratio_field");
  const int channels = probe.channels();
  const GrayScaleParams& params = probe.params();
  std::vector<double> r;
  r.reserve(region.size() * channels);
  for (Pixel p : region.pixels()) {
    for (int c = 0; c < channels; ++c) {
      r.push_back(ratio(target.at(p.x, p.y, c), probe.at(p.x, p.y, c), params));
    }
  }
  return RatioField(region.size(), channels, std::move(r));
}

/// Bounds over all samples of a ratio field, no tolerance.
inline ProbeBounds field_bounds(const RatioField& field) {
  ProbeBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < field.points(); ++i) {
    b.mu = std::min(b.mu, field.lower(i));
    b.lambda = std::max(b.lambda, field.upper(i));
  }
  return b;
}

/// Grey-scale region distance; `g` is the probe scaled to bound `f`.
inline double gray_region_distance(const LipImage& f, const LipImage& g, const Region& region) {
  return field_bounds(ratio_field(g.as_multichannel(), f.as_multichannel(), region))
      .distance();
}

/// Global multichannel distance over a region: `f` is the probe, scaled per
/// channel and per pixel by a single scalar to bound `g`.
inline ColorDistance color_region_distance(const MultichannelImage& f,
                                           const MultichannelImage& g, const Region& region) {
  const ProbeBounds b = field_bounds(ratio_field(f, g, region));
  return {b.distance(), b};
}

/// Mean of the per-pixel colour distances over the region.
inline double d1_region(const MultichannelImage& f, const MultichannelImage& g,
                        const Region& region) {
  const RatioField field = ratio_field(f, g, region);
  double sum = 0.0;
  for (std::size_t i = 0; i < field.points(); ++i) {
    sum += std::log(field.upper(i) / field.lower(i));
  }
  return sum / static_cast<double>(field.points());
}

/// Maximum of the per-pixel colour distances over the region.
inline double dinf_region(const MultichannelImage& f, const MultichannelImage& g,
                          const Region& region) {
  const RatioField field = ratio_field(f, g, region);
  double worst = 0.0;
  for (std::size_t i = 0; i < field.points(); ++i) {
    worst = std::max(worst, std::log(field.upper(i) / field.lower(i)));
  }
  return worst;
}

/// Tolerance variant on a precomputed field. `discarded` receives point
/// indices into the field.
inline ProbeBounds trimmed_bounds(const RatioField& field, const ToleranceSpec& tol,
                                  std::vector<std::size_t>* discarded = nullptr) {
  std::vector<double> lower(field.points());
  std::vector<double> upper(field.points());
  for (std::size_t i = 0; i < field.points(); ++i) {
    lower[i] = field.lower(i);
    upper[i] = field.upper(i);
  }
  detail::TrimmedBoundsSolver solver;
  return solver.solve(lower, upper, tol.discard_budget(field.points()), discarded);
}

/// Smallest region distance achievable after discarding whole pixels, keeping
/// at least the fraction tol.kept() of the region. `f` is the probe.
inline TolerantDistance tolerance_region_distance(const MultichannelImage& f,
                                                  const MultichannelImage& g,
                                                  const Region& region,
                                                  const ToleranceSpec& tol) {
  const RatioField field = ratio_field(f, g, region);
  std::vector<std::size_t> dropped;
  const ProbeBounds b = trimmed_bounds(field, tol, &dropped);
  TolerantDistance out{b.distance(), b, {}};
  out.discarded.reserve(dropped.size());
  for (std::size_t i : dropped) out.discarded.push_back(region[i]);
  return out;
}

}  // namespace asplund
