#pragma once

// Logarithmic Image Processing arithmetic on a bounded grey scale [0, M).
//
// Grey levels live on the inverted scale: 0 is the source intensity (white,
// full transmission) and M is the unreachable black limit.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "asplund/errors.hpp"

namespace asplund {

class GrayScaleParams {
 public:
  /// Defaults to the 8-bit scale: M = 256, clamp range [1, 255].
  explicit GrayScaleParams(double m = 256.0, double v_min = 1.0,
                           std::optional<double> v_max = std::nullopt)
      : m_(m), v_min_(v_min), v_max_(v_max.value_or(m - 1.0)) {
    if (!(m_ > 1.0) || !std::isfinite(m_)) {
      throw DomainError("grey scale bound M must be finite and > 1");
    }
    if (!(v_min_ > 0.0 && v_min_ <= v_max_ && v_max_ < m_)) {
      std::ostringstream os;
      os << "clamp range must satisfy 0 < v_min <= v_max < M (got v_min="
         << v_min_ << ", v_max=" << v_max_ << ", M=" << m_ << ")";
      throw DomainError(os.str());
    }
  }

  double m() const { return m_; }
  double v_min() const { return v_min_; }
  double v_max() const { return v_max_; }

  bool contains(double v) const { return v >= 0.0 && v < m_; }

  bool operator==(const GrayScaleParams&) const = default;

 private:
  double m_;
  double v_min_;
  double v_max_;
};

namespace detail {

inline void require_grey(double v, const GrayScaleParams& params,
                         const char* what) {
  if (!params.contains(v)) {
    std::ostringstream os;
    os << what << ": grey value " << v << " outside [0, " << params.m() << ")";
    throw DomainError(os.str());
  }
}

// Largest double strictly below M; results that round up to M saturate here.
inline double below_bound(const GrayScaleParams& params) {
  return std::nextafter(params.m(), 0.0);
}

}  // namespace detail

/// Fraction of source light passing the obstacle: 1 - v/M.
inline double transmittance(double v, const GrayScaleParams& params = GrayScaleParams{}) {
  detail::require_grey(v, params, "transmittance");
  return 1.0 - v / params.m();
}

/// Superposition of two obstacles: a + b - a*b/M.
inline double lip_add(double a, double b, const GrayScaleParams& params = GrayScaleParams{}) {
  detail::require_grey(a, params, "lip_add");
  detail::require_grey(b, params, "lip_add");
  const double sum = a + b - a * b / params.m();
  return std::min(sum, detail::below_bound(params));
}

/// Thickness scaling: M - M (1 - a/M)^lambda.
///
/// Evaluated as -M expm1(lambda log1p(-a/M)) so that lip_log of the result is
/// lambda * lip_log(a) to full precision.
inline double lip_mul(double lambda, double a,
                      const GrayScaleParams& params = GrayScaleParams{}) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    std::ostringstream os;
    os << "lip_mul: scalar must be finite and >= 0 (got " << lambda << ")";
    throw DomainError(os.str());
  }
  detail::require_grey(a, params, "lip_mul");
  const double m = params.m();
  const double v = -m * std::expm1(lambda * std::log1p(-a / m));
  return std::clamp(v, 0.0, detail::below_bound(params));
}

/// -ln(1 - v/M) after clamping v into [v_min, v_max]. Always finite and > 0.
inline double lip_log(double v, const GrayScaleParams& params = GrayScaleParams{}) {
  const double c = std::clamp(v, params.v_min(), params.v_max());
  return -std::log1p(-c / params.m());
}

/// The exact scalar k with k (x) probe_val = f_val, on clamped values.
inline double ratio(double f_val, double probe_val,
                    const GrayScaleParams& params = GrayScaleParams{}) {
  return lip_log(f_val, params) / lip_log(probe_val, params);
}

/// Classic intensity (0 = black) to the LIP scale (0 = white): (M - 1) - v.
/// An involution on integer 8-bit data.
inline double invert_intensity(double v, const GrayScaleParams& params = GrayScaleParams{}) {
  const double top = params.m() - 1.0;
  if (!(v >= 0.0 && v <= top)) {
    std::ostringstream os;
    os << "invert_intensity: value " << v << " outside [0, " << top << "]";
    throw DomainError(os.str());
  }
  return top - v;
}

}  // namespace asplund
