#pragma once

// Scalar formulas shared by the scalar backend, the tails of the SIMD
// backends and the multiprecision billiard.

#include <cmath>
#include <cstddef>
#include <limits>

namespace lorentz::detail {

template <class Real>
struct NearestHitT {
  Real t;
  int index;
};

template <class Real>
inline bool circle_entry(const Real& cx, const Real& cy, const Real& r2, const Real& ox,
                         const Real& oy, const Real& dx, const Real& dy, Real& t) {
  using std::sqrt;
  const Real px = ox - cx;
  const Real py = oy - cy;
  const Real b = px * dx + py * dy;
  const Real c = (px * px + py * py) - r2;
  const Real disc = b * b - c;
  if (!(b < 0) || !(disc > 0)) return false;
  // Entry root written without cancellation.
  t = c / (sqrt(disc) - b);
  return true;
}

template <class Real>
NearestHitT<Real> nearest_hit_reference(const Real* cx, const Real* cy, const Real* r2,
                                        std::size_t n, const Real& ox, const Real& oy,
                                        const Real& dx, const Real& dy) {
  NearestHitT<Real> best{Real(std::numeric_limits<double>::infinity()), -1};
  Real t;
  for (std::size_t j = 0; j < n; ++j) {
    if (circle_entry(cx[j], cy[j], r2[j], ox, oy, dx, dy, t) && t < best.t) {
      best = {t, static_cast<int>(j)};
    }
  }
  return best;
}

inline double triangle_kernel_one(double a, double b) {
  const double s = a + b;
  return 1.0 / (a * b + s * (1.0 - s));
}

inline double importance_ratio_one(double u, double v, double w) {
  const double s = (u + v) + w;
  const double f = (1.0 - s) / ((u * v + u * w) + v * w);
  const double radial = 1.0 / (s * s);
  const double edges = ((1.0 / ((1.0 - u) * (v + w)) + 1.0 / ((1.0 - v) * (u + w))) +
                        1.0 / ((1.0 - w) * (u + v))) /
                       6.0;
  return f / (radial + edges);
}

}  // namespace lorentz::detail
