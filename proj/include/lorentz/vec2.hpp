#pragma once

#include <cmath>
#include <cstdint>

namespace lorentz {

template <class Real>
struct Vec2T {
  Real x{};
  Real y{};

  friend Vec2T operator+(const Vec2T& a, const Vec2T& b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2T operator-(const Vec2T& a, const Vec2T& b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2T operator-(const Vec2T& a) { return {-a.x, -a.y}; }
  friend Vec2T operator*(const Real& s, const Vec2T& a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2T&, const Vec2T&) = default;
};

template <class Real>
Real dot(const Vec2T<Real>& a, const Vec2T<Real>& b) {
  return a.x * b.x + a.y * b.y;
}

/// z-component of the planar cross product.
template <class Real>
Real cross(const Vec2T<Real>& a, const Vec2T<Real>& b) {
  return a.x * b.y - a.y * b.x;
}

template <class Real>
Real norm(const Vec2T<Real>& a) {
  using std::sqrt;
  return sqrt(dot(a, a));
}

template <class Real>
Vec2T<Real> normalized(const Vec2T<Real>& a) {
  const Real n = norm(a);
  return {a.x / n, a.y / n};
}

using Vec2 = Vec2T<double>;

/// Label of a unit cell of the Z^2 lattice.
struct Cell {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend Cell operator+(const Cell& a, const Cell& b) { return {a.x + b.x, a.y + b.y}; }
  friend Cell operator-(const Cell& a, const Cell& b) { return {a.x - b.x, a.y - b.y}; }
  friend bool operator==(const Cell&, const Cell&) = default;
};

}  // namespace lorentz
