#pragma once

#include <cmath>

namespace qecmag {

/// Forward-mode value with exact partial derivatives with respect to the two
/// field components (bx, bz). All Fisher-matrix derivatives are propagated
/// through this type, so the chain rule is carried out exactly instead of by
/// finite differencing.
struct Dual2 {
  double v = 0.0;
  double dx = 0.0;
  double dz = 0.0;

  static Dual2 constant(double c) { return {c, 0.0, 0.0}; }
  static Dual2 seed_bx(double bx) { return {bx, 1.0, 0.0}; }
  static Dual2 seed_bz(double bz) { return {bz, 0.0, 1.0}; }
};

inline Dual2 operator+(const Dual2& a, const Dual2& b) {
  return {a.v + b.v, a.dx + b.dx, a.dz + b.dz};
}
inline Dual2 operator-(const Dual2& a, const Dual2& b) {
  return {a.v - b.v, a.dx - b.dx, a.dz - b.dz};
}
inline Dual2 operator-(const Dual2& a) { return {-a.v, -a.dx, -a.dz}; }
inline Dual2 operator*(const Dual2& a, const Dual2& b) {
  return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dz * b.v + a.v * b.dz};
}
inline Dual2 operator*(double c, const Dual2& a) { return {c * a.v, c * a.dx, c * a.dz}; }
inline Dual2 operator*(const Dual2& a, double c) { return c * a; }
inline Dual2 operator/(const Dual2& a, const Dual2& b) {
  const double inv = 1.0 / b.v;
  const double q = a.v * inv;
  return {q, (a.dx - q * b.dx) * inv, (a.dz - q * b.dz) * inv};
}
inline Dual2 operator/(const Dual2& a, double c) { return {a.v / c, a.dx / c, a.dz / c}; }
inline Dual2 operator+(const Dual2& a, double c) { return {a.v + c, a.dx, a.dz}; }
inline Dual2 operator+(double c, const Dual2& a) { return a + c; }
inline Dual2 operator-(const Dual2& a, double c) { return {a.v - c, a.dx, a.dz}; }
inline Dual2 operator-(double c, const Dual2& a) { return {c - a.v, -a.dx, -a.dz}; }

inline Dual2 sin(const Dual2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return {s, c * a.dx, c * a.dz};
}
inline Dual2 cos(const Dual2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return {c, -s * a.dx, -s * a.dz};
}
inline Dual2 sqrt(const Dual2& a) {
  const double r = std::sqrt(a.v);
  const double g = 0.5 / r;
  return {r, g * a.dx, g * a.dz};
}
inline Dual2 log(const Dual2& a) {
  const double g = 1.0 / a.v;
  return {std::log(a.v), g * a.dx, g * a.dz};
}
inline Dual2 atan(const Dual2& a) {
  const double g = 1.0 / (1.0 + a.v * a.v);
  return {std::atan(a.v), g * a.dx, g * a.dz};
}
/// atan2 with dual arguments; derivative (y' x - y x') / (x^2 + y^2).
inline Dual2 atan2(const Dual2& y, const Dual2& x) {
  const double r2 = x.v * x.v + y.v * y.v;
  return {std::atan2(y.v, x.v), (y.dx * x.v - y.v * x.dx) / r2,
          (y.dz * x.v - y.v * x.dz) / r2};
}
inline Dual2 pow_int(Dual2 base, int k) {
  Dual2 result = Dual2::constant(1.0);
  while (k > 0) {
    if (k & 1) result = result * base;
    base = base * base;
    k >>= 1;
  }
  return result;
}

/// Complex number whose real and imaginary parts carry Dual2 derivatives.
struct CDual {
  Dual2 re, im;

  static CDual constant(double r, double i = 0.0) {
    return {Dual2::constant(r), Dual2::constant(i)};
  }
};

inline CDual operator+(const CDual& a, const CDual& b) { return {a.re + b.re, a.im + b.im}; }
inline CDual operator-(const CDual& a, const CDual& b) { return {a.re - b.re, a.im - b.im}; }
inline CDual operator*(const CDual& a, const CDual& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline CDual conj(const CDual& a) { return {a.re, -a.im}; }
inline Dual2 real(const CDual& a) { return a.re; }
inline Dual2 abs2(const CDual& a) { return a.re * a.re + a.im * a.im; }
inline CDual pow_int(CDual base, int k) {
  CDual result = CDual::constant(1.0);
  while (k > 0) {
    if (k & 1) result = result * base;
    base = base * base;
    k >>= 1;
  }
  return result;
}

}  // namespace qecmag
