#pragma once

#include <cmath>

#include <Eigen/Core>

namespace stripweave {

/// Second-order forward-mode dual number in two variables: carries a value,
/// its gradient and its Hessian through arithmetic.
struct Dual2 {
  double v = 0.0;
  Eigen::Vector2d d = Eigen::Vector2d::Zero();
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();

  Dual2() = default;
  Dual2(double value) : v(value) {}  // NOLINT: implicit constants are intended
  Dual2(double value, const Eigen::Vector2d& grad, const Eigen::Matrix2d& hess)
      : v(value), d(grad), h(hess) {}

  static Dual2 variable(int index, double value) {
    Dual2 x(value);
    x.d[index] = 1.0;
    return x;
  }
};

// Chain rule for a scalar function f applied to x, given f(x), f'(x), f''(x).
inline Dual2 chain(const Dual2& x, double f, double df, double ddf) {
  return {f, df * x.d, df * x.h + ddf * x.d * x.d.transpose()};
}

inline double value_of(double x) { return x; }
inline double value_of(const Dual2& x) { return x.v; }

inline Dual2 operator-(const Dual2& a) { return {-a.v, -a.d, -a.h}; }
inline Dual2 operator+(const Dual2& a, const Dual2& b) { return {a.v + b.v, a.d + b.d, a.h + b.h}; }
inline Dual2 operator-(const Dual2& a, const Dual2& b) { return {a.v - b.v, a.d - b.d, a.h - b.h}; }
inline Dual2 operator*(const Dual2& a, const Dual2& b) {
  Eigen::Matrix2d cross = a.d * b.d.transpose();
  return {a.v * b.v, a.v * b.d + b.v * a.d, a.v * b.h + b.v * a.h + cross + cross.transpose()};
}
inline Dual2 operator/(const Dual2& a, const Dual2& b) {
  const double inv = 1.0 / b.v;
  return a * chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Dual2 sin(const Dual2& x) { return chain(x, std::sin(x.v), std::cos(x.v), -std::sin(x.v)); }
inline Dual2 cos(const Dual2& x) { return chain(x, std::cos(x.v), -std::sin(x.v), -std::cos(x.v)); }
inline Dual2 tan(const Dual2& x) {
  const double t = std::tan(x.v);
  const double sec2 = 1.0 + t * t;
  return chain(x, t, sec2, 2.0 * t * sec2);
}
inline Dual2 sinh(const Dual2& x) { return chain(x, std::sinh(x.v), std::cosh(x.v), std::sinh(x.v)); }
inline Dual2 cosh(const Dual2& x) { return chain(x, std::cosh(x.v), std::sinh(x.v), std::cosh(x.v)); }
inline Dual2 tanh(const Dual2& x) {
  const double t = std::tanh(x.v);
  const double sech2 = 1.0 - t * t;
  return chain(x, t, sech2, -2.0 * t * sech2);
}
inline Dual2 exp(const Dual2& x) {
  const double e = std::exp(x.v);
  return chain(x, e, e, e);
}
inline Dual2 log(const Dual2& x) { return chain(x, std::log(x.v), 1.0 / x.v, -1.0 / (x.v * x.v)); }
inline Dual2 sqrt(const Dual2& x) {
  const double s = std::sqrt(x.v);
  return chain(x, s, 0.5 / s, -0.25 / (s * x.v));
}
inline Dual2 abs(const Dual2& x) {
  const double sign = x.v > 0.0 ? 1.0 : (x.v < 0.0 ? -1.0 : 0.0);
  return chain(x, std::abs(x.v), sign, 0.0);
}
/// x^n for a constant exponent.
inline Dual2 pow(const Dual2& x, double n) {
  const double f = std::pow(x.v, n);
  const double df = n == 0.0 ? 0.0 : n * std::pow(x.v, n - 1.0);
  const double ddf = (n == 0.0 || n == 1.0) ? 0.0 : n * (n - 1.0) * std::pow(x.v, n - 2.0);
  return chain(x, f, df, ddf);
}

}  // namespace stripweave
