#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library code it is checking, apart from the inputs.

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Core>
#include <Eigen/LU>

#include "stripweave/geometry.hpp"
#include "stripweave/surface.hpp"

namespace oracle {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline double bernstein(int n, int k, double u) { return binomial(n, k) * std::pow(u, k) * std::pow(1.0 - u, n - k); }

template <typename F>
auto central(F f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Metric straight from finite differences of the point map.
inline Eigen::Matrix2d fd_metric(const stripweave::SurfaceDefinition& s, double u1, double u2, double h = 1e-6) {
  using stripweave::evaluate_point;
  const Eigen::Vector3d p1 = (evaluate_point(s, u1 + h, u2) - evaluate_point(s, u1 - h, u2)) / (2 * h);
  const Eigen::Vector3d p2 = (evaluate_point(s, u1, u2 + h) - evaluate_point(s, u1, u2 - h)) / (2 * h);
  Eigen::Matrix2d g;
  g << p1.dot(p1), p1.dot(p2), p1.dot(p2), p2.dot(p2);
  return g;
}

// Brioschi formula: K from E, F, G and their partials up to second order.
// Second partials come from central differences of the exact first partials.
inline double brioschi(const stripweave::SurfaceDefinition& s, double u, double v, double h = 1e-5) {
  using stripweave::metric;
  const stripweave::Metric2 g = metric(s, u, v);
  const double E = g.g11, F = g.g12, G = g.g22;
  const double Eu = g.d1[0], Ev = g.d2[0], Fu = g.d1[1], Fv = g.d2[1], Gu = g.d1[2], Gv = g.d2[2];
  const double Evv = (metric(s, u, v + h).d2[0] - metric(s, u, v - h).d2[0]) / (2 * h);
  const double Fuv = (metric(s, u, v + h).d1[1] - metric(s, u, v - h).d1[1]) / (2 * h);
  const double Guu = (metric(s, u + h, v).d1[2] - metric(s, u - h, v).d1[2]) / (2 * h);
  Eigen::Matrix3d A, B;
  A << -Evv / 2 + Fuv - Guu / 2, Eu / 2, Fu - Ev / 2, Fv - Gu / 2, E, F, Gv / 2, F, G;
  B << 0, Ev / 2, Gu / 2, Ev / 2, E, F, Gu / 2, F, G;
  const double d = E * G - F * F;
  return (A.determinant() - B.determinant()) / (d * d);
}

// Gram-Schmidt on the coordinate basis: rows are e_k in coordinate components.
inline Eigen::Matrix2d gram_schmidt(double g11, double g12, double g22) {
  const double a = std::sqrt(g11);
  const double b = std::sqrt((g11 * g22 - g12 * g12) / g11);
  Eigen::Matrix2d e;
  e << 1.0 / a, 0.0, -g12 / g11 / b, 1.0 / b;
  return e;
}

inline Eigen::Matrix2d random_spd(std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::Matrix2d A;
  A << U(rng), U(rng), U(rng), U(rng);
  return A * A.transpose() + 0.1 * Eigen::Matrix2d::Identity();
}

// Planar annulus: the line u2 = c is a circle of radius 1 - c, so the flat
// strip is exactly isometric to a ring sector.
inline stripweave::SurfaceDefinition circle_fixture() {
  return stripweave::parse_surface("(1-u2)*cos(u1) ; (1-u2)*sin(u1) ; 0 ; [0,pi]x[-0.5,0.5]");
}

}  // namespace oracle
