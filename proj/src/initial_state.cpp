#include "stripweave/initial_state.hpp"

#include <algorithm>
#include <cmath>

#include "stripweave/errors.hpp"

namespace stripweave {

namespace {

struct CurveCoeffs {
  double s;
  double sdot;
  double kappa;
};

CurveCoeffs curve_coeffs(const StripDomain& strip, double u1) {
  const Metric2 g = metric(strip.surface(), u1, strip.center());
  const double s = std::sqrt(g.g11);
  return {s, g.d1[0] / (2.0 * s), geodesic_curvature(g)};
}

Eigen::Vector2d accel(const CurveCoeffs& k, const Eigen::Vector2d& v) {
  const double a = k.sdot / k.s;
  const double b = k.kappa * k.s;
  return {a * v.x() - b * v.y(), b * v.x() + a * v.y()};
}

}  // namespace

double CenterCurveSample::speed_drift() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) worst = std::max(worst, std::abs(cdot[i].norm() - s0[i]) / s0[i]);
  return worst;
}

CenterCurveSample solve_center_ode(const StripDomain& strip, int steps) {
  if (steps < 16) throw SolverError("center-curve ODE needs at least 16 steps");
  const double a = strip.u1a();
  const double h = (strip.u1b() - a) / steps;

  CenterCurveSample out;
  auto record = [&](double u, const Eigen::Vector2d& c, const Eigen::Vector2d& v, const CurveCoeffs& k) {
    out.u.push_back(u);
    out.c.push_back(c);
    out.cdot.push_back(v);
    out.cddot.push_back(accel(k, v));
    out.s0.push_back(k.s);
    out.kappa0.push_back(k.kappa);
  };

  CurveCoeffs k0 = curve_coeffs(strip, a);
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  Eigen::Vector2d v(k0.s, 0.0);
  record(a, c, v, k0);
  for (int n = 0; n < steps; ++n) {
    const double u = a + n * h;
    const double u_next = n + 1 == steps ? strip.u1b() : a + (n + 1) * h;
    const CurveCoeffs km = curve_coeffs(strip, u + 0.5 * h);
    const CurveCoeffs k1 = curve_coeffs(strip, u_next);

    const Eigen::Vector2d dc1 = v;
    const Eigen::Vector2d dv1 = accel(k0, v);
    const Eigen::Vector2d dc2 = v + 0.5 * h * dv1;
    const Eigen::Vector2d dv2 = accel(km, dc2);
    const Eigen::Vector2d dc3 = v + 0.5 * h * dv2;
    const Eigen::Vector2d dv3 = accel(km, dc3);
    const Eigen::Vector2d dc4 = v + h * dv3;
    const Eigen::Vector2d dv4 = accel(k1, dc4);
    c += h / 6.0 * (dc1 + 2.0 * dc2 + 2.0 * dc3 + dc4);
    v += h / 6.0 * (dv1 + 2.0 * dv2 + 2.0 * dv3 + dv4);
    if (!c.allFinite() || !v.allFinite()) throw SolverError("center-curve ODE produced non-finite values");
    record(u_next, c, v, k1);
    k0 = k1;
    const double drift = std::abs(v.norm() - k1.s) / k1.s;
    if (drift > 1e-6) {
      throw SolverError("center-curve speed drift " + std::to_string(drift) + " exceeds 1e-6; increase ode_steps");
    }
  }
  return out;
}

InitialSurface::InitialSurface(StripDomain strip, CenterCurveSample center)
    : strip_(std::move(strip)), center_(std::move(center)) {
  if (center_.u.size() < 2) throw Error("center curve needs at least two samples");
}

void InitialSurface::center_at(double u1, Eigen::Vector2d& c, Eigen::Vector2d& cdot) const {
  const std::vector<double>& U = center_.u;
  const double lo = U.front(), hi = U.back();
  const double slack = 1e-12 * (hi - lo);
  if (u1 < lo - slack || u1 > hi + slack) throw DomainError("u1 outside the center-curve grid");
  u1 = std::clamp(u1, lo, hi);
  std::size_t k = static_cast<std::size_t>(std::upper_bound(U.begin(), U.end(), u1) - U.begin());
  k = std::clamp<std::size_t>(k, 1, U.size() - 1) - 1;
  const double h = U[k + 1] - U[k];
  const double t = (u1 - U[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  c = h00 * center_.c[k] + h10 * h * center_.cdot[k] + h01 * center_.c[k + 1] + h11 * h * center_.cdot[k + 1];
  cdot = h00 * center_.cdot[k] + h10 * h * center_.cddot[k] + h01 * center_.cdot[k + 1] +
         h11 * h * center_.cddot[k + 1];
}

Eigen::Vector2d InitialSurface::operator()(double u1, double u2) const {
  Eigen::Vector2d c, v;
  center_at(u1, c, v);
  const Metric2 g = metric(strip_.surface(), std::clamp(u1, strip_.u1a(), strip_.u1b()), strip_.center());
  if (g.g11 < 1e-8) throw GeometryError("g11 on the center line is below 1e-8");
  const double sd = std::sqrt(g.det());
  Eigen::Matrix2d R;
  R << g.g12, -sd, sd, g.g12;
  return c + R * v * ((u2 - strip_.center()) / g.g11);
}

InitialSurface build_initial_surface(const StripDomain& strip, const CenterCurveSample& center) {
  return InitialSurface(strip, center);
}

BSplineManifold2D fit_initial_manifold(const StripDomain& strip, const InitialSurface& surface, int spans1) {
  if (spans1 < 2) throw Error("initial fit needs at least two spans");
  const BSplineSpace s1 = BSplineSpace::uniform(3, strip.u1a(), strip.u1b(), spans1);
  const BSplineSpace s2 = BSplineSpace::uniform(1, strip.u2_min(), strip.u2_max(), 1);
  return fit_least_squares(s1, s2, [&](double u1, double u2) { return surface(u1, u2); });
}

}  // namespace stripweave
