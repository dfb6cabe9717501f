#pragma once

#include <vector>

#include <Eigen/Core>

#include "stripweave/bspline.hpp"
#include "stripweave/geometry.hpp"

namespace stripweave {

/// Flat center curve sampled on a uniform u1 grid.
struct CenterCurveSample {
  std::vector<double> u;
  std::vector<Eigen::Vector2d> c;
  std::vector<Eigen::Vector2d> cdot;
  std::vector<Eigen::Vector2d> cddot;
  std::vector<double> s0;
  std::vector<double> kappa0;

  /// max |‖cdot‖ - s0| / s0 over the grid.
  double speed_drift() const;
};

/// RK4 on c'' = [[s'/s, -k s], [k s, s'/s]] c' with c(u1a) = 0, c'(u1a) = (s0, 0).
/// Throws SolverError if the speed drifts more than 1e-6 (relative).
CenterCurveSample solve_center_ode(const StripDomain& strip, int steps = 256);

/// p_s(u1, u2) = c(u1) + R(u1) (u2 - c) c'(u1) / g11, rulings straight in u2.
class InitialSurface {
 public:
  InitialSurface(StripDomain strip, CenterCurveSample center);

  Eigen::Vector2d operator()(double u1, double u2) const;

  /// Hermite-interpolated center point and tangent.
  void center_at(double u1, Eigen::Vector2d& c, Eigen::Vector2d& cdot) const;

  const CenterCurveSample& center() const { return center_; }

 private:
  StripDomain strip_;
  CenterCurveSample center_;
};

InitialSurface build_initial_surface(const StripDomain& strip, const CenterCurveSample& center);

/// Degree (3, 1) least-squares fit of the initial surface: `spans1` uniform
/// cubic spans along u1 and one linear span across the strip.
BSplineManifold2D fit_initial_manifold(const StripDomain& strip, const InitialSurface& surface, int spans1);

}  // namespace stripweave
