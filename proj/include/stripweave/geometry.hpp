#pragma once

#include <Eigen/Core>

#include "stripweave/surface.hpp"

namespace stripweave {

/// First fundamental form at a point, with its first partials.
/// `d1` / `d2` hold (g11, g12, g22) differentiated by u1 / u2.
struct Metric2 {
  double g11 = 1.0;
  double g12 = 0.0;
  double g22 = 1.0;
  Eigen::Vector3d d1 = Eigen::Vector3d::Zero();
  Eigen::Vector3d d2 = Eigen::Vector3d::Zero();

  double det() const { return g11 * g22 - g12 * g12; }
  Eigen::Matrix2d matrix() const { return (Eigen::Matrix2d() << g11, g12, g12, g22).finished(); }
  Eigen::Matrix2d inverse() const {
    const double d = det();
    return (Eigen::Matrix2d() << g22 / d, -g12 / d, -g12 / d, g11 / d).finished();
  }
};

/// Throws GeometryError unless g11 > 0 and det > 0 (relative to g11*g22).
void require_positive_definite(const Metric2& g);

Metric2 metric_from_jet(const Jet2& jet);
Metric2 metric(const SurfaceDefinition& def, double u1, double u2);

/// K = (LN - M^2) / (EG - F^2) from the second fundamental form.
double gaussian_curvature(const SurfaceDefinition& def, double u1, double u2);

/// Rectangular strip I x [c - b, c + b] in the parameter domain of a surface.
class StripDomain {
 public:
  StripDomain(SurfaceDefinition surface, double u1a, double u1b, double center, double half_breadth, int index = 0);

  const SurfaceDefinition& surface() const { return surface_; }
  double u1a() const { return u1a_; }
  double u1b() const { return u1b_; }
  double center() const { return center_; }
  double half_breadth() const { return half_breadth_; }
  double u2_min() const { return center_ - half_breadth_; }
  double u2_max() const { return center_ + half_breadth_; }
  int index() const { return index_; }

  /// Same strip with the half-breadth multiplied by `beta`.
  StripDomain narrowed(double beta) const;

 private:
  SurfaceDefinition surface_;
  double u1a_;
  double u1b_;
  double center_;
  double half_breadth_;
  int index_;
};

/// s0(u1) = sqrt(g11(u1, c)).
double center_speed(const StripDomain& strip, double u1);

/// Geodesic curvature of the center curve u2 = c; positive when the curve
/// turns towards +u2 (e2 is e1 rotated by +90 degrees).
double geodesic_curvature(const StripDomain& strip, double u1);
double geodesic_curvature(const Metric2& g);

/// Orthonormal frame coefficients: e(k, i) = e_k^i, so e_k = e(k, i) d/du^i.
/// Lower-triangular; e * g * e^T = I.
struct FrameCoeffs {
  Eigen::Matrix2d e = Eigen::Matrix2d::Identity();
};

FrameCoeffs orthonormal_frame(const Metric2& g);

/// Components of a covariant (0,2) tensor in the orthonormal frame:
/// T<0>_kl = e_k^i e_l^j T_ij.
Eigen::Matrix2d tensor_to_orthonormal(const Eigen::Matrix2d& T, const Metric2& g);

/// Same for a contravariant (2,0) tensor such as the 2nd Piola-Kirchhoff stress.
Eigen::Matrix2d contravariant_to_orthonormal(const Eigen::Matrix2d& T, const Metric2& g);

}  // namespace stripweave
