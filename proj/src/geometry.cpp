#include "stripweave/geometry.hpp"

#include <cmath>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/LU>

namespace stripweave {

void require_positive_definite(const Metric2& g) {
  const double d = g.det();
  if (!(g.g11 > 0.0) || !(g.g22 > 0.0) || !(d > 1e-14 * g.g11 * g.g22) || !std::isfinite(d)) {
    throw GeometryError("metric is not positive definite (g11=" + std::to_string(g.g11) +
                        ", det=" + std::to_string(d) + ")");
  }
}

Metric2 metric_from_jet(const Jet2& j) {
  Metric2 g;
  g.g11 = j.p1.dot(j.p1);
  g.g12 = j.p1.dot(j.p2);
  g.g22 = j.p2.dot(j.p2);
  g.d1 = {2.0 * j.p11.dot(j.p1), j.p11.dot(j.p2) + j.p1.dot(j.p12), 2.0 * j.p12.dot(j.p2)};
  g.d2 = {2.0 * j.p12.dot(j.p1), j.p12.dot(j.p2) + j.p1.dot(j.p22), 2.0 * j.p22.dot(j.p2)};
  return g;
}

Metric2 metric(const SurfaceDefinition& def, double u1, double u2) {
  Metric2 g = metric_from_jet(evaluate_jet2(def, u1, u2));
  require_positive_definite(g);
  return g;
}

double gaussian_curvature(const SurfaceDefinition& def, double u1, double u2) {
  const Jet2 j = evaluate_jet2(def, u1, u2);
  const Metric2 g = metric_from_jet(j);
  require_positive_definite(g);
  const Eigen::Vector3d n = j.p1.cross(j.p2).normalized();
  const double L = j.p11.dot(n);
  const double M = j.p12.dot(n);
  const double N = j.p22.dot(n);
  return (L * N - M * M) / g.det();
}

StripDomain::StripDomain(SurfaceDefinition surface, double u1a, double u1b, double center, double half_breadth,
                         int index)
    : surface_(std::move(surface)), u1a_(u1a), u1b_(u1b), center_(center), half_breadth_(half_breadth), index_(index) {
  const ParamRect& d = surface_.domain();
  if (!(half_breadth_ > 0.0)) throw DomainError("strip half-breadth must be positive");
  if (!(u1a_ < u1b_)) throw DomainError("strip interval must satisfy u1a < u1b");
  constexpr double slack = 1e-12;
  if (u1a_ < d.u1_min - slack || u1b_ > d.u1_max + slack) throw DomainError("strip interval outside surface domain");
  if (u2_min() < d.u2_min - slack || u2_max() > d.u2_max + slack) {
    throw DomainError("strip breadth outside surface domain");
  }
}

StripDomain StripDomain::narrowed(double beta) const {
  return StripDomain(surface_, u1a_, u1b_, center_, half_breadth_ * beta, index_);
}

double center_speed(const StripDomain& strip, double u1) {
  return std::sqrt(metric(strip.surface(), u1, strip.center()).g11);
}

double geodesic_curvature(const Metric2& g) {
  const double num = g.g11 * (2.0 * g.d1[1] - g.d2[0]) - g.g12 * g.d1[0];
  return num / (2.0 * std::pow(g.g11, 1.5) * std::sqrt(g.det()));
}

double geodesic_curvature(const StripDomain& strip, double u1) {
  return geodesic_curvature(metric(strip.surface(), u1, strip.center()));
}

FrameCoeffs orthonormal_frame(const Metric2& g) {
  require_positive_definite(g);
  const double s11 = std::sqrt(g.g11);
  const double det = g.det();
  FrameCoeffs f;
  f.e << 1.0 / s11, 0.0,  //
      -g.g12 / std::sqrt(g.g11 * det), std::sqrt(g.g11 / det);
  return f;
}

Eigen::Matrix2d tensor_to_orthonormal(const Eigen::Matrix2d& T, const Metric2& g) {
  const Eigen::Matrix2d e = orthonormal_frame(g).e;
  return e * T * e.transpose();
}

Eigen::Matrix2d contravariant_to_orthonormal(const Eigen::Matrix2d& T, const Metric2& g) {
  // Dual coframe theta^k = (e^{-T})(k, i) du^i.
  const Eigen::Matrix2d theta = orthonormal_frame(g).e.inverse().transpose();
  return theta * T * theta.transpose();
}

}  // namespace stripweave
