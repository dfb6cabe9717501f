#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "stripweave/expression.hpp"

namespace stripweave {

/// Closed parameter rectangle [u1_min, u1_max] x [u2_min, u2_max].
struct ParamRect {
  double u1_min = 0.0;
  double u1_max = 1.0;
  double u2_min = 0.0;
  double u2_max = 1.0;

  bool contains(double u1, double u2) const {
    return u1 >= u1_min && u1 <= u1_max && u2 >= u2_min && u2 <= u2_max;
  }
};

/// Value and partial derivatives (up to second order) of a surface map at one point.
struct Jet2 {
  Eigen::Vector3d p;
  Eigen::Vector3d p1;
  Eigen::Vector3d p2;
  Eigen::Vector3d p11;
  Eigen::Vector3d p12;
  Eigen::Vector3d p22;
};

/// Parametric surface (u1, u2) -> R^3 given by three expression trees.
/// Immutable; copies share the trees.
class SurfaceDefinition {
 public:
  SurfaceDefinition(std::array<Expr, 3> coords, ParamRect domain, std::string name = "custom");

  const std::array<Expr, 3>& coords() const { return coords_; }
  const ParamRect& domain() const { return domain_; }
  const std::string& name() const { return name_; }

  /// Text form accepted by parse_surface.
  std::string to_text() const;

 private:
  std::array<Expr, 3> coords_;
  ParamRect domain_;
  std::string name_;
};

/// Parses "sx ; sy ; sz ; [a,b]x[c,d]". Separators may be ';' or newlines.
/// Domain bounds are constant expressions (pi, e, arithmetic).
SurfaceDefinition parse_surface(std::string_view text);

/// Surfaces used throughout the examples: plane, paraboloid,
/// hyperbolic_paraboloid, catenoid, helicoid, sphere_patch.
/// Every builtin accepts u1_min/u1_max/u2_min/u2_max overrides; sphere_patch
/// also takes `radius`.
SurfaceDefinition builtin_surface(std::string_view name, const std::map<std::string, double>& params = {});

/// Exact value, first and second partials by forward-mode differentiation.
/// Throws DomainError outside the (closed) domain or on non-finite results.
Jet2 evaluate_jet2(const SurfaceDefinition& def, double u1, double u2);

Eigen::Vector3d evaluate_point(const SurfaceDefinition& def, double u1, double u2);

}  // namespace stripweave
