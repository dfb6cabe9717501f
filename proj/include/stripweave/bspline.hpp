#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace stripweave {

/// Clamped B-spline space: degree p and a nondecreasing knot vector whose end
/// knots have multiplicity p + 1.
class BSplineSpace {
 public:
  BSplineSpace(int degree, std::vector<double> knots);

  /// `spans` equal spans on [a, b].
  static BSplineSpace uniform(int degree, double a, double b, int spans);

  int degree() const { return degree_; }
  const std::vector<double>& knots() const { return knots_; }
  int dim() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  double lower() const { return knots_.front(); }
  double upper() const { return knots_.back(); }

  /// Distinct knot values, first to last.
  std::vector<double> breakpoints() const;
  int num_spans() const { return static_cast<int>(breakpoints().size()) - 1; }
  int multiplicity(double u) const;

  /// Index s with knots[s] <= u < knots[s+1]; u == upper() maps to the last
  /// non-empty span. Throws DomainError outside [lower, upper].
  int find_span(double u) const;

  /// Row k holds the k-th derivatives of the p + 1 functions that are nonzero
  /// on `span`, i.e. N_{span-p} ... N_{span}.
  Eigen::MatrixXd basis_derivatives(int span, double u, int order) const;

  /// Same space with `r` added to the degree and every distinct knot.
  BSplineSpace elevated(int r) const;

  bool operator==(const BSplineSpace& o) const { return degree_ == o.degree_ && knots_ == o.knots_; }

 private:
  int degree_;
  std::vector<double> knots_;
};

/// Value (order 0) or first derivative (order 1) of basis function i at u.
double basis(const BSplineSpace& space, int i, double u, int order = 0);

/// Gauss-Legendre points on every non-empty knot span.
struct SpanQuadrature {
  std::vector<double> u;
  std::vector<double> w;
  std::vector<int> span;
};

SpanQuadrature span_quadrature(const BSplineSpace& space, int points_per_span);

/// Boehm insertion of the knots `new_knots` (any order). Rows of `control` are
/// control points of arbitrary width.
void insert_knots(BSplineSpace& space, Eigen::MatrixXd& control, std::vector<double> new_knots);

/// Degree elevation by `r`, computed as the L2 projection onto the elevated
/// space (exact, since the elevated space contains the original one).
void elevate_degree(BSplineSpace& space, Eigen::MatrixXd& control, int r);

using ControlNet = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

/// Tensor-product map (u1, u2) -> R^2. Control point (i1, i2) is row
/// i1 * n2 + i2 of the control net.
class BSplineManifold2D {
 public:
  BSplineManifold2D(BSplineSpace space1, BSplineSpace space2, ControlNet control);

  const BSplineSpace& space1() const { return space1_; }
  const BSplineSpace& space2() const { return space2_; }
  const ControlNet& control() const { return control_; }
  void set_control(ControlNet control);

  int n1() const { return space1_.dim(); }
  int n2() const { return space2_.dim(); }
  int index(int i1, int i2) const { return i1 * n2() + i2; }
  Eigen::Vector2d point(int i1, int i2) const { return control_.row(index(i1, i2)).transpose(); }

 private:
  BSplineSpace space1_;
  BSplineSpace space2_;
  ControlNet control_;
};

struct ManifoldJet {
  Eigen::Vector2d p;
  Eigen::Vector2d p1;
  Eigen::Vector2d p2;
};

Eigen::Vector2d evaluate(const BSplineManifold2D& m, double u1, double u2);
ManifoldJet evaluate_jet(const BSplineManifold2D& m, double u1, double u2);

BSplineManifold2D h_refine(const BSplineManifold2D& m, const std::vector<double>& new_knots1,
                           const std::vector<double>& new_knots2);
BSplineManifold2D p_refine(const BSplineManifold2D& m, int raise1, int raise2);

/// Interior knots that bisect every non-empty span.
std::vector<double> span_midpoints(const BSplineSpace& space);

/// Continuous least-squares fit of `target` discretized with Gauss-Legendre
/// quadrature; quad_density <= 0 selects p + 3 points per span.
BSplineManifold2D fit_least_squares(const BSplineSpace& space1, const BSplineSpace& space2,
                                    const std::function<Eigen::Vector2d(double, double)>& target,
                                    int quad_density = 0);

nlohmann::json to_json(const BSplineManifold2D& m);
BSplineManifold2D manifold_from_json(const nlohmann::json& j);

}  // namespace stripweave
