#include "stripweave/bspline.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "stripweave/errors.hpp"
#include "stripweave/quadrature.hpp"

namespace stripweave {

BSplineSpace::BSplineSpace(int degree, std::vector<double> knots) : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 0) throw Error("negative B-spline degree");
  const int p = degree_;
  if (static_cast<int>(knots_.size()) < 2 * (p + 1)) throw Error("knot vector too short for degree " + std::to_string(p));
  for (double k : knots_) {
    if (!std::isfinite(k)) throw Error("non-finite knot");
  }
  if (!std::is_sorted(knots_.begin(), knots_.end())) throw Error("knot vector is not sorted");
  if (!(knots_.front() < knots_.back())) throw Error("knot vector has empty range");
  for (int i = 0; i <= p; ++i) {
    if (knots_[i] != knots_.front() || knots_[knots_.size() - 1 - i] != knots_.back())
      throw Error("knot vector is not clamped");
  }
  if (knots_[p + 1] == knots_.front() || knots_[knots_.size() - p - 2] == knots_.back())
    throw Error("end knot multiplicity exceeds degree + 1");
  for (double b : breakpoints()) {
    if (multiplicity(b) > p + 1) throw Error("knot multiplicity exceeds degree + 1");
  }
}

BSplineSpace BSplineSpace::uniform(int degree, double a, double b, int spans) {
  if (spans < 1) throw Error("need at least one span");
  std::vector<double> k(degree + 1, a);
  for (int i = 1; i < spans; ++i) k.push_back(a + (b - a) * i / spans);
  k.insert(k.end(), degree + 1, b);
  return BSplineSpace(degree, std::move(k));
}

std::vector<double> BSplineSpace::breakpoints() const {
  std::vector<double> out;
  for (double k : knots_) {
    if (out.empty() || k != out.back()) out.push_back(k);
  }
  return out;
}

int BSplineSpace::multiplicity(double u) const {
  return static_cast<int>(std::count(knots_.begin(), knots_.end(), u));
}

int BSplineSpace::find_span(double u) const {
  const double slack = 1e-12 * (upper() - lower());
  if (!(u >= lower() - slack && u <= upper() + slack))
    throw DomainError("parameter " + std::to_string(u) + " outside knot range");
  u = std::clamp(u, lower(), upper());
  int s = static_cast<int>(std::upper_bound(knots_.begin(), knots_.end(), u) - knots_.begin()) - 1;
  return std::clamp(s, degree_, dim() - 1);
}

Eigen::MatrixXd BSplineSpace::basis_derivatives(int span, double u, int order) const {
  const int p = degree_;
  const std::vector<double>& U = knots_;
  u = std::clamp(u, lower(), upper());
  Eigen::MatrixXd ders = Eigen::MatrixXd::Zero(order + 1, p + 1);
  const int n = std::min(order, p);

  Eigen::MatrixXd ndu(p + 1, p + 1);
  std::vector<double> left(p + 1), right(p + 1);
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = u - U[span + 1 - j];
    right[j] = U[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu(j, j) = saved;
  }
  for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);

  Eigen::MatrixXd a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a.setZero();
    a(0, 0) = 1.0;
    for (int k = 1; k <= n; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      ders(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double f = p;
  for (int k = 1; k <= n; ++k) {
    ders.row(k) *= f;
    f *= (p - k);
  }
  return ders;
}

BSplineSpace BSplineSpace::elevated(int r) const {
  if (r < 0) throw Error("negative degree elevation");
  std::vector<double> k;
  for (double b : breakpoints()) k.insert(k.end(), multiplicity(b) + r, b);
  return BSplineSpace(degree_ + r, std::move(k));
}

double basis(const BSplineSpace& space, int i, double u, int order) {
  if (i < 0 || i >= space.dim()) throw DomainError("basis index out of range");
  if (order < 0) throw DomainError("negative derivative order");
  const int s = space.find_span(u);
  const int first = s - space.degree();
  if (i < first || i > s) return 0.0;
  return space.basis_derivatives(s, u, order)(order, i - first);
}

SpanQuadrature span_quadrature(const BSplineSpace& space, int points_per_span) {
  const GaussRule g = gauss_legendre(points_per_span);
  const std::vector<double> bp = space.breakpoints();
  SpanQuadrature q;
  for (std::size_t e = 0; e + 1 < bp.size(); ++e) {
    const double a = bp[e], b = bp[e + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const int s = space.find_span(mid);
    for (int k = 0; k < points_per_span; ++k) {
      q.u.push_back(mid + half * g.nodes[k]);
      q.w.push_back(half * g.weights[k]);
      q.span.push_back(s);
    }
  }
  return q;
}

void insert_knots(BSplineSpace& space, Eigen::MatrixXd& control, std::vector<double> new_knots) {
  if (control.rows() != space.dim()) throw Error("control rows do not match space dimension");
  std::sort(new_knots.begin(), new_knots.end());
  for (double u : new_knots) {
    if (!(u >= space.lower() && u <= space.upper())) throw DomainError("inserted knot outside knot range");
    const int p = space.degree();
    if (space.multiplicity(u) + 1 > p + 1) throw DomainError("knot multiplicity would exceed degree + 1");
    const std::vector<double>& U = space.knots();
    const int k = static_cast<int>(std::upper_bound(U.begin(), U.end(), u) - U.begin()) - 1;
    const int n = space.dim();
    Eigen::MatrixXd Q(n + 1, control.cols());
    for (int i = 0; i <= k - p; ++i) Q.row(i) = control.row(i);
    for (int i = std::max(k - p + 1, 0); i <= k; ++i) {
      const double alpha = (u - U[i]) / (U[i + p] - U[i]);
      Q.row(i) = alpha * control.row(i) + (1.0 - alpha) * control.row(i - 1);
    }
    for (int i = k + 1; i <= n; ++i) Q.row(i) = control.row(i - 1);
    std::vector<double> knots = U;
    knots.insert(knots.begin() + k + 1, u);
    space = BSplineSpace(p, std::move(knots));
    control = std::move(Q);
  }
}

namespace {

// Dense collocation matrix of a space at quadrature points.
Eigen::MatrixXd basis_matrix(const BSplineSpace& space, const SpanQuadrature& q) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(q.u.size()), space.dim());
  const int p = space.degree();
  for (std::size_t k = 0; k < q.u.size(); ++k) {
    const int s = space.find_span(q.u[k]);
    const Eigen::MatrixXd d = space.basis_derivatives(s, q.u[k], 0);
    for (int j = 0; j <= p; ++j) B(static_cast<Eigen::Index>(k), s - p + j) = d(0, j);
  }
  return B;
}

Eigen::LLT<Eigen::MatrixXd> gram_factor(const Eigen::MatrixXd& B, const Eigen::VectorXd& w) {
  const Eigen::MatrixXd G = B.transpose() * w.asDiagonal() * B;
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw Error("singular Gram matrix");
  return llt;
}

Eigen::VectorXd weights_of(const SpanQuadrature& q) {
  return Eigen::Map<const Eigen::VectorXd>(q.w.data(), static_cast<Eigen::Index>(q.w.size()));
}

}  // namespace

void elevate_degree(BSplineSpace& space, Eigen::MatrixXd& control, int r) {
  if (control.rows() != space.dim()) throw Error("control rows do not match space dimension");
  if (r == 0) return;
  BSplineSpace target = space.elevated(r);
  const SpanQuadrature q = span_quadrature(target, target.degree() + 1);
  const Eigen::MatrixXd Bn = basis_matrix(target, q);
  const Eigen::MatrixXd Bo = basis_matrix(space, q);
  const Eigen::VectorXd w = weights_of(q);
  const Eigen::MatrixXd rhs = Bn.transpose() * w.asDiagonal() * (Bo * control);
  control = gram_factor(Bn, w).solve(rhs);
  space = std::move(target);
}

BSplineManifold2D::BSplineManifold2D(BSplineSpace space1, BSplineSpace space2, ControlNet control)
    : space1_(std::move(space1)), space2_(std::move(space2)) {
  set_control(std::move(control));
}

void BSplineManifold2D::set_control(ControlNet control) {
  if (control.rows() != static_cast<Eigen::Index>(n1()) * n2())
    throw Error("control net has " + std::to_string(control.rows()) + " points, expected " +
                std::to_string(n1() * n2()));
  if (!control.allFinite()) throw Error("non-finite control point");
  control_ = std::move(control);
}

Eigen::Vector2d evaluate(const BSplineManifold2D& m, double u1, double u2) { return evaluate_jet(m, u1, u2).p; }

ManifoldJet evaluate_jet(const BSplineManifold2D& m, double u1, double u2) {
  const BSplineSpace& s1 = m.space1();
  const BSplineSpace& s2 = m.space2();
  const int k1 = s1.find_span(u1);
  const int k2 = s2.find_span(u2);
  const Eigen::MatrixXd d1 = s1.basis_derivatives(k1, u1, 1);
  const Eigen::MatrixXd d2 = s2.basis_derivatives(k2, u2, 1);
  const int p1 = s1.degree(), p2 = s2.degree();
  ManifoldJet jet{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
  for (int a = 0; a <= p1; ++a) {
    for (int b = 0; b <= p2; ++b) {
      const Eigen::Vector2d c = m.point(k1 - p1 + a, k2 - p2 + b);
      jet.p += d1(0, a) * d2(0, b) * c;
      jet.p1 += d1(1, a) * d2(0, b) * c;
      jet.p2 += d1(0, a) * d2(1, b) * c;
    }
  }
  return jet;
}

namespace {

// Control net viewed as rows along direction 1: row i1, columns (i2, coord).
Eigen::MatrixXd rows_dir1(const BSplineManifold2D& m) {
  Eigen::MatrixXd R(m.n1(), 2 * m.n2());
  for (int i1 = 0; i1 < m.n1(); ++i1)
    for (int i2 = 0; i2 < m.n2(); ++i2) R.block<1, 2>(i1, 2 * i2) = m.point(i1, i2).transpose();
  return R;
}

Eigen::MatrixXd rows_dir2(const BSplineManifold2D& m) {
  Eigen::MatrixXd R(m.n2(), 2 * m.n1());
  for (int i1 = 0; i1 < m.n1(); ++i1)
    for (int i2 = 0; i2 < m.n2(); ++i2) R.block<1, 2>(i2, 2 * i1) = m.point(i1, i2).transpose();
  return R;
}

ControlNet net_from_dir1(const Eigen::MatrixXd& R) {
  const int n1 = static_cast<int>(R.rows()), n2 = static_cast<int>(R.cols() / 2);
  ControlNet c(n1 * n2, 2);
  for (int i1 = 0; i1 < n1; ++i1)
    for (int i2 = 0; i2 < n2; ++i2) c.row(i1 * n2 + i2) = R.block<1, 2>(i1, 2 * i2);
  return c;
}

ControlNet net_from_dir2(const Eigen::MatrixXd& R) {
  const int n2 = static_cast<int>(R.rows()), n1 = static_cast<int>(R.cols() / 2);
  ControlNet c(n1 * n2, 2);
  for (int i1 = 0; i1 < n1; ++i1)
    for (int i2 = 0; i2 < n2; ++i2) c.row(i1 * n2 + i2) = R.block<1, 2>(i2, 2 * i1);
  return c;
}

}  // namespace

BSplineManifold2D h_refine(const BSplineManifold2D& m, const std::vector<double>& new_knots1,
                           const std::vector<double>& new_knots2) {
  BSplineSpace s1 = m.space1();
  Eigen::MatrixXd r1 = rows_dir1(m);
  insert_knots(s1, r1, new_knots1);
  BSplineManifold2D mid(s1, m.space2(), net_from_dir1(r1));
  BSplineSpace s2 = m.space2();
  Eigen::MatrixXd r2 = rows_dir2(mid);
  insert_knots(s2, r2, new_knots2);
  return BSplineManifold2D(std::move(s1), std::move(s2), net_from_dir2(r2));
}

BSplineManifold2D p_refine(const BSplineManifold2D& m, int raise1, int raise2) {
  if (raise1 < 0 || raise2 < 0) throw Error("negative degree elevation");
  BSplineSpace s1 = m.space1();
  Eigen::MatrixXd r1 = rows_dir1(m);
  elevate_degree(s1, r1, raise1);
  BSplineManifold2D mid(s1, m.space2(), net_from_dir1(r1));
  BSplineSpace s2 = m.space2();
  Eigen::MatrixXd r2 = rows_dir2(mid);
  elevate_degree(s2, r2, raise2);
  return BSplineManifold2D(std::move(s1), std::move(s2), net_from_dir2(r2));
}

std::vector<double> span_midpoints(const BSplineSpace& space) {
  const std::vector<double> bp = space.breakpoints();
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) out.push_back(0.5 * (bp[i] + bp[i + 1]));
  return out;
}

BSplineManifold2D fit_least_squares(const BSplineSpace& space1, const BSplineSpace& space2,
                                    const std::function<Eigen::Vector2d(double, double)>& target,
                                    int quad_density) {
  const int q1n = quad_density > 0 ? quad_density : space1.degree() + 3;
  const int q2n = quad_density > 0 ? quad_density : space2.degree() + 3;
  const SpanQuadrature q1 = span_quadrature(space1, q1n);
  const SpanQuadrature q2 = span_quadrature(space2, q2n);
  const Eigen::MatrixXd B1 = basis_matrix(space1, q1);
  const Eigen::MatrixXd B2 = basis_matrix(space2, q2);
  const Eigen::VectorXd w1 = weights_of(q1);
  const Eigen::VectorXd w2 = weights_of(q2);
  const auto L1 = gram_factor(B1, w1);
  const auto L2 = gram_factor(B2, w2);

  const Eigen::Index m1 = B1.rows(), m2 = B2.rows();
  Eigen::MatrixXd fx(m1, m2), fy(m1, m2);
  for (Eigen::Index a = 0; a < m1; ++a) {
    for (Eigen::Index b = 0; b < m2; ++b) {
      const Eigen::Vector2d v = target(q1.u[a], q2.u[b]);
      fx(a, b) = v.x();
      fy(a, b) = v.y();
    }
  }
  const Eigen::MatrixXd W1B1 = w1.asDiagonal() * B1;
  const Eigen::MatrixXd W2B2 = w2.asDiagonal() * B2;
  auto solve = [&](const Eigen::MatrixXd& f) -> Eigen::MatrixXd {
    const Eigen::MatrixXd R = W1B1.transpose() * f * W2B2;  // n1 x n2
    const Eigen::MatrixXd X = L1.solve(R);
    return L2.solve(X.transpose()).transpose();
  };
  const Eigen::MatrixXd cx = solve(fx);
  const Eigen::MatrixXd cy = solve(fy);
  const int n1 = space1.dim(), n2 = space2.dim();
  ControlNet net(n1 * n2, 2);
  for (int i1 = 0; i1 < n1; ++i1) {
    for (int i2 = 0; i2 < n2; ++i2) {
      net(i1 * n2 + i2, 0) = cx(i1, i2);
      net(i1 * n2 + i2, 1) = cy(i1, i2);
    }
  }
  return BSplineManifold2D(space1, space2, std::move(net));
}

nlohmann::json to_json(const BSplineManifold2D& m) {
  nlohmann::json j;
  j["degrees"] = {m.space1().degree(), m.space2().degree()};
  j["knots"] = {m.space1().knots(), m.space2().knots()};
  j["shape"] = {m.n1(), m.n2()};
  nlohmann::json pts = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.control().rows(); ++i) pts.push_back({m.control()(i, 0), m.control()(i, 1)});
  j["control"] = std::move(pts);
  return j;
}

BSplineManifold2D manifold_from_json(const nlohmann::json& j) {
  try {
    const auto deg = j.at("degrees").get<std::vector<int>>();
    const auto knots = j.at("knots").get<std::vector<std::vector<double>>>();
    if (deg.size() != 2 || knots.size() != 2) throw Error("manifold JSON needs two degrees and two knot vectors");
    BSplineSpace s1(deg[0], knots[0]);
    BSplineSpace s2(deg[1], knots[1]);
    if (j.contains("shape")) {
      const auto shape = j.at("shape").get<std::vector<int>>();
      if (shape.size() != 2 || shape[0] != s1.dim() || shape[1] != s2.dim())
        throw Error("manifold JSON shape does not match its knot vectors");
    }
    const auto& pts = j.at("control");
    ControlNet net(static_cast<Eigen::Index>(pts.size()), 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto xy = pts[i].get<std::vector<double>>();
      if (xy.size() != 2) throw Error("control point must have two coordinates");
      net(static_cast<Eigen::Index>(i), 0) = xy[0];
      net(static_cast<Eigen::Index>(i), 1) = xy[1];
    }
    return BSplineManifold2D(std::move(s1), std::move(s2), std::move(net));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed manifold JSON: ") + e.what());
  }
}

}  // namespace stripweave
