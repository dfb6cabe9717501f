#include <doctest.h>

#include "oracles.hpp"
#include "stripweave/errors.hpp"
#include "stripweave/initial_state.hpp"

using namespace stripweave;

namespace {

// Signed curvature of a planar curve from its first two derivatives.
double planar_curvature(const Eigen::Vector2d& d, const Eigen::Vector2d& dd) {
  return (d.x() * dd.y() - d.y() * dd.x()) / std::pow(d.norm(), 3);
}

}  // namespace

TEST_CASE("center ODE: plane strip is a straight segment") {
  const StripDomain s(builtin_surface("plane"), -1, 1, 0.2, 0.1);
  const CenterCurveSample c = solve_center_ode(s);
  for (std::size_t k = 0; k < c.u.size(); ++k) {
    CHECK((c.c[k] - Eigen::Vector2d(c.u[k] + 1, 0)).norm() < 1e-14);
  }
  CHECK(c.speed_drift() < 1e-14);
}

TEST_CASE("center ODE: catenoid waist unrolls to a segment of length 2 pi") {
  const StripDomain s(builtin_surface("catenoid"), -M_PI, M_PI, 0.0, 0.1);
  const CenterCurveSample c = solve_center_ode(s);
  CHECK(c.c.back().x() == doctest::Approx(2 * M_PI).epsilon(1e-12));
  CHECK(std::abs(c.c.back().y()) < 1e-12);
}

TEST_CASE("center ODE: constant curvature gives a circular arc") {
  // The line u2 = 0 of the circle fixture has unit speed and curvature 1.
  const StripDomain s(oracle::circle_fixture(), 0, M_PI, 0.0, 0.1);
  const CenterCurveSample c = solve_center_ode(s, 256);
  const Eigen::Vector2d exact(std::sin(M_PI), 1 - std::cos(M_PI));
  CHECK((c.c.back() - exact).norm() < 1e-8);
  for (std::size_t k = 0; k < c.u.size(); ++k) {
    CHECK((c.c[k] - Eigen::Vector2d(std::sin(c.u[k]), 1 - std::cos(c.u[k]))).norm() < 1e-8);
    CHECK(c.kappa0[k] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("property: RK4 endpoint error drops sixteenfold per halving") {
  const StripDomain s(oracle::circle_fixture(), 0, M_PI, 0.3, 0.1);
  // Arc of radius R = 1 - c, turning one radian per unit of u1.
  const double R = 0.7;
  const Eigen::Vector2d end(R * std::sin(M_PI), R * (1 - std::cos(M_PI)));
  const double e1 = (solve_center_ode(s, 64).c.back() - end).norm();
  const double e2 = (solve_center_ode(s, 128).c.back() - end).norm();
  CHECK(e1 / e2 >= 12.0);
  CHECK(e1 / e2 <= 20.0);
}

TEST_CASE("property: speed invariant along the center") {
  for (const char* name : {"paraboloid", "hyperbolic_paraboloid", "helicoid"}) {
    const StripDomain s(builtin_surface(name), -1, 1, 0.35, 0.05);
    const CenterCurveSample c = solve_center_ode(s);
    CHECK(c.speed_drift() < 1e-6);
    for (std::size_t k = 0; k < c.u.size(); ++k)
      CHECK(std::abs(c.cdot[k].norm() - c.s0[k]) <= 1e-6 * c.s0[k]);
  }
  CHECK_THROWS_AS(solve_center_ode(StripDomain(builtin_surface("plane"), -1, 1, 0, 0.1), 4), SolverError);
}

TEST_CASE("initial surface: plane, straight rulings, orthogonal breadth") {
  const StripDomain pl(builtin_surface("plane"), -1, 1, 0.2, 0.1);
  const InitialSurface ps = build_initial_surface(pl, solve_center_ode(pl));
  CHECK((ps(0.3, 0.25) - Eigen::Vector2d(1.3, 0.05)).norm() < 1e-14);

  const StripDomain s(builtin_surface("paraboloid"), -1, 1, 0.4, 0.05);
  const InitialSurface is = build_initial_surface(s, solve_center_ode(s));
  for (double u = -1; u <= 1; u += 0.1) {
    const Eigen::Vector2d a = is(u, 0.35), b = is(u, 0.45), m = is(u, 0.4), q = is(u, 0.375);
    CHECK((m - 0.5 * (a + b)).norm() < 1e-13);
    CHECK((q - (0.75 * a + 0.25 * b)).norm() < 1e-13);
  }

  // Catenoid metric is orthogonal, so breadth is perpendicular to the center.
  const StripDomain c(builtin_surface("catenoid"), -2, 2, 0.3, 0.1);
  const InitialSurface cs = build_initial_surface(c, solve_center_ode(c));
  for (double u = -2; u <= 2; u += 0.25) {
    Eigen::Vector2d p, t;
    cs.center_at(u, p, t);
    const Eigen::Vector2d br = cs(u, 0.4) - cs(u, 0.3);
    CHECK(std::abs(br.dot(t)) < 1e-10 * br.norm() * t.norm());
    CHECK(br.norm() == doctest::Approx(0.1 * std::cosh(0.3)).epsilon(1e-10));
  }
  Eigen::Vector2d p, t;
  CHECK_THROWS_AS(cs.center_at(2.5, p, t), DomainError);
}

TEST_CASE("fit_initial_manifold: plane rectangle") {
  const StripDomain pl(builtin_surface("plane"), -1, 1, 0.2, 0.1);
  const BSplineManifold2D m = fit_initial_manifold(pl, build_initial_surface(pl, solve_center_ode(pl)), 4);
  CHECK(m.space1().degree() == 3);
  CHECK(m.space2().degree() == 1);
  for (double u = -1; u <= 1; u += 0.1)
    for (double v : {0.1, 0.2, 0.3}) CHECK((evaluate(m, u, v) - Eigen::Vector2d(u + 1, v - 0.2)).norm() < 1e-10);
}

TEST_CASE("fit_initial_manifold: circle fixture") {
  const StripDomain s(oracle::circle_fixture(), 0, M_PI, 0.0, 0.1);
  const InitialSurface is = build_initial_surface(s, solve_center_ode(s));
  const BSplineManifold2D m = fit_initial_manifold(s, is, 8);
  double worst = 0;
  for (int k = 0; k <= 400; ++k) {
    const double u = M_PI * k / 400;
    for (double v : {-0.1, 0.0, 0.1}) worst = std::max(worst, (evaluate(m, u, v) - is(u, v)).norm());
  }
  CHECK(worst < 1e-4 * M_PI);
  // Conditions on the center line: metric and planar curvature.
  for (int k = 1; k < 40; ++k) {
    const double u = M_PI * k / 40;
    const ManifoldJet j = evaluate_jet(m, u, 0.0);
    CHECK(std::abs(j.p1.squaredNorm() - 1.0) < 1e-3);
    const double h = 1e-4;
    const Eigen::Vector2d dd = (evaluate_jet(m, u + h, 0).p1 - evaluate_jet(m, u - h, 0).p1) / (2 * h);
    CHECK(planar_curvature(j.p1, dd) == doctest::Approx(1.0).epsilon(1e-2));
  }
}

TEST_CASE("fit_initial_manifold: catenoid waist center row is collinear") {
  const StripDomain s(builtin_surface("catenoid"), -M_PI, M_PI, 0.0, 0.1);
  const BSplineManifold2D m = fit_initial_manifold(s, build_initial_surface(s, solve_center_ode(s)), 16);
  // Center row of a linear-in-u2 net is the mean of the two rows.
  double worst = 0;
  for (int i = 0; i < m.n1(); ++i) worst = std::max(worst, std::abs(0.5 * (m.point(i, 0).y() + m.point(i, 1).y())));
  CHECK(worst < 1e-8);
}
