#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "stripweave/errors.hpp"
#include "stripweave/geometry.hpp"

using namespace stripweave;

TEST_CASE("metric: catenoid, plane, paraboloid") {
  const Metric2 c = metric(builtin_surface("catenoid"), 1.0, 0.5);
  const double ch2 = std::cosh(0.5) * std::cosh(0.5);
  CHECK(c.g11 == doctest::Approx(ch2).epsilon(1e-14));
  CHECK(c.g22 == doctest::Approx(ch2).epsilon(1e-14));
  CHECK(std::abs(c.g12) < 1e-15);
  CHECK(ch2 == doctest::Approx(1.27154).epsilon(1e-5));

  const Metric2 p = metric(builtin_surface("plane"), 0.3, 0.1);
  CHECK(p.g11 == 1.0);
  CHECK(p.g12 == 0.0);
  CHECK(p.g22 == 1.0);

  const Metric2 q = metric(builtin_surface("paraboloid"), 1.0, 1.0);
  CHECK(q.g11 == doctest::Approx(5.0));
  CHECK(q.g12 == doctest::Approx(4.0));
  CHECK(q.g22 == doctest::Approx(5.0));
  const Eigen::Matrix2d fd = oracle::fd_metric(builtin_surface("paraboloid"), 0.7, 0.6);
  const Metric2 q2 = metric(builtin_surface("paraboloid"), 0.7, 0.6);
  CHECK((fd - q2.matrix()).norm() < 1e-8);
}

TEST_CASE("metric partials match differences of the metric") {
  const SurfaceDefinition s = builtin_surface("helicoid");
  const double h = 1e-6;
  const Metric2 g = metric(s, 0.4, 0.3);
  const Metric2 a = metric(s, 0.4 + h, 0.3), b = metric(s, 0.4 - h, 0.3);
  const Metric2 c = metric(s, 0.4, 0.3 + h), d = metric(s, 0.4, 0.3 - h);
  const Eigen::Vector3d fd1((a.g11 - b.g11) / (2 * h), (a.g12 - b.g12) / (2 * h), (a.g22 - b.g22) / (2 * h));
  const Eigen::Vector3d fd2((c.g11 - d.g11) / (2 * h), (c.g12 - d.g12) / (2 * h), (c.g22 - d.g22) / (2 * h));
  CHECK((g.d1 - fd1).norm() < 1e-8);
  CHECK((g.d2 - fd2).norm() < 1e-8);
}

TEST_CASE("gaussian_curvature: closed-form values") {
  CHECK(gaussian_curvature(builtin_surface("paraboloid"), 0, 0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(gaussian_curvature(builtin_surface("plane"), 0.2, -0.4) == 0.0);
  CHECK(gaussian_curvature(builtin_surface("catenoid"), 1.3, 0.0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(gaussian_curvature(builtin_surface("catenoid"), 0.1, 0.5) ==
        doctest::Approx(-1.0 / std::pow(std::cosh(0.5), 4)).epsilon(1e-12));
  CHECK(gaussian_curvature(builtin_surface("catenoid"), 0.0, 0.0) == doctest::Approx(oracle::brioschi(builtin_surface("catenoid"), 0.0, 0.0)).epsilon(1e-8));
  CHECK(gaussian_curvature(builtin_surface("sphere_patch", {{"radius", 2.0}}), 0.3, 1.0) ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("property: extrinsic curvature agrees with the intrinsic Brioschi formula") {
  std::mt19937 rng(3);
  for (const char* name : {"paraboloid", "hyperbolic_paraboloid", "catenoid", "helicoid", "sphere_patch", "plane"}) {
    CAPTURE(name);
    const SurfaceDefinition s = builtin_surface(name);
    const ParamRect d = s.domain();
    std::uniform_real_distribution<double> U1(d.u1_min + 0.05, d.u1_max - 0.05), U2(d.u2_min + 0.05, d.u2_max - 0.05);
    for (int k = 0; k < 50; ++k) {
      const double u = U1(rng), v = U2(rng);
      const double K = gaussian_curvature(s, u, v);
      const double Kb = oracle::brioschi(s, u, v);
      CHECK(std::abs(K - Kb) <= 1e-6 * std::max(1.0, std::abs(K)));
    }
  }
}

TEST_CASE("strip domain validation") {
  const SurfaceDefinition s = builtin_surface("paraboloid");
  CHECK_NOTHROW(StripDomain(s, -1, 1, 0.05, 0.05));
  CHECK_THROWS_AS(StripDomain(s, -1, 1, 0.98, 0.05), DomainError);
  CHECK_THROWS_AS(StripDomain(s, -1, 1, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(StripDomain(s, 1, -1, 0.0, 0.1), DomainError);
  const StripDomain n = StripDomain(s, -1, 1, 0.05, 0.04, 3).narrowed(0.5);
  CHECK(n.half_breadth() == 0.02);
  CHECK(n.center() == 0.05);
  CHECK(n.index() == 3);
}

TEST_CASE("center_speed") {
  CHECK(center_speed(StripDomain(builtin_surface("plane"), -1, 1, 0, 0.1), 0.3) == 1.0);
  const StripDomain p(builtin_surface("paraboloid"), -1, 1, 0.05, 0.05);
  CHECK(center_speed(p, 1.0) == doctest::Approx(std::sqrt(oracle::fd_metric(p.surface(), 1.0 - 1e-6, 0.05)(0, 0))).epsilon(1e-6));
  CHECK(center_speed(p, 1.0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(center_speed(StripDomain(builtin_surface("catenoid"), -3, 3, 0, 0.1), 2.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("geodesic_curvature") {
  CHECK(geodesic_curvature(StripDomain(builtin_surface("plane"), -1, 1, 0.3, 0.1), 0.2) == 0.0);
  CHECK(std::abs(geodesic_curvature(StripDomain(builtin_surface("catenoid"), -3, 3, 0, 0.1), 1.0)) < 1e-15);
  // Latitude circle at colatitude t on the unit sphere: |kappa| = cot t.
  for (double t : {0.7, 1.0, 1.3, 2.0}) {
    const StripDomain s(builtin_surface("sphere_patch"), -1, 1, t, 0.01);
    CHECK(std::abs(geodesic_curvature(s, 0.2)) == doctest::Approx(std::abs(std::cos(t) / std::sin(t))).epsilon(1e-12));
  }
  // Circle fixture: u2 = c is a circle of radius 1 - c, traversed counterclockwise
  // with +u2 pointing inwards, so it turns towards +u2.
  const StripDomain ring(oracle::circle_fixture(), 0, M_PI, 0.2, 0.1);
  CHECK(geodesic_curvature(ring, 1.0) == doctest::Approx(1.0 / 0.8).epsilon(1e-12));
}

TEST_CASE("property: geodesic curvature from Christoffel symbols") {
  // kappa = sqrt(det g) Gamma^2_11 / g11^(3/2) for a coordinate line u2 = c.
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-0.8, 0.8);
  for (const char* name : {"paraboloid", "hyperbolic_paraboloid", "helicoid"}) {
    const SurfaceDefinition s = builtin_surface(name);
    for (int k = 0; k < 10; ++k) {
      const double u = U(rng), v = U(rng);
      const double h = 1e-5;
      auto g = [&](double a, double b) { return oracle::fd_metric(s, a, b, 1e-6); };
      const Eigen::Matrix2d G = g(u, v);
      const Eigen::Matrix2d G1 = (g(u + h, v) - g(u - h, v)) / (2 * h);
      const Eigen::Matrix2d G2 = (g(u, v + h) - g(u, v - h)) / (2 * h);
      // Gamma_{11,k} (first kind), then raise.
      const double c111 = 0.5 * G1(0, 0);
      const double c112 = G1(0, 1) - 0.5 * G2(0, 0);
      const Eigen::Vector2d gamma = G.inverse() * Eigen::Vector2d(c111, c112);
      const double kappa = std::sqrt(G.determinant()) * gamma[1] / std::pow(G(0, 0), 1.5);
      const double mine = geodesic_curvature(StripDomain(s, -1, 1, v, 0.01), u);
      CHECK(std::abs(mine - kappa) < 1e-4 * std::max(1.0, std::abs(kappa)));
    }
  }
}

TEST_CASE("orthonormal_frame") {
  Metric2 g;
  CHECK((orthonormal_frame(g).e - Eigen::Matrix2d::Identity()).norm() == 0.0);
  g.g11 = 4;
  const Eigen::Matrix2d e = orthonormal_frame(g).e;
  CHECK(e(0, 0) == 0.5);
  CHECK(e(0, 1) == 0.0);
  CHECK(e(1, 0) == 0.0);
  CHECK(e(1, 1) == 1.0);
  g.g11 = 5;
  g.g12 = 4;
  g.g22 = 5;
  CHECK((orthonormal_frame(g).e - oracle::gram_schmidt(5, 4, 5)).norm() < 1e-14);
  CHECK(orthonormal_frame(g).e(0, 0) == doctest::Approx(1 / std::sqrt(5.0)));
}

TEST_CASE("property: e g e^T = I for random metrics") {
  std::mt19937 rng(13);
  for (int k = 0; k < 100; ++k) {
    const Eigen::Matrix2d A = oracle::random_spd(rng);
    Metric2 g;
    g.g11 = A(0, 0);
    g.g12 = A(0, 1);
    g.g22 = A(1, 1);
    const Eigen::Matrix2d e = orthonormal_frame(g).e;
    CHECK((e * A * e.transpose() - Eigen::Matrix2d::Identity()).norm() < 1e-12);
    CHECK((e - oracle::gram_schmidt(g.g11, g.g12, g.g22)).norm() < 1e-12 * e.norm());
  }
}

TEST_CASE("tensor_to_orthonormal") {
  std::mt19937 rng(17);
  const Eigen::Matrix2d A = oracle::random_spd(rng);
  Metric2 g;
  g.g11 = A(0, 0);
  g.g12 = A(0, 1);
  g.g22 = A(1, 1);
  CHECK((tensor_to_orthonormal(A, g) - Eigen::Matrix2d::Identity()).norm() < 1e-12);
  CHECK(tensor_to_orthonormal(Eigen::Matrix2d::Zero(), g).norm() == 0.0);

  Metric2 d;
  d.g11 = 4;
  Eigen::Matrix2d T;
  T << 0.3, -0.7, -0.7, 1.1;
  const Eigen::Matrix2d t = tensor_to_orthonormal(T, d);
  CHECK(t(0, 0) == doctest::Approx(0.3 / 4));
  CHECK(t(0, 1) == doctest::Approx(-0.7 / 2));
  CHECK(t(1, 1) == doctest::Approx(1.1));
  // Contravariant: the inverse metric maps to the identity as well.
  CHECK((contravariant_to_orthonormal(A.inverse(), g) - Eigen::Matrix2d::Identity()).norm() < 1e-12);
}

TEST_CASE("degenerate metrics are rejected") {
  Metric2 g;
  g.g11 = 1;
  g.g12 = 1;
  g.g22 = 1;
  CHECK_THROWS_AS(require_positive_definite(g), GeometryError);
  const SurfaceDefinition cone = parse_surface("u2*cos(u1) ; u2*sin(u1) ; u2 ; [0,1]x[0,1]");
  CHECK_THROWS_AS(orthonormal_frame(metric(cone, 0.5, 0.0)), GeometryError);
}
