#include "stripweave/elasticity.hpp"

#include <cmath>

#include <Eigen/LU>

#include "stripweave/errors.hpp"

namespace stripweave {

void ElasticityParams::validate() const {
  if (!(young > 0.0) || !std::isfinite(young)) throw ConfigError("Young's modulus must be positive");
  if (dim < 2) throw ConfigError("dimension must be at least 2");
  if (!(poisson > -1.0 && poisson < 1.0 / (dim - 1))) throw ConfigError("Poisson's ratio out of range");
}

namespace {

Stiffness stiffness_from_inverse(const ElasticityParams& params, const Eigen::Matrix2d& gi) {
  constexpr int P[3][2] = {{0, 0}, {1, 1}, {0, 1}};
  const double lam = params.lambda();
  const double mu = params.mu();
  Stiffness C;
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      const int i = P[a][0], j = P[a][1], k = P[b][0], l = P[b][1];
      const double v = lam * gi(i, j) * gi(k, l) + mu * (gi(i, k) * gi(j, l) + gi(i, l) * gi(j, k));
      C.voigt(a, b) = v;
      C.voigt(b, a) = v;
    }
  }
  return C;
}

double density_of(const Stiffness& C, const Eigen::Matrix2d& E) {
  const Eigen::Vector3d e = engineering(E);
  return 0.5 * e.dot(C.voigt * e);
}

}  // namespace

Stiffness stiffness(const ElasticityParams& params, const Metric2& g0) {
  require_positive_definite(g0);
  return stiffness_from_inverse(params, g0.inverse());
}

StrainState strain_state(const ElasticityParams& params, const Metric2& g0, const Eigen::Vector2d& p1,
                         const Eigen::Vector2d& p2) {
  const Stiffness C = stiffness(params, g0);
  StrainState st;
  st.g0 = g0;
  st.gt << p1.dot(p1), p1.dot(p2), p1.dot(p2), p2.dot(p2);
  st.E = 0.5 * (st.gt - g0.matrix());
  const Eigen::Vector3d s = C.voigt * engineering(st.E);
  st.S << s[0], s[2], s[2], s[1];
  st.E0 = tensor_to_orthonormal(st.E, g0);
  st.S0 = contravariant_to_orthonormal(st.S, g0);
  st.density = density_of(C, st.E);
  return st;
}

std::vector<double> swap_energy_check(const ElasticityParams& params, const Metric2& g0, const Eigen::Matrix2d& Ebar,
                                      const std::vector<double>& alphas) {
  require_positive_definite(g0);
  const Eigen::Matrix2d G0 = g0.matrix();
  std::vector<double> out;
  for (double alpha : alphas) {
    const Eigen::Matrix2d E = alpha * Ebar;
    const Eigen::Matrix2d Gt = G0 + 2.0 * E;
    if (!(Gt(0, 0) > 0.0 && Gt.determinant() > 0.0)) throw GeometryError("swapped metric leaves the positive cone");
    const double w = density_of(stiffness_from_inverse(params, G0.inverse()), E) * std::sqrt(G0.determinant());
    const double w_hat = density_of(stiffness_from_inverse(params, Gt.inverse()), -E) * std::sqrt(Gt.determinant());
    out.push_back(std::abs(w - w_hat));
  }
  return out;
}

}  // namespace stripweave
