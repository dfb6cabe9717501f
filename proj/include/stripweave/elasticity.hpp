#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "stripweave/geometry.hpp"

namespace stripweave {

/// Isotropic material. `dim` enters only the Lame formula for lambda.
struct ElasticityParams {
  double young = 1.0;
  double poisson = 0.25;
  int dim = 2;

  double lambda() const { return poisson * young / ((1.0 + poisson) * (1.0 - (dim - 1) * poisson)); }
  double mu() const { return young / (2.0 * (1.0 + poisson)); }
  void validate() const;
};

/// C^{ijkl} = lambda g^ij g^kl + mu (g^ik g^jl + g^il g^jk), stored in Voigt
/// form over the index pairs (11, 22, 12). Symmetric by construction.
struct Stiffness {
  Eigen::Matrix3d voigt = Eigen::Matrix3d::Zero();

  static int pair(int i, int j) { return i == j ? i : 2; }
  double operator()(int i, int j, int k, int l) const { return voigt(pair(i, j), pair(k, l)); }
};

Stiffness stiffness(const ElasticityParams& params, const Metric2& g0);

/// (E11, E22, 2 E12): pairs with Stiffness::voigt so that C(E, E) = e^T D e.
inline Eigen::Vector3d engineering(const Eigen::Matrix2d& E) { return {E(0, 0), E(1, 1), 2.0 * E(0, 1)}; }

struct StrainState {
  Metric2 g0;
  Eigen::Matrix2d gt;
  Eigen::Matrix2d E;   // covariant components
  Eigen::Matrix2d E0;  // orthonormal frame of g0
  Eigen::Matrix2d S;   // contravariant components
  Eigen::Matrix2d S0;
  double density = 0.0;  // 1/2 C(E, E), without the volume factor
};

StrainState strain_state(const ElasticityParams& params, const Metric2& g0, const Eigen::Vector2d& p1,
                         const Eigen::Vector2d& p2);

/// Energy densities (with volume factor) of the pair g0 -> g0 + 2 a Ebar and of
/// the swapped pair, differenced for each a.
std::vector<double> swap_energy_check(const ElasticityParams& params, const Metric2& g0, const Eigen::Matrix2d& Ebar,
                                      const std::vector<double>& alphas);

}  // namespace stripweave
