#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <json.hpp>

#include "stripweave/bspline.hpp"
#include "stripweave/elasticity.hpp"
#include "stripweave/geometry.hpp"

namespace stripweave {

enum class PinMode { Rigid3, ThreePoint, None };

PinMode pin_mode_from_string(const std::string& s);
std::string to_string(PinMode m);

struct PinnedDof {
  int point;  // control index i1 * n2 + i2
  int axis;   // 0 = x, 1 = y
  double value;
};

struct PinConfig {
  PinMode mode = PinMode::Rigid3;
  std::vector<PinnedDof> dofs;
};

/// Pins taken at the current control positions of `m`.
PinConfig make_pins(const BSplineManifold2D& m, PinMode mode);

/// Quadrature data on one knot-span element. Row q of N / N1 / N2 holds the
/// local basis functions (a1 * (p2 + 1) + a2) and their u1 / u2 derivatives.
struct Element {
  int first1 = 0;
  int first2 = 0;
  std::vector<double> u1;
  std::vector<double> u2;
  std::vector<double> weight;  // Gauss weight times sqrt(det g0)
  std::vector<Metric2> g0;
  std::vector<Stiffness> C;
  Eigen::MatrixXd N;
  Eigen::MatrixXd N1;
  Eigen::MatrixXd N2;
};

struct NewtonRecord {
  double residual = 0.0;  // reduced infinity norm before the step
  double energy = 0.0;    // after the step
  double delta_energy = 0.0;
  double step_norm = 0.0;
  int halvings = 0;
  std::string pins;
};

struct SolverOptions {
  double tol_rel = 1e-8;
  int max_iter = 50;
  double release_rel = 1e-3;
  int max_halvings = 8;
  int threads = 1;
  int quad_extra = 2;          // Gauss points per span = degree + quad_extra
  int dense_limit = 900;       // reduced size above which the sparse LU is used
};

class SolverState {
 public:
  SolverState(StripDomain strip, ElasticityParams params, BSplineManifold2D manifold,
              PinMode mode = PinMode::Rigid3, SolverOptions options = {});

  const StripDomain& strip() const { return strip_; }
  const ElasticityParams& params() const { return params_; }
  const BSplineManifold2D& manifold() const { return manifold_; }
  const SolverOptions& options() const { return options_; }
  const PinConfig& pins() const { return pins_; }
  const std::vector<Element>& elements() const { return elements_; }
  int num_dofs() const { return 2 * manifold_.n1() * manifold_.n2(); }

  /// Integral of sqrt(det g0) over the strip.
  double area() const { return area_; }
  double residual_scale() const { return params_.young * area_; }

  /// Replaces the control net; the geometry cache is kept.
  void set_control(ControlNet control);
  /// Replaces the manifold; the cache is rebuilt and pins re-taken.
  void set_manifold(BSplineManifold2D m);
  void set_pin_mode(PinMode mode);

  std::vector<int> free_dofs() const;
  double reduced_residual_norm(const Eigen::VectorXd& F) const;

  std::vector<NewtonRecord> history;

 private:
  void rebuild_cache();

  StripDomain strip_;
  ElasticityParams params_;
  BSplineManifold2D manifold_;
  SolverOptions options_;
  PinConfig pins_;
  std::vector<Element> elements_;
  double area_ = 0.0;
};

/// Gradient of the strain energy with respect to the control DOFs (index 2 I + axis).
Eigen::VectorXd assemble_residual(const SolverState& st);
/// Its derivative (the energy Hessian).
Eigen::SparseMatrix<double> assemble_jacobian(const SolverState& st);
double strain_energy(const SolverState& st);

/// One constrained Newton step with step halving; appends to st.history.
NewtonRecord newton_step(SolverState& st);

/// Newton to convergence at the current space. Releases three_point pins to
/// rigid3 once the residual is below release_rel * Y * area.
/// Returns false if max_iter is exhausted.
bool converge(SolverState& st);

struct RefinementSchedule {
  int initial_spans = 16;
  int ode_steps = 256;
  bool p_refine = true;
  int bisections = 2;
  int naturalness_rounds = 2;
  double naturalness_tol = 0.1;
  int max_spans = 1024;
  PinMode first_pins = PinMode::ThreePoint;
};

struct StageReport {
  std::string name;
  int degree1 = 0;
  int degree2 = 0;
  int spans1 = 0;
  int dofs = 0;
  int iterations = 0;
  bool converged = false;
  double energy = 0.0;
  double delta_energy = 0.0;  // relative to the parent stage
  double refine_change = 0.0; // max geometry change of the refinement feeding this stage
  std::vector<double> residuals;
};

struct EmbeddingResult {
  BSplineManifold2D manifold;
  double energy = 0.0;
  bool converged = false;
  std::vector<StageReport> stages;  // each stage is the child of the previous one
};

nlohmann::json to_json(const std::vector<StageReport>& stages);

/// Seed, converge at (3,1), p-refine to (3,3), bisect u1 spans, then bisect
/// spans where E<0>_11 is not smooth across knots. With `seed`, only polishes
/// the given manifold.
EmbeddingResult solve_embedding(const StripDomain& strip, const ElasticityParams& params,
                                const RefinementSchedule& schedule, const SolverOptions& options = {},
                                const std::optional<BSplineManifold2D>& seed = std::nullopt);

struct StrainSample {
  double u1 = 0.0;
  double u2 = 0.0;
  double r = 0.0;  // (u2 - c) / half-breadth
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
  Eigen::Matrix2d E = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d E0 = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d S0 = Eigen::Matrix2d::Zero();
  double density = 0.0;
};

StrainSample strain_sample(const StripDomain& strip, const ElasticityParams& params, const BSplineManifold2D& m,
                           double u1, double u2);

/// Integral of sqrt(det g0) over the strip (Gauss-Legendre, `spans` x 1 cells).
double strip_area(const StripDomain& strip, int spans = 64);

/// Samples on an n x m grid (u1 major), ends included.
struct StrainField {
  int n = 0;
  int m = 0;
  std::vector<StrainSample> samples;
  const StrainSample& at(int i, int j) const { return samples[static_cast<std::size_t>(i) * m + j]; }
};

StrainField strain_field(const StripDomain& strip, const ElasticityParams& params, const BSplineManifold2D& m, int n,
                         int mcount);
inline StrainField strain_field(const SolverState& st, int n, int mcount) {
  return strain_field(st.strip(), st.params(), st.manifold(), n, mcount);
}

/// u1 knots to insert where E<0>_11 at adjacent span midpoints differs by
/// more than tol * max |E<0>_11|.
std::vector<double> unnatural_spans(const StripDomain& strip, const ElasticityParams& params,
                                    const BSplineManifold2D& m, double tol);

}  // namespace stripweave
