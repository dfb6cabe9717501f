#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stripweave/bspline.hpp"
#include "stripweave/elasticity.hpp"
#include "stripweave/geometry.hpp"

namespace stripweave {

struct PredictedStrain {
  double e11 = 0.0;
  double e22 = 0.0;
};

/// E11 = K B^2 (r^2 - 1/3) / 2 with K and B on the center line; E22 = -nu E11.
PredictedStrain predict_strain(const StripDomain& strip, double u1, double r, double poisson = 0.25);

/// B = half-breadth times the length of the breadth direction projected on e2.
double estimate_breadth(const StripDomain& strip, double u1);

struct StrainPredictionSample {
  double u1 = 0.0;
  double K = 0.0;
  double B = 0.0;
  double peak = 0.0;  // |K| B^2 / 3, attained at r = +-1
};

struct StrainPrediction {
  std::vector<StrainPredictionSample> samples;
  double peak = 0.0;
  double k_min = 0.0;
  double k_max = 0.0;
  double b_max = 0.0;
};

StrainPrediction predict_strip(const StripDomain& strip, int samples = 33);

/// Leading-order strain energy (Y / 45) \int K^2 B^5 ds along the center line.
double leading_energy(const StripDomain& strip, double young, int samples = 2000);

struct Partition {
  std::vector<double> boundaries;  // u2 values, first = lo, last = hi
  std::vector<double> peaks;
};

/// Greedy sweep in u2: each strip spans the full u1 range of the surface and
/// grows until its predicted peak strain reaches max_strain.
Partition suggest_partition(const SurfaceDefinition& surface, double u2_lo, double u2_hi, double max_strain = 0.01,
                            int samples = 33);

/// Sampled strain statistics of one solved strip at breadth scale beta.
struct BetaRun {
  double beta = 1.0;
  double e11_error = 0.0;     // max |E<0>11 - prediction|, interior samples
  double e11_max = 0.0;
  double stress_ratio = 0.0;  // max |S<0>22| / max |S<0>11|
  double energy = 0.0;
  double energy_pred = 0.0;
  double scale = 1.0;         // Y * area, used to decide exact zeros
};

/// Samples the middle `interior` fraction of the u1 range on an n x m grid.
BetaRun measure_run(const StripDomain& strip, const ElasticityParams& params, const BSplineManifold2D& m,
                    double beta, double energy, int n = 161, int mcount = 17, double interior = 0.8);

struct ScalingReport {
  std::vector<BetaRun> runs;
  // Log-log slopes between consecutive runs; nullopt when both values are zero.
  std::vector<std::optional<double>> e11_slopes;
  std::vector<std::optional<double>> energy_slopes;
  bool stress_monotone = true;
  bool e11_ok = true;
  bool energy_ok = true;
  bool passed() const { return e11_ok && energy_ok && stress_monotone; }
};

/// Runs must be ordered by decreasing beta.
ScalingReport validate_appendix(const std::vector<BetaRun>& runs, double e11_min_slope = 2.5,
                                 std::pair<double, double> energy_band = {4.5, 5.5});

nlohmann::json to_json(const ScalingReport& r);
std::string to_table(const ScalingReport& r);

/// log(a0 / a1) / log(b0 / b1); nullopt if both a values vanish.
std::optional<double> loglog_slope(double a0, double a1, double b0, double b1, double zero = 0.0);

/// RMS distance between two manifolds sampled on an n x m grid of their
/// common parameter rectangle, after the best rigid alignment.
double aligned_rms(const BSplineManifold2D& a, const BSplineManifold2D& b, int n = 101, int mcount = 11);

}  // namespace stripweave
