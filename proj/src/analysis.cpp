#include "stripweave/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "stripweave/errors.hpp"
#include "stripweave/solver.hpp"

namespace stripweave {

double estimate_breadth(const StripDomain& strip, double u1) {
  const Metric2 g = metric(strip.surface(), u1, strip.center());
  const FrameCoeffs f = orthonormal_frame(g);
  // p2 . e2 with e2 = e(1,0) p1 + e(1,1) p2.
  return strip.half_breadth() * (f.e(1, 0) * g.g12 + f.e(1, 1) * g.g22);
}

PredictedStrain predict_strain(const StripDomain& strip, double u1, double r, double poisson) {
  if (std::abs(r) > 1.0 + 1e-12) throw DomainError("normalized breadth coordinate must lie in [-1, 1]");
  const double K = gaussian_curvature(strip.surface(), u1, strip.center());
  const double B = estimate_breadth(strip, u1);
  PredictedStrain p;
  p.e11 = 0.5 * K * B * B * (r * r - 1.0 / 3.0);
  p.e22 = -poisson * p.e11;
  return p;
}

StrainPrediction predict_strip(const StripDomain& strip, int samples) {
  if (samples < 2) throw Error("need at least two samples");
  StrainPrediction out;
  out.k_min = std::numeric_limits<double>::infinity();
  out.k_max = -out.k_min;
  for (int i = 0; i < samples; ++i) {
    const double u1 = strip.u1a() + (strip.u1b() - strip.u1a()) * i / (samples - 1);
    StrainPredictionSample s;
    s.u1 = u1;
    s.K = gaussian_curvature(strip.surface(), u1, strip.center());
    s.B = estimate_breadth(strip, u1);
    s.peak = std::abs(s.K) * s.B * s.B / 3.0;
    if (!std::isfinite(s.peak)) throw GeometryError("curvature is unbounded along the strip");
    out.peak = std::max(out.peak, s.peak);
    out.k_min = std::min(out.k_min, s.K);
    out.k_max = std::max(out.k_max, s.K);
    out.b_max = std::max(out.b_max, s.B);
    out.samples.push_back(s);
  }
  return out;
}

double leading_energy(const StripDomain& strip, double young, int samples) {
  // Midpoint rule along u1; ds = sqrt(g11) du1.
  const double h = (strip.u1b() - strip.u1a()) / samples;
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double u1 = strip.u1a() + (i + 0.5) * h;
    const double K = gaussian_curvature(strip.surface(), u1, strip.center());
    const double B = estimate_breadth(strip, u1);
    sum += K * K * std::pow(B, 5) * center_speed(strip, u1) * h;
  }
  return young / 45.0 * sum;
}

Partition suggest_partition(const SurfaceDefinition& surface, double u2_lo, double u2_hi, double max_strain,
                            int samples) {
  if (!(max_strain > 0.0)) throw Error("max_strain must be positive");
  if (!(u2_lo < u2_hi)) throw Error("empty u2 range");
  const ParamRect& d = surface.domain();
  auto peak = [&](double lo, double hi) {
    return predict_strip(StripDomain(surface, d.u1_min, d.u1_max, 0.5 * (lo + hi), 0.5 * (hi - lo)), samples).peak;
  };
  Partition out;
  out.boundaries.push_back(u2_lo);
  double lo = u2_lo;
  const double min_width = 1e-9 * (u2_hi - u2_lo);
  while (lo < u2_hi) {
    double hi = u2_hi;
    double p = peak(lo, hi);
    if (p > max_strain) {
      double a = lo, b = u2_hi;
      for (int it = 0; it < 100 && b - a > 1e-14 * (u2_hi - u2_lo); ++it) {
        const double mid = 0.5 * (a + b);
        if (mid - lo < min_width || peak(lo, mid) <= max_strain) a = mid;
        else b = mid;
      }
      hi = a;
      if (hi - lo < min_width) throw GeometryError("curvature too large: no strip satisfies the strain limit");
      p = peak(lo, hi);
    }
    out.boundaries.push_back(hi);
    out.peaks.push_back(p);
    lo = hi;
  }
  return out;
}

BetaRun measure_run(const StripDomain& strip, const ElasticityParams& params, const BSplineManifold2D& m,
                    double beta, double energy, int n, int mcount, double interior) {
  BetaRun run;
  run.beta = beta;
  run.energy = energy;
  run.energy_pred = leading_energy(strip, params.young);
  const double len = strip.u1b() - strip.u1a();
  const double a = strip.u1a() + 0.5 * (1.0 - interior) * len;
  const double b = strip.u1b() - 0.5 * (1.0 - interior) * len;
  double s11 = 0.0, s22 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u1 = a + (b - a) * i / (n - 1);
    for (int j = 0; j < mcount; ++j) {
      const double u2 = strip.u2_min() + (strip.u2_max() - strip.u2_min()) * j / (mcount - 1);
      const StrainSample s = strain_sample(strip, params, m, u1, u2);
      const double pred = predict_strain(strip, s.u1, std::clamp(s.r, -1.0, 1.0), params.poisson).e11;
      run.e11_error = std::max(run.e11_error, std::abs(s.E0(0, 0) - pred));
      run.e11_max = std::max(run.e11_max, std::abs(s.E0(0, 0)));
      s11 = std::max(s11, std::abs(s.S0(0, 0)));
      s22 = std::max(s22, std::abs(s.S0(1, 1)));
    }
  }
  run.stress_ratio = s11 > 0.0 ? s22 / s11 : 0.0;
  run.scale = params.young * strip_area(strip);
  return run;
}

std::optional<double> loglog_slope(double a0, double a1, double b0, double b1, double zero) {
  if (std::abs(a0) <= zero && std::abs(a1) <= zero) return std::nullopt;
  return std::log(std::abs(a0) / std::abs(a1)) / std::log(b0 / b1);
}

ScalingReport validate_appendix(const std::vector<BetaRun>& runs, double e11_min_slope,
                                 std::pair<double, double> energy_band) {
  if (runs.size() < 2) throw Error("breadth-scaling validation needs at least two breadth scales");
  ScalingReport rep;
  rep.runs = runs;
  constexpr double strain_zero = 1e-13;
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    const BetaRun& p = runs[i];
    const BetaRun& q = runs[i + 1];
    if (!(q.beta < p.beta)) throw Error("runs must be ordered by decreasing beta");
    const auto se = loglog_slope(p.e11_error, q.e11_error, p.beta, q.beta, strain_zero);
    const auto sw = loglog_slope(p.energy, q.energy, p.beta, q.beta, strain_zero * strain_zero * std::max(p.scale, q.scale));
    rep.e11_slopes.push_back(se);
    rep.energy_slopes.push_back(sw);
    if (se && !(*se >= e11_min_slope)) rep.e11_ok = false;
    if (sw && !(*sw >= energy_band.first && *sw <= energy_band.second)) rep.energy_ok = false;
    const bool zero_ratio = p.stress_ratio <= strain_zero && q.stress_ratio <= strain_zero;
    if (!zero_ratio && !(q.stress_ratio < p.stress_ratio)) rep.stress_monotone = false;
  }
  return rep;
}

nlohmann::json to_json(const ScalingReport& r) {
  nlohmann::json j;
  nlohmann::json runs = nlohmann::json::array();
  for (const BetaRun& b : r.runs) {
    runs.push_back({{"beta", b.beta},
                    {"e11_error", b.e11_error},
                    {"e11_max", b.e11_max},
                    {"stress_ratio", b.stress_ratio},
                    {"energy", b.energy},
                    {"energy_leading_order", b.energy_pred}});
  }
  auto slopes = [](const std::vector<std::optional<double>>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& s : v) a.push_back(s ? nlohmann::json(*s) : nlohmann::json("exact-zero"));
    return a;
  };
  j["runs"] = std::move(runs);
  j["e11_error_slopes"] = slopes(r.e11_slopes);
  j["energy_slopes"] = slopes(r.energy_slopes);
  j["stress_ratio_monotone"] = r.stress_monotone;
  j["e11_ok"] = r.e11_ok;
  j["energy_ok"] = r.energy_ok;
  j["passed"] = r.passed();
  return j;
}

std::string to_table(const ScalingReport& r) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%8s %12s %12s %12s %12s %12s\n", "beta", "E11 err", "S22/S11", "W", "W leading",
                "slope E/W");
  out += line;
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    const BetaRun& b = r.runs[i];
    std::string slope = "-";
    if (i > 0) {
      auto f = [](const std::optional<double>& s) {
        char buf[32];
        if (!s) return std::string("exact-zero");
        std::snprintf(buf, sizeof buf, "%.2f", *s);
        return std::string(buf);
      };
      slope = f(r.e11_slopes[i - 1]) + "/" + f(r.energy_slopes[i - 1]);
    }
    std::snprintf(line, sizeof line, "%8.4f %12.4e %12.4e %12.4e %12.4e %12s\n", b.beta, b.e11_error, b.stress_ratio,
                  b.energy, b.energy_pred, slope.c_str());
    out += line;
  }
  out += r.passed() ? "bands met\n" : "bands NOT met\n";
  return out;
}

double aligned_rms(const BSplineManifold2D& a, const BSplineManifold2D& b, int n, int mcount) {
  const double u1a = std::max(a.space1().lower(), b.space1().lower());
  const double u1b = std::min(a.space1().upper(), b.space1().upper());
  const double u2a = std::max(a.space2().lower(), b.space2().lower());
  const double u2b = std::min(a.space2().upper(), b.space2().upper());
  if (!(u1a < u1b && u2a < u2b)) throw Error("manifolds have disjoint parameter rectangles");
  const int N = n * mcount;
  Eigen::MatrixXd P(N, 2), Q(N, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < mcount; ++j) {
      const double u1 = u1a + (u1b - u1a) * i / (n - 1);
      const double u2 = u2a + (u2b - u2a) * j / (mcount - 1);
      P.row(i * mcount + j) = evaluate(a, u1, u2).transpose();
      Q.row(i * mcount + j) = evaluate(b, u1, u2).transpose();
    }
  }
  const Eigen::RowVector2d pc = P.colwise().mean(), qc = Q.colwise().mean();
  P.rowwise() -= pc;
  Q.rowwise() -= qc;
  const Eigen::Matrix2d H = P.transpose() * Q;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix2d D = Eigen::Matrix2d::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) D(1, 1) = -1.0;
  const Eigen::Matrix2d R = svd.matrixV() * D * svd.matrixU().transpose();
  const Eigen::MatrixXd diff = P * R.transpose() - Q;
  return std::sqrt(diff.squaredNorm() / N);
}

}  // namespace stripweave
