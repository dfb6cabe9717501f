// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include <Eigen/Eigenvalues>

#include "stripweave/analysis.hpp"
#include "stripweave/config.hpp"
#include "stripweave/initial_state.hpp"
#include "stripweave/pipeline.hpp"
#include "stripweave/quadrature.hpp"
#include "stripweave/solver.hpp"

using namespace stripweave;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::VectorXd flat(const ControlNet& c) { return Eigen::Map<const Eigen::VectorXd>(c.data(), c.size()); }
ControlNet unflat(const Eigen::VectorXd& a) { return Eigen::Map<const ControlNet>(a.data(), a.size() / 2, 2); }

BSplineManifold2D seed(const StripDomain& s, int spans) {
  return fit_initial_manifold(s, build_initial_surface(s, solve_center_ode(s)), spans);
}

double center_length(const StripDomain& s) {
  const GaussRule g = gauss_legendre(8);
  const int spans = 64;
  double L = 0;
  for (int k = 0; k < spans; ++k) {
    const double a = s.u1a() + (s.u1b() - s.u1a()) * k / spans, b = s.u1a() + (s.u1b() - s.u1a()) * (k + 1) / spans;
    for (std::size_t q = 0; q < g.nodes.size(); ++q)
      L += 0.5 * (b - a) * g.weights[q] * center_speed(s, 0.5 * (a + b) + 0.5 * (b - a) * g.nodes[q]);
  }
  return L;
}

// Narrow paraboloid strip of the breadth-scaling study, at b and b/2.
struct BetaStudy {
  static RefinementSchedule schedule() {
    RefinementSchedule sc;
    sc.initial_spans = 128;
    sc.bisections = 2;
    sc.naturalness_rounds = 0;
    return sc;
  }
  static SolverOptions options() {
    SolverOptions o;
    o.tol_rel = 1e-12;
    return o;
  }

  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  StripDomain strip{builtin_surface("paraboloid"), -1, 1, 0.05, 0.0125};
  ElasticityParams params;
  EmbeddingResult full = solve_embedding(strip, params, schedule(), options());
  EmbeddingResult half = solve_embedding(strip.narrowed(0.5), params, schedule(), options());
  BetaRun run_full = measure_run(strip, params, full.manifold, 1.0, full.energy);
  BetaRun run_half = measure_run(strip.narrowed(0.5), params, half.manifold, 0.5, half.energy);
  double seconds = seconds_since(t0);
};

BetaStudy& study() {
  static BetaStudy s;
  return s;
}

Outcome c1_isometry() {
  const auto t0 = std::chrono::steady_clock::now();
  const StripDomain s(builtin_surface("plane"), -1, 1, 0.0, 0.1);
  const EmbeddingResult r = solve_embedding(s, ElasticityParams{}, RefinementSchedule{});
  const double t = seconds_since(t0);
  const BSplineManifold2D rect = fit_least_squares(r.manifold.space1(), r.manifold.space2(),
                                                   [](double u, double v) { return Eigen::Vector2d(u, v); });
  const double rms = aligned_rms(r.manifold, rect);
  const double area = strip_area(s);
  return {r.energy <= 1e-12 * area && rms < 1e-10 && t < 1.0,
          fmt("W = %.3g (limit %.3g), aligned RMS to rectangle %.3g, %.3f s", r.energy, 1e-12 * area, rms, t)};
}

Outcome c2_catenoid_helicoid() {
  const auto t0 = std::chrono::steady_clock::now();
  const JobConfig cat = load_config(std::string(STRIPWEAVE_CONFIG_DIR) + "/catenoid.json");
  const JobConfig hel = load_config(std::string(STRIPWEAVE_CONFIG_DIR) + "/helicoid.json");
  const std::vector<StripDomain> a = plan_strips(cat), b = plan_strips(hel);
  bool ok = a.size() == b.size();
  double worst = 0;
  for (int i : {0, 4, 7}) {
    const EmbeddingResult x = solve_embedding(a[i], cat.elasticity, cat.schedule, cat.solver);
    const EmbeddingResult y = solve_embedding(b[i], hel.elasticity, hel.schedule, hel.solver);
    const double rel = aligned_rms(x.manifold, y.manifold) / center_length(a[i]);
    worst = std::max(worst, rel);
    ok = ok && rel < 1e-6;
  }
  const double t = seconds_since(t0);
  return {ok && t < 60.0, fmt("strips 0, 4, 7: worst aligned RMS / length %.3g, %.2f s", worst, t)};
}

Outcome c3_profile() {
  BetaStudy& st = study();
  // E<0>11 across the strip at u1 = 0 against r^2 - 1/3.
  const int m = 41;
  std::vector<double> e(m), q(m);
  for (int j = 0; j < m; ++j) {
    const double r = -1.0 + 2.0 * j / (m - 1);
    const StrainSample s = strain_sample(st.strip, st.params, st.full.manifold, 0.0, st.strip.center() + r * st.strip.half_breadth());
    e[j] = s.E0(0, 0);
    q[j] = r * r - 1.0 / 3.0;
  }
  const Eigen::Map<Eigen::VectorXd> E(e.data(), m), Q(q.data(), m);
  const Eigen::VectorXd de = E.array() - E.mean(), dq = Q.array() - Q.mean();
  const double corr = de.dot(dq) / (de.norm() * dq.norm());
  const double ratio = std::log2(st.run_full.e11_error / st.run_half.e11_error);
  return {corr > 0.99 && ratio >= 2.5,
          fmt("correlation %.6f, max|E11 - pred| %.3g -> %.3g, log2 ratio %.3f", corr, st.run_full.e11_error,
              st.run_half.e11_error, ratio)};
}

Outcome c4_poisson() {
  BetaStudy& st = study();
  const StrainField f = strain_field(st.strip, st.params, st.full.manifold, 161, 17);
  std::vector<double> q;
  for (const StrainSample& s : f.samples) {
    if (std::abs(s.u1) > 0.8) continue;
    q.push_back(s.E0(1, 1) / s.E0(0, 0));
  }
  std::nth_element(q.begin(), q.begin() + q.size() / 2, q.end());
  const double med = q[q.size() / 2];
  return {med >= -0.30 && med <= -0.20, fmt("median E22/E11 = %.5f over %.0f interior samples", med, q.size())};
}

Outcome c5_uniaxial() {
  BetaStudy& st = study();
  const double a = st.run_full.stress_ratio, b = st.run_half.stress_ratio;
  return {a / b >= 1.5, fmt("max|S22|/max|S11|: %.4g at b, %.4g at b/2, factor %.3f", a, b, a / b)};
}

Outcome c6_energy() {
  BetaStudy& st = study();
  const double ratio = st.full.energy / st.half.energy;
  const double lead = leading_energy(st.strip, st.params.young);
  const double match = st.full.energy / lead;
  // The same integral with K to the first power, for reference only.
  double literal = 0;
  const int n = 2000;
  for (int k = 0; k < n; ++k) {
    const double u = -1 + 2.0 * (k + 0.5) / n;
    const double B = estimate_breadth(st.strip, u);
    literal += gaussian_curvature(st.strip.surface(), u, st.strip.center()) * std::pow(B, 5) * center_speed(st.strip, u) * 2.0 / n;
  }
  literal *= st.params.young / 45.0;
  return {ratio >= 24 && ratio <= 40 && match >= 0.5 && match <= 2.0,
          fmt("W(b)/W(b/2) = %.3f; W(b) = %.4g vs (Y/45) int K^2 B^5 ds = %.4g (ratio %.4f)", ratio, st.full.energy, lead,
              match) +
              fmt("; with K^1 the integral is %.4g", literal)};
}

Outcome c7_derivatives() {
  const StripDomain s(builtin_surface("paraboloid"), -1, 1, 0.3, 0.05);
  const BSplineManifold2D base = p_refine(seed(s, 4), 0, 2);
  std::mt19937 rng(2024);
  std::normal_distribution<double> N(0, 0.01);
  double g_err = 0, j_err = 0, sym = 0;
  for (int trial = 0; trial < 20; ++trial) {
    SolverState st(s, ElasticityParams{}, base);
    Eigen::VectorXd a = flat(base.control());
    for (Eigen::Index i = 0; i < a.size(); ++i) a[i] += N(rng);
    st.set_control(unflat(a));
    const Eigen::VectorXd F = assemble_residual(st);
    const Eigen::MatrixXd J = Eigen::MatrixXd(assemble_jacobian(st));
    const double h = 1e-6 * a.cwiseAbs().maxCoeff();
    Eigen::VectorXd gfd(a.size());
    Eigen::MatrixXd jfd(a.size(), a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      Eigen::VectorXd p = a, m = a;
      p[i] += h;
      m[i] -= h;
      st.set_control(unflat(p));
      const double Wp = strain_energy(st);
      const Eigen::VectorXd Fp = assemble_residual(st);
      st.set_control(unflat(m));
      gfd[i] = (Wp - strain_energy(st)) / (2 * h);
      jfd.col(i) = (Fp - assemble_residual(st)) / (2 * h);
    }
    g_err = std::max(g_err, (F - gfd).norm() / F.norm());
    j_err = std::max(j_err, (J - jfd).norm() / J.norm());
    sym = std::max(sym, (J - J.transpose()).norm() / J.norm());
  }
  return {g_err < 1e-5 && j_err < 1e-5 && sym < 1e-10,
          fmt("20 states: gradient rel err %.3g, Jacobian rel err %.3g, asymmetry %.3g", g_err, j_err, sym)};
}

Outcome c8_rigid_modes() {
  const StripDomain s(builtin_surface("plane"), -1, 1, 0.0, 0.1);
  const EmbeddingResult r = solve_embedding(s, ElasticityParams{}, RefinementSchedule{});
  SolverState st(s, ElasticityParams{}, r.manifold, PinMode::None);
  const Eigen::MatrixXd H = Eigen::MatrixXd(assemble_jacobian(st));
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues();
  const double norm = ev.cwiseAbs().maxCoeff();
  int zero = 0, negative = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev[i]) < 1e-8 * norm) ++zero;
    else if (ev[i] < 0) ++negative;
  }
  return {zero == 3 && negative == 0,
          fmt("%.0f DOFs: %.0f near-zero eigenvalues, %.0f negative, smallest nonzero / max = %.3g", ev.size(), zero,
              negative, ev[3] / norm)};
}

Outcome c9_monotone() {
  struct Case {
    const char* surface;
    double center, half;
  };
  const Case cases[] = {{"paraboloid", 0.05, 0.05},  {"paraboloid", 0.55, 0.05}, {"hyperbolic_paraboloid", 0.35, 0.05},
                        {"catenoid", 0.0, 0.0872665}, {"helicoid", 0.349066, 0.0872665}};
  double worst_up = -1e300, worst_change = 0;
  int stages = 0;
  bool ok = true;
  for (const Case& c : cases) {
    const SurfaceDefinition surf = builtin_surface(c.surface);
    const StripDomain s(surf, surf.domain().u1_min, surf.domain().u1_max, c.center, c.half);
    const EmbeddingResult r = solve_embedding(s, ElasticityParams{}, RefinementSchedule{});
    const double tol = 1e-12 * strip_area(s);
    for (std::size_t k = 1; k < r.stages.size(); ++k) {
      const double up = r.stages[k].energy - r.stages[k - 1].energy;
      worst_up = std::max(worst_up, up / tol);
      worst_change = std::max(worst_change, r.stages[k].refine_change);
      ok = ok && up <= tol && r.stages[k].refine_change < 1e-12;
      ++stages;
    }
    ok = ok && r.converged;
  }
  return {ok, fmt("%.0f refinement stages on 5 strips: largest W increase %.3g x tolerance, largest geometry change %.3g",
                  stages, worst_up, worst_change)};
}

Outcome c10_swap() {
  const StripDomain s(builtin_surface("paraboloid"), -1, 1, 0.05, 0.05);
  const ElasticityParams p;
  Eigen::Matrix2d Eb;
  Eb << 0.7, -0.3, -0.3, 0.4;
  const GaussRule g = gauss_legendre(6);
  const int spans = 16;
  auto gap = [&](double alpha) {
    double W = 0, What = 0, pointwise = 0;
    for (int k = 0; k < spans; ++k)
      for (std::size_t a = 0; a < g.nodes.size(); ++a)
        for (std::size_t b = 0; b < g.nodes.size(); ++b) {
          const double h1 = (s.u1b() - s.u1a()) / spans;
          const double u1 = s.u1a() + h1 * (k + 0.5 + 0.5 * g.nodes[a]);
          const double u2 = s.center() + s.half_breadth() * g.nodes[b];
          const double w = 0.5 * h1 * s.half_breadth() * g.weights[a] * g.weights[b];
          const Metric2 g0 = metric(s.surface(), u1, u2);
          Metric2 gt = g0;
          gt.g11 += 2 * alpha * Eb(0, 0);
          gt.g12 += 2 * alpha * Eb(0, 1);
          gt.g22 += 2 * alpha * Eb(1, 1);
          const Eigen::Vector3d e = engineering(alpha * Eb);
          W += w * 0.5 * e.dot(stiffness(p, g0).voigt * e) * std::sqrt(g0.det());
          What += w * 0.5 * e.dot(stiffness(p, gt).voigt * e) * std::sqrt(gt.det());
          pointwise += w * swap_energy_check(p, g0, Eb, {alpha})[0];
        }
    return std::make_pair(std::abs(W - What), pointwise);
  };
  const double alpha = 0.02;
  const auto a = gap(alpha), b = gap(alpha / 2);
  const double ratio = a.first / b.first, pratio = a.second / b.second;
  return {ratio >= 7 && pratio >= 7,
          fmt("|W - W_swapped| = %.4g at a, %.4g at a/2: ratio %.3f (pointwise check ratio %.3f)", a.first, b.first, ratio,
              pratio)};
}

Outcome c11_initializer() {
  const SurfaceDefinition ring = parse_surface("(1-u2)*cos(u1) ; (1-u2)*sin(u1) ; 0 ; [0,pi]x[-0.5,0.5]");
  const StripDomain s(ring, 0, M_PI, 0.2, 0.1);
  const BSplineManifold2D m = seed(s, 16);
  double metric_err = 0, curv_err = 0;
  for (int k = 1; k < 50; ++k) {
    const double u = M_PI * k / 50;
    const ManifoldJet j = evaluate_jet(m, u, s.center());
    const double g0 = metric(ring, u, s.center()).g11;
    metric_err = std::max(metric_err, std::abs(j.p1.squaredNorm() - g0) / g0);
    // Discrete curvature of the center line from three nearby points.
    const double h = 1e-3;
    const Eigen::Vector2d a = evaluate(m, u - h, s.center()), b = evaluate(m, u, s.center()), c = evaluate(m, u + h, s.center());
    const Eigen::Vector2d d1 = (c - a) / (2 * h), d2 = (c - 2 * b + a) / (h * h);
    const double kappa = (d1.x() * d2.y() - d1.y() * d2.x()) / std::pow(d1.norm(), 3);
    const double k0 = geodesic_curvature(s, u);
    curv_err = std::max(curv_err, std::abs(kappa - k0) / std::abs(k0));
  }
  const double R = 1 - s.center();
  const Eigen::Vector2d end(0, 2 * R);
  const double e1 = (solve_center_ode(s, 64).c.back() - end).norm();
  const double e2 = (solve_center_ode(s, 128).c.back() - end).norm();
  return {metric_err < 1e-2 && curv_err < 0.05 && e1 / e2 >= 12,
          fmt("center metric error %.3g, curvature error %.3g, RK4 endpoint error ratio %.2f", metric_err, curv_err, e1 / e2)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome c12_determinism() {
  const std::string cfg = std::string(STRIPWEAVE_CONFIG_DIR) + "/paraboloid.json";
  const fs::path root = fs::temp_directory_path() / ("stripweave_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::ostringstream sink;
  for (const char* run : {"a", "b"}) {
    RunOptions opt;
    opt.out_dir = (root / run).string();
    opt.threads = 1;
    for (const char* cmd : {"plan", "solve", "export"})
      if (run_command(cmd, cfg, opt, sink) != exit_code::ok) return {false, std::string("command failed: ") + cmd};
  }
  int files = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    const std::string ext = e.path().extension().string();
    if (ext != ".svg" && ext != ".json") continue;
    ++files;
    if (slurp(e.path()) != slurp(root / "b" / e.path().filename())) ++differ;
  }
  fs::remove_all(root);
  return {files > 0 && differ == 0, fmt("%.0f SVG/JSON files compared, %.0f differ", files, differ)};
}

Outcome c13_young() {
  const StripDomain s(builtin_surface("paraboloid"), -1, 1, 0.35, 0.05);
  const EmbeddingResult a = solve_embedding(s, ElasticityParams{1.0, 0.25}, RefinementSchedule{});
  const EmbeddingResult b = solve_embedding(s, ElasticityParams{7.0, 0.25}, RefinementSchedule{});
  const double rms = aligned_rms(a.manifold, b.manifold);
  const double rel = std::abs(b.energy / a.energy - 7.0) / 7.0;
  return {rms < 1e-8 && rel < 1e-6, fmt("aligned RMS %.3g, W7/W1 = %.9f (rel dev %.3g)", rms, b.energy / a.energy, rel)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"isometry baseline", c1_isometry},
      {"catenoid and helicoid agree", c2_catenoid_helicoid},
      {"strain profile across the strip", c3_profile},
      {"Poisson coupling", c4_poisson},
      {"uniaxial stress", c5_uniaxial},
      {"energy scaling", c6_energy},
      {"gradient and Hessian consistency", c7_derivatives},
      {"rigid-mode count", c8_rigid_modes},
      {"refinement monotonicity", c9_monotone},
      {"state swap", c10_swap},
      {"initializer quality", c11_initializer},
      {"determinism", c12_determinism},
      {"Young's modulus invariance", c13_young},
  };
  int failed = 0, k = 0;
  for (const auto& [name, fn] : criteria) {
    ++k;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", k, name, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%d criteria passed\n", k - failed, k);
  return failed ? 1 : 0;
}
