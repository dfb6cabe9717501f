#include "stripweave/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include <Eigen/LU>
#include <Eigen/SparseLU>

#include "stripweave/errors.hpp"
#include "stripweave/initial_state.hpp"

namespace stripweave {

PinMode pin_mode_from_string(const std::string& s) {
  if (s == "rigid3") return PinMode::Rigid3;
  if (s == "three_point") return PinMode::ThreePoint;
  if (s == "none") return PinMode::None;
  throw ConfigError("unknown pin mode '" + s + "'");
}

std::string to_string(PinMode m) {
  switch (m) {
    case PinMode::Rigid3: return "rigid3";
    case PinMode::ThreePoint: return "three_point";
    case PinMode::None: return "none";
  }
  return "none";
}

PinConfig make_pins(const BSplineManifold2D& m, PinMode mode) {
  PinConfig pins;
  pins.mode = mode;
  auto pin = [&](int i1, int i2, int axis) {
    const int I = m.index(i1, i2);
    pins.dofs.push_back({I, axis, m.control()(I, axis)});
  };
  if (mode == PinMode::Rigid3) {
    pin(0, 0, 0);
    pin(0, 0, 1);
    // Rotation about the first point moves the far point along perp(d); pin
    // the coordinate that perp(d) actually changes.
    const Eigen::Vector2d d = m.point(m.n1() - 1, 0) - m.point(0, 0);
    pin(m.n1() - 1, 0, std::abs(d.x()) >= std::abs(d.y()) ? 1 : 0);
  } else if (mode == PinMode::ThreePoint) {
    const int i2 = m.n2() / 2;
    for (int i1 : {0, (m.n1() - 1) / 2, m.n1() - 1}) {
      pin(i1, i2, 0);
      pin(i1, i2, 1);
    }
  }
  return pins;
}

SolverState::SolverState(StripDomain strip, ElasticityParams params, BSplineManifold2D manifold, PinMode mode,
                         SolverOptions options)
    : strip_(std::move(strip)), params_(params), manifold_(std::move(manifold)), options_(options) {
  params_.validate();
  rebuild_cache();
  pins_ = make_pins(manifold_, mode);
}

void SolverState::set_control(ControlNet control) { manifold_.set_control(std::move(control)); }

void SolverState::set_manifold(BSplineManifold2D m) {
  const bool same = m.space1() == manifold_.space1() && m.space2() == manifold_.space2();
  manifold_ = std::move(m);
  if (!same) rebuild_cache();
  pins_ = make_pins(manifold_, pins_.mode);
}

void SolverState::set_pin_mode(PinMode mode) { pins_ = make_pins(manifold_, mode); }

void SolverState::rebuild_cache() {
  const BSplineSpace& s1 = manifold_.space1();
  const BSplineSpace& s2 = manifold_.space2();
  const int p1 = s1.degree(), p2 = s2.degree();
  const int nq1 = p1 + options_.quad_extra, nq2 = p2 + options_.quad_extra;
  const SpanQuadrature q1 = span_quadrature(s1, nq1);
  const SpanQuadrature q2 = span_quadrature(s2, nq2);
  const int e1n = static_cast<int>(q1.u.size()) / nq1;
  const int e2n = static_cast<int>(q2.u.size()) / nq2;
  const int nl = (p1 + 1) * (p2 + 1);

  elements_.clear();
  elements_.reserve(static_cast<std::size_t>(e1n) * e2n);
  area_ = 0.0;
  for (int e1 = 0; e1 < e1n; ++e1) {
    for (int e2 = 0; e2 < e2n; ++e2) {
      Element el;
      const int k1 = q1.span[e1 * nq1], k2 = q2.span[e2 * nq2];
      el.first1 = k1 - p1;
      el.first2 = k2 - p2;
      const int nq = nq1 * nq2;
      el.N.resize(nq, nl);
      el.N1.resize(nq, nl);
      el.N2.resize(nq, nl);
      int q = 0;
      for (int a = 0; a < nq1; ++a) {
        const int ia = e1 * nq1 + a;
        const Eigen::MatrixXd d1 = s1.basis_derivatives(k1, q1.u[ia], 1);
        for (int b = 0; b < nq2; ++b, ++q) {
          const int ib = e2 * nq2 + b;
          const Eigen::MatrixXd d2 = s2.basis_derivatives(k2, q2.u[ib], 1);
          const Metric2 g = metric(strip_.surface(), q1.u[ia], q2.u[ib]);
          el.u1.push_back(q1.u[ia]);
          el.u2.push_back(q2.u[ib]);
          el.weight.push_back(q1.w[ia] * q2.w[ib] * std::sqrt(g.det()));
          el.g0.push_back(g);
          el.C.push_back(stiffness(params_, g));
          area_ += el.weight.back();
          for (int a1 = 0; a1 <= p1; ++a1) {
            for (int a2 = 0; a2 <= p2; ++a2) {
              const int l = a1 * (p2 + 1) + a2;
              el.N(q, l) = d1(0, a1) * d2(0, a2);
              el.N1(q, l) = d1(1, a1) * d2(0, a2);
              el.N2(q, l) = d1(0, a1) * d2(1, a2);
            }
          }
        }
      }
      elements_.push_back(std::move(el));
    }
  }
}

std::vector<int> SolverState::free_dofs() const {
  std::vector<char> pinned(num_dofs(), 0);
  for (const PinnedDof& d : pins_.dofs) pinned[2 * d.point + d.axis] = 1;
  std::vector<int> out;
  for (int i = 0; i < num_dofs(); ++i)
    if (!pinned[i]) out.push_back(i);
  return out;
}

double SolverState::reduced_residual_norm(const Eigen::VectorXd& F) const {
  double r = 0.0;
  for (int i : free_dofs()) r = std::max(r, std::abs(F[i]));
  return r;
}

namespace {

// Control indices of the local functions of an element.
std::vector<int> local_points(const BSplineManifold2D& m, const Element& el) {
  const int p1 = m.space1().degree(), p2 = m.space2().degree();
  std::vector<int> idx;
  for (int a1 = 0; a1 <= p1; ++a1)
    for (int a2 = 0; a2 <= p2; ++a2) idx.push_back(m.index(el.first1 + a1, el.first2 + a2));
  return idx;
}

// Elements are split into a fixed number of chunks, independent of the thread
// count, and partial sums are reduced in chunk order. Results are therefore
// bit-identical for any number of threads.
constexpr int kChunks = 16;

int chunk_count(const SolverState& st) {
  return std::max(1, std::min<int>(kChunks, static_cast<int>(st.elements().size())));
}

// Runs fn(begin, end, chunk) for every chunk, spreading chunks over up to `threads` workers.
void for_chunks(int count, int chunks, int threads, const std::function<void(int, int, int)>& fn) {
  auto run = [&](int c) { fn(count * c / chunks, count * (c + 1) / chunks, c); };
  threads = std::max(1, std::min(threads, chunks));
  if (threads == 1) {
    for (int c = 0; c < chunks; ++c) run(c);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int c = next++; c < chunks; c = next++) run(c);
    });
  for (auto& th : pool) th.join();
}

struct PointKinematics {
  Eigen::Vector2d x1;
  Eigen::Vector2d x2;
  Eigen::Vector3d s;  // (S11, S22, S12)
  double density;
};

PointKinematics kinematics(const Element& el, int q, const ControlNet& P, const std::vector<int>& idx) {
  PointKinematics k{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), Eigen::Vector3d::Zero(), 0.0};
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const Eigen::Vector2d pa = P.row(idx[a]).transpose();
    k.x1 += el.N1(q, static_cast<Eigen::Index>(a)) * pa;
    k.x2 += el.N2(q, static_cast<Eigen::Index>(a)) * pa;
  }
  const Metric2& g = el.g0[q];
  const Eigen::Vector3d e(0.5 * (k.x1.dot(k.x1) - g.g11), 0.5 * (k.x2.dot(k.x2) - g.g22),
                          k.x1.dot(k.x2) - g.g12);
  k.s = el.C[q].voigt * e;
  k.density = 0.5 * e.dot(k.s);
  return k;
}

}  // namespace

Eigen::VectorXd assemble_residual(const SolverState& st) {
  const BSplineManifold2D& m = st.manifold();
  const ControlNet& P = m.control();
  const auto& els = st.elements();
  const int chunks = chunk_count(st);
  std::vector<Eigen::VectorXd> parts(chunks, Eigen::VectorXd::Zero(st.num_dofs()));
  for_chunks(static_cast<int>(els.size()), chunks, st.options().threads, [&](int b, int e, int t) {
    Eigen::VectorXd& F = parts[t];
    for (int ei = b; ei < e; ++ei) {
      const Element& el = els[ei];
      const std::vector<int> idx = local_points(m, el);
      for (int q = 0; q < static_cast<int>(el.weight.size()); ++q) {
        const PointKinematics k = kinematics(el, q, P, idx);
        const double w = el.weight[q];
        for (std::size_t a = 0; a < idx.size(); ++a) {
          const double n1 = el.N1(q, static_cast<Eigen::Index>(a)), n2 = el.N2(q, static_cast<Eigen::Index>(a));
          for (int r = 0; r < 2; ++r) {
            F[2 * idx[a] + r] +=
                w * (k.s[0] * n1 * k.x1[r] + k.s[1] * n2 * k.x2[r] + k.s[2] * (n1 * k.x2[r] + n2 * k.x1[r]));
          }
        }
      }
    }
  });
  Eigen::VectorXd F = parts[0];
  for (int t = 1; t < chunks; ++t) F += parts[t];
  return F;
}

Eigen::SparseMatrix<double> assemble_jacobian(const SolverState& st) {
  const BSplineManifold2D& m = st.manifold();
  const ControlNet& P = m.control();
  const auto& els = st.elements();
  const int chunks = chunk_count(st);
  std::vector<std::vector<Eigen::Triplet<double>>> parts(chunks);
  for_chunks(static_cast<int>(els.size()), chunks, st.options().threads, [&](int b, int e, int t) {
    auto& trip = parts[t];
    for (int ei = b; ei < e; ++ei) {
      const Element& el = els[ei];
      const std::vector<int> idx = local_points(m, el);
      const int nl = static_cast<int>(idx.size());
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2 * nl, 2 * nl);
      Eigen::MatrixXd B(3, 2 * nl);
      for (int q = 0; q < static_cast<int>(el.weight.size()); ++q) {
        const PointKinematics k = kinematics(el, q, P, idx);
        const double w = el.weight[q];
        for (int a = 0; a < nl; ++a) {
          const double n1 = el.N1(q, a), n2 = el.N2(q, a);
          for (int r = 0; r < 2; ++r) {
            B(0, 2 * a + r) = n1 * k.x1[r];
            B(1, 2 * a + r) = n2 * k.x2[r];
            B(2, 2 * a + r) = n1 * k.x2[r] + n2 * k.x1[r];
          }
        }
        K.noalias() += w * B.transpose() * el.C[q].voigt * B;
        for (int a = 0; a < nl; ++a) {
          const double n1a = el.N1(q, a), n2a = el.N2(q, a);
          for (int c = 0; c < nl; ++c) {
            const double n1c = el.N1(q, c), n2c = el.N2(q, c);
            const double gab = k.s[0] * n1a * n1c + k.s[1] * n2a * n2c + k.s[2] * (n1a * n2c + n2a * n1c);
            K(2 * a, 2 * c) += w * gab;
            K(2 * a + 1, 2 * c + 1) += w * gab;
          }
        }
      }
      for (int a = 0; a < 2 * nl; ++a)
        for (int c = 0; c < 2 * nl; ++c) trip.emplace_back(2 * idx[a / 2] + a % 2, 2 * idx[c / 2] + c % 2, K(a, c));
    }
  });
  std::vector<Eigen::Triplet<double>> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  Eigen::SparseMatrix<double> J(st.num_dofs(), st.num_dofs());
  J.setFromTriplets(all.begin(), all.end());
  return J;
}

double strain_energy(const SolverState& st) {
  const BSplineManifold2D& m = st.manifold();
  double W = 0.0;
  for (const Element& el : st.elements()) {
    const std::vector<int> idx = local_points(m, el);
    for (int q = 0; q < static_cast<int>(el.weight.size()); ++q)
      W += el.weight[q] * kinematics(el, q, m.control(), idx).density;
  }
  return W;
}

namespace {

Eigen::VectorXd flat(const ControlNet& P) { return Eigen::Map<const Eigen::VectorXd>(P.data(), P.size()); }

ControlNet unflat(const Eigen::VectorXd& v) {
  return Eigen::Map<const ControlNet>(v.data(), v.size() / 2, 2);
}

Eigen::SparseMatrix<double> reduced_jacobian(const SolverState& st, const std::vector<int>& free) {
  const Eigen::SparseMatrix<double> J = assemble_jacobian(st);
  const int n = static_cast<int>(free.size());
  std::vector<int> pos(st.num_dofs(), -1);
  for (int i = 0; i < n; ++i) pos[free[i]] = i;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(J.nonZeros());
  for (int c = 0; c < J.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(J, c); it; ++it)
      if (pos[it.row()] >= 0 && pos[it.col()] >= 0) trip.emplace_back(pos[it.row()], pos[it.col()], it.value());
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

// Solves (K + shift I) x = rhs.
Eigen::VectorXd solve_reduced(const SolverState& st, const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& rhs,
                              double shift) {
  const Eigen::Index n = K.rows();
  const bool dense = n <= st.options().dense_limit || st.pins().mode == PinMode::None;
  if (dense) {
    Eigen::MatrixXd M = Eigen::MatrixXd(K);
    M.diagonal().array() += shift;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    const double rc = lu.rcond();
    if (!(rc > 1e-15)) throw SolverError("degenerate Jacobian (rcond estimate " + std::to_string(rc) + ")");
    return lu.solve(rhs);
  }
  Eigen::SparseMatrix<double> M = K;
  if (shift != 0.0) {
    Eigen::SparseMatrix<double> I(n, n);
    I.setIdentity();
    M += shift * I;
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success) throw SolverError("degenerate Jacobian (sparse LU failed: " + lu.lastErrorMessage() + ")");
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw SolverError("degenerate Jacobian (sparse solve failed)");
  return x;
}

}  // namespace

NewtonRecord newton_step(SolverState& st) {
  // Hold pinned DOFs at their targets.
  Eigen::VectorXd a = flat(st.manifold().control());
  for (const PinnedDof& d : st.pins().dofs) a[2 * d.point + d.axis] = d.value;
  st.set_control(unflat(a));

  const std::vector<int> free = st.free_dofs();
  const Eigen::VectorXd F = assemble_residual(st);
  NewtonRecord rec;
  rec.pins = to_string(st.pins().mode);
  rec.residual = st.reduced_residual_norm(F);
  const double W0 = strain_energy(st);

  Eigen::VectorXd rhs(free.size());
  for (std::size_t i = 0; i < free.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = -F[free[i]];
  const Eigen::SparseMatrix<double> K = reduced_jacobian(st, free);
  Eigen::VectorXd delta = solve_reduced(st, K, rhs, 0.0);
  if (!delta.allFinite()) throw SolverError("non-finite Newton update");

  // Halve while the strain energy goes up; the residual norm is a poor merit
  // function for slender strips.
  const double slack = 1e-15 * st.residual_scale();
  auto line_search = [&](const Eigen::VectorXd& d, int max_halvings, double& t) {
    t = 1.0;
    for (int h = 0;; ++h) {
      Eigen::VectorXd trial = a;
      for (std::size_t i = 0; i < free.size(); ++i) trial[free[i]] += t * d[static_cast<Eigen::Index>(i)];
      st.set_control(unflat(trial));
      rec.halvings = h;
      if (strain_energy(st) <= W0 + slack) return true;
      if (h >= max_halvings) return false;
      t *= 0.5;
    }
  };
  double t = 1.0;
  if (rhs.squaredNorm() > 0.0 && !line_search(delta, st.options().max_halvings, t)) {
    // Away from the minimum the Hessian can be indefinite and the Newton
    // direction uphill. Shift the spectrum until a step lowers W.
    const double dmax = K.diagonal().cwiseAbs().maxCoeff();
    bool found = false;
    for (double mu = 1e-6 * dmax; mu <= 1e6 * dmax && !found; mu *= 10.0) {
      delta = solve_reduced(st, K, rhs, mu);
      found = delta.allFinite() && line_search(delta, 4, t);
    }
    if (!found) {
      st.set_control(unflat(a));
      t = 0.0;
    }
  }
  rec.step_norm = t * delta.norm();
  rec.energy = strain_energy(st);
  rec.delta_energy = rec.energy - W0;
  st.history.push_back(rec);
  return rec;
}

bool converge(SolverState& st) {
  const double scale = st.residual_scale();
  for (int it = 0; it < st.options().max_iter; ++it) {
    const double r = st.reduced_residual_norm(assemble_residual(st));
    if (st.pins().mode == PinMode::ThreePoint) {
      if (r < st.options().release_rel * scale) {
        st.set_pin_mode(PinMode::Rigid3);
        --it;
        continue;
      }
    } else if (r < st.options().tol_rel * scale) {
      return true;
    }
    newton_step(st);
  }
  if (st.pins().mode == PinMode::ThreePoint) return false;
  return st.reduced_residual_norm(assemble_residual(st)) < st.options().tol_rel * scale;
}

nlohmann::json to_json(const std::vector<StageReport>& stages) {
  nlohmann::json root = nullptr;
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
    nlohmann::json node;
    node["stage"] = it->name;
    node["degrees"] = {it->degree1, it->degree2};
    node["spans1"] = it->spans1;
    node["dofs"] = it->dofs;
    node["iterations"] = it->iterations;
    node["converged"] = it->converged;
    node["energy"] = it->energy;
    node["delta_energy"] = it->delta_energy;
    node["refine_change"] = it->refine_change;
    node["residuals"] = it->residuals;
    node["children"] = root.is_null() ? nlohmann::json::array() : nlohmann::json::array({root});
    root = std::move(node);
  }
  return root;
}

namespace {

double geometry_change(const BSplineManifold2D& a, const BSplineManifold2D& b) {
  double worst = 0.0;
  const int n = 41, m = 5;
  for (int i = 0; i < n; ++i) {
    const double u1 = a.space1().lower() + (a.space1().upper() - a.space1().lower()) * i / (n - 1);
    for (int j = 0; j < m; ++j) {
      const double u2 = a.space2().lower() + (a.space2().upper() - a.space2().lower()) * j / (m - 1);
      worst = std::max(worst, (evaluate(a, u1, u2) - evaluate(b, u1, u2)).norm());
    }
  }
  return worst;
}

}  // namespace

EmbeddingResult solve_embedding(const StripDomain& strip, const ElasticityParams& params,
                                const RefinementSchedule& schedule, const SolverOptions& options,
                                const std::optional<BSplineManifold2D>& seed) {
  std::vector<StageReport> stages;
  std::optional<SolverState> st;

  auto run_stage = [&](const std::string& name, double change) {
    const std::size_t before = st->history.size();
    const bool ok = converge(*st);
    StageReport rep;
    rep.name = name;
    rep.degree1 = st->manifold().space1().degree();
    rep.degree2 = st->manifold().space2().degree();
    rep.spans1 = st->manifold().space1().num_spans();
    rep.dofs = st->num_dofs();
    rep.iterations = static_cast<int>(st->history.size() - before);
    rep.converged = ok;
    rep.energy = strain_energy(*st);
    rep.delta_energy = stages.empty() ? rep.energy : rep.energy - stages.back().energy;
    rep.refine_change = change;
    for (std::size_t i = before; i < st->history.size(); ++i) rep.residuals.push_back(st->history[i].residual);
    rep.residuals.push_back(st->reduced_residual_norm(assemble_residual(*st)));
    stages.push_back(rep);
    if (!ok) {
      throw SolverError("strip " + std::to_string(strip.index()) + ": no convergence in stage '" + name + "' after " +
                        std::to_string(rep.iterations) + " iterations (residual " +
                        std::to_string(rep.residuals.back()) + ")");
    }
  };
  auto refine_to = [&](const std::string& name, BSplineManifold2D next) {
    const double change = geometry_change(st->manifold(), next);
    st->set_manifold(std::move(next));
    run_stage(name, change);
  };

  if (seed) {
    st.emplace(strip, params, *seed, PinMode::Rigid3, options);
    run_stage("resume", 0.0);
  } else {
    const CenterCurveSample center = solve_center_ode(strip, schedule.ode_steps);
    const InitialSurface surf = build_initial_surface(strip, center);
    st.emplace(strip, params, fit_initial_manifold(strip, surf, schedule.initial_spans), schedule.first_pins, options);
    run_stage("seed", 0.0);
    if (schedule.p_refine) {
      const BSplineManifold2D& m = st->manifold();
      refine_to("p-refine", p_refine(m, std::max(0, 3 - m.space1().degree()), std::max(0, 3 - m.space2().degree())));
    }
    for (int k = 0; k < schedule.bisections; ++k) {
      if (2 * st->manifold().space1().num_spans() > schedule.max_spans) break;
      const BSplineManifold2D& m = st->manifold();
      refine_to("bisect", h_refine(m, span_midpoints(m.space1()), {}));
    }
    for (int k = 0; k < schedule.naturalness_rounds; ++k) {
      std::vector<double> knots = unnatural_spans(strip, params, st->manifold(), schedule.naturalness_tol);
      const int room = schedule.max_spans - st->manifold().space1().num_spans();
      if (knots.empty() || room <= 0) break;
      if (static_cast<int>(knots.size()) > room) knots.resize(room);
      refine_to("natural", h_refine(st->manifold(), knots, {}));
    }
  }
  EmbeddingResult res{st->manifold(), strain_energy(*st), stages.back().converged, std::move(stages)};
  return res;
}

StrainSample strain_sample(const StripDomain& strip, const ElasticityParams& params, const BSplineManifold2D& m,
                       double u1, double u2) {
  const ManifoldJet jet = evaluate_jet(m, u1, u2);
  const Metric2 g = metric(strip.surface(), u1, u2);
  const StrainState s = strain_state(params, g, jet.p1, jet.p2);
  StrainSample out;
  out.u1 = u1;
  out.u2 = u2;
  out.r = (u2 - strip.center()) / strip.half_breadth();
  out.x = jet.p;
  out.E = s.E;
  out.E0 = s.E0;
  out.S0 = s.S0;
  out.density = s.density;
  return out;
}

double strip_area(const StripDomain& strip, int spans) {
  const SpanQuadrature q1 = span_quadrature(BSplineSpace::uniform(1, strip.u1a(), strip.u1b(), spans), 6);
  const SpanQuadrature q2 = span_quadrature(BSplineSpace::uniform(1, strip.u2_min(), strip.u2_max(), 4), 6);
  double a = 0.0;
  for (std::size_t i = 0; i < q1.u.size(); ++i)
    for (std::size_t j = 0; j < q2.u.size(); ++j)
      a += q1.w[i] * q2.w[j] * std::sqrt(metric(strip.surface(), q1.u[i], q2.u[j]).det());
  return a;
}

StrainField strain_field(const StripDomain& strip, const ElasticityParams& params, const BSplineManifold2D& m, int n,
                         int mcount) {
  if (n < 2 || mcount < 2) throw Error("strain field grid needs at least 2 x 2 samples");
  StrainField f;
  f.n = n;
  f.m = mcount;
  f.samples.reserve(static_cast<std::size_t>(n) * mcount);
  for (int i = 0; i < n; ++i) {
    const double u1 = i + 1 == n ? strip.u1b() : strip.u1a() + (strip.u1b() - strip.u1a()) * i / (n - 1);
    for (int j = 0; j < mcount; ++j) {
      const double u2 = j + 1 == mcount ? strip.u2_max() : strip.u2_min() + (strip.u2_max() - strip.u2_min()) * j / (mcount - 1);
      f.samples.push_back(strain_sample(strip, params, m, u1, u2));
    }
  }
  return f;
}

std::vector<double> unnatural_spans(const StripDomain& strip, const ElasticityParams& params,
                                    const BSplineManifold2D& m, double tol) {
  const std::vector<double> mids = span_midpoints(m.space1());
  const int S = static_cast<int>(mids.size());
  const int rows = 5;
  Eigen::MatrixXd E(S, rows);
  for (int e = 0; e < S; ++e) {
    for (int j = 0; j < rows; ++j) {
      const double u2 = strip.u2_min() + (strip.u2_max() - strip.u2_min()) * j / (rows - 1);
      E(e, j) = strain_sample(strip, params, m, mids[e], u2).E0(0, 0);
    }
  }
  const double emax = E.cwiseAbs().maxCoeff();
  std::vector<char> bad(S, 0);
  if (emax > 0.0) {
    for (int e = 0; e + 1 < S; ++e) {
      if ((E.row(e) - E.row(e + 1)).cwiseAbs().maxCoeff() > tol * emax) bad[e] = bad[e + 1] = 1;
    }
  }
  std::vector<double> out;
  for (int e = 0; e < S; ++e)
    if (bad[e]) out.push_back(mids[e]);
  return out;
}

}  // namespace stripweave
