#include "normlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/numeric/odeint.hpp>

#include "normlab/expr_eval.hpp"
#include "normlab/parallel.hpp"

namespace nlab {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

std::vector<double> flatten(const Matrix& m) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

void check_gauge_symmetry(const SystemDef& s, const std::vector<Expression>& T) {
  const int n = s.n;
  if (T.size() != sz(n * n * n)) throw DimensionError("gauge tensor needs n^3 components");
  const std::vector<PhasePoint> probes = {
      PhasePoint(std::vector<double>(sz(n), 0.3), std::vector<double>(sz(n), 0.7),
                 Representation::V),
      PhasePoint(std::vector<double>(sz(n), -0.6), std::vector<double>(sz(n), 1.3),
                 Representation::V)};
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Expression& a = T[s.gamma_index(k, i, j)];
        const Expression& b = T[s.gamma_index(k, j, i)];
        if (a == b) continue;
        for (PhasePoint pt : probes) {
          for (int m = 0; m < n; ++m) {
            pt.x[sz(m)] += 0.1 * m;
            pt.fiber[sz(m)] += 0.05 * m;
          }
          const double va = eval_scalar(a, pt);
          const double vb = eval_scalar(b, pt);
          if (std::fabs(va - vb) > 1e-12 * std::max(1.0, std::fabs(va)))
            throw AsymmetricGauge("gauge tensor not symmetric");
        }
      }
}

}  // namespace

SystemDef apply_gauge(const SystemDef& s, const std::vector<Expression>& T) {
  check_gauge_symmetry(s, T);
  SystemDef out = s;
  for (std::size_t a = 0; a < T.size(); ++a) {
    if (T[a].is_zero_literal()) continue;
    out.Gamma[a] = out.Gamma[a].is_zero_literal() ? T[a] : out.Gamma[a] + T[a];
  }
  return out;
}

SystemDef apply_gauge(const SystemDef& s) {
  if (!s.T) throw MissingGaugeTensor("system has no gauge tensor");
  return apply_gauge(s, *s.T);
}

SystemDef connection_free_mode(const SystemDef& s) {
  SystemDef out = s;
  out.Gamma.assign(out.Gamma.size(), Expression());
  return out;
}

const char* gauge_kind_name(GaugeKind kind) noexcept {
  switch (kind) {
    case GaugeKind::Invariant: return "invariant";
    case GaugeKind::Rule: return "rule";
    case GaugeKind::Residual: return "residual";
  }
  return "?";
}

std::vector<GaugeEntry> residual_invariance(const NormalityBundle& before,
                                           const NormalityBundle& after,
                                           double residual_tolerance) {
  std::vector<GaugeEntry> out;
  if (before.n < 2) return out;
  const std::vector<Residual> r0 = normality_residuals(before, residual_tolerance);
  const std::vector<Residual> r1 = normality_residuals(after, residual_tolerance);
  auto holds = [&](ResidualId id) { return r0[static_cast<std::size_t>(id)].pass; };
  for (std::size_t i = 0; i < r0.size(); ++i) {
    bool decisive = true;
    switch (r0[i].id) {
      case ResidualId::WeakEta: decisive = holds(ResidualId::WeakAlpha); break;
      case ResidualId::AddlB: decisive = holds(ResidualId::AddlA); break;
      case ResidualId::AddlC:
        decisive = holds(ResidualId::AddlA) && holds(ResidualId::AddlB);
        break;
      default: break;
    }
    out.push_back({residual_name(r0[i].id), GaugeKind::Residual,
                   std::fabs(r1[i].norm - r0[i].norm), decisive});
  }
  return out;
}

GaugePointReport gauge_point(const SystemDef& s, const SystemDef& gauged,
                             const PhasePoint& v_point, double residual_tolerance) {
  if (!s.T) throw MissingGaugeTensor("system has no gauge tensor");
  const int n = s.n;
  const std::size_t N = sz(n);
  const VRepFields a = vrep_fields(s, v_point);
  const VRepFields b = vrep_fields(gauged, v_point);
  const NormalityBundle& A0 = a.bundle;
  const NormalityBundle& A1 = b.bundle;
  const std::vector<double>& v = v_point.fiber;
  const std::vector<double>& L = a.L;
  const std::vector<double>& Lup = a.L_up;
  const Matrix& P = A0.P;

  const VPrimitives prim = evaluate_primitives(s, v_point, true);
  const FieldValue<Jet2> Tf(n, 1, 2, Representation::V, v_point, prim.T);
  const FieldValue<double> nT = values_of(horizontal_derivative(Tf, connection_v(prim)));
  auto T = [&](int k, int i, int j) { return prim.gauge(k, i, j).value; };
  auto dT = [&](int k, int i, int j, int m) {  // ∂T^k_ij/∂v^m
    return prim.gauge(k, i, j).gradient[N + sz(m)];
  };

  GaugePointReport report;
  report.point = v_point;
  auto add = [&](std::string name, GaugeKind kind, double dev, bool decisive = true) {
    report.entries.push_back({std::move(name), kind, dev, decisive});
  };

  auto concat = [](std::vector<double> x, const std::vector<double>& y) {
    x.insert(x.end(), y.begin(), y.end());
    return x;
  };
  add("g", GaugeKind::Invariant,
      relative_deviation(concat(flatten(b.g_lower), flatten(b.g_upper)),
                         concat(flatten(a.g_lower), flatten(a.g_upper))));
  add("L", GaugeKind::Invariant, relative_deviation(b.L, a.L));
  add("L-up", GaugeKind::Invariant, relative_deviation(b.L_up, a.L_up));
  add("Omega", GaugeKind::Invariant, relative_deviation({A1.Omega}, {A0.Omega}));
  add("P", GaugeKind::Invariant, relative_deviation(flatten(A1.P), flatten(P)));
  add("A", GaugeKind::Invariant, relative_deviation(flatten(A1.A), flatten(A0.A)));
  add("alpha", GaugeKind::Invariant, relative_deviation(A1.alpha, A0.alpha));

  std::vector<double> U = A0.U;
  for (int i = 0; i < n; ++i)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r) U[sz(i)] += Lup[sz(q)] * T(r, i, q) * L[sz(r)];
  add("rule-U", GaugeKind::Rule, relative_deviation(A1.U, U));

  Tensor D = a.D;
  for (int k = 0; k < n; ++k)
    for (int r = 0; r < n; ++r)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) D(k, r, i, j) -= dT(k, i, r, j);
  add("rule-D", GaugeKind::Rule, relative_deviation(b.D.data(), D.data()));

  Tensor R = a.R;
  for (int k = 0; k < n; ++k)
    for (int r = 0; r < n; ++r)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double acc = nT(k, j, r, i) - nT(k, i, r, j);
          for (int m = 0; m < n; ++m) {
            acc += T(k, i, m) * T(m, j, r) - T(k, j, m) * T(m, i, r);
            for (int c = 0; c < n; ++c) {
              acc -= v[sz(m)] * T(c, j, m) * a.D(k, i, r, c);
              acc += v[sz(m)] * T(c, i, m) * a.D(k, j, r, c);
              acc += v[sz(m)] * T(c, j, m) * dT(k, i, r, c);
              acc -= v[sz(m)] * T(c, i, m) * dT(k, j, r, c);
            }
          }
          R(k, r, i, j) += acc;
        }
  add("rule-R", GaugeKind::Rule, relative_deviation(b.R.data(), R.data()));

  Matrix B = A0.B;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      for (int m = 0; m < n; ++m)
        for (int q = 0; q < n; ++q)
          for (int k = 0; k < n; ++k)
            B(r, c) += L[sz(m)] * T(m, c, q) * P(q, k) * (A0.A(r, k) - A0.A(k, r));
  add("rule-B", GaugeKind::Rule, relative_deviation(flatten(A1.B), flatten(B)));

  // Only the part of the C rule antisymmetric in (r, s) is determined.
  Matrix X = Matrix::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      for (int q = 0; q < n; ++q)
        for (int e = 0; e < n; ++e) {
          const double TL = T(e, r, q) * L[sz(e)];
          for (int m = 0; m < n; ++m) {
            X(r, c) += TL * P(q, m) * A0.B(m, c);
            for (int k = 0; k < n; ++k)
              for (int d = 0; d < n; ++d)
                for (int f = 0; f < n; ++f)
                  X(r, c) += TL * P(q, m) * A0.A(m, k) * P(d, k) * T(f, c, d) * L[sz(f)];
          }
        }
  const Matrix Y = A1.C - A0.C - X;
  const double c_scale = std::max(1.0, A1.C.cwiseAbs().maxCoeff());
  add("rule-C", GaugeKind::Rule, (Y - Y.transpose()).cwiseAbs().maxCoeff() / c_scale);

  std::vector<double> beta = A0.beta;
  std::vector<double> eta = A0.eta;
  for (int k = 0; k < n; ++k)
    for (int q = 0; q < n; ++q)
      for (int e = 0; e < n; ++e) {
        const double TL = T(e, k, q) * L[sz(e)];
        beta[sz(k)] += TL * A0.alpha[sz(q)];
        for (int c = 0; c < n; ++c) eta[sz(k)] += TL * P(q, c) * A0.alpha[sz(c)];
      }
  add("rule-beta", GaugeKind::Rule, relative_deviation(A1.beta, beta));
  add("rule-eta", GaugeKind::Rule, relative_deviation(A1.eta, eta));

  for (GaugeEntry& e : residual_invariance(A0, A1, residual_tolerance))
    report.entries.push_back(std::move(e));
  return report;
}

GaugeReport gauge_invariance_report(const SystemDef& s, const std::vector<PhasePoint>& points,
                                    double residual_tolerance) {
  const SystemDef gauged = apply_gauge(s);
  GaugeReport report;
  report.points.resize(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    report.points[i] = gauge_point(s, gauged, points[i], residual_tolerance);
  });
  std::map<std::string, std::size_t> slot;
  for (const GaugePointReport& p : report.points)
    for (const GaugeEntry& e : p.entries) {
      auto [it, fresh] = slot.try_emplace(e.quantity, report.worst.size());
      if (fresh) report.worst.push_back({e.quantity, e.kind, 0.0, true});
      if (e.decisive)
        report.worst[it->second].deviation =
            std::max(report.worst[it->second].deviation, e.deviation);
    }
  return report;
}

std::vector<double> hypersurface_normal(const ShiftRun& run, const std::vector<double>& u) {
  const int n = static_cast<int>(run.surface.size());
  const int k = n - 1;
  if (k < 1) throw DimensionError("hypersurface needs n >= 2");
  if (static_cast<int>(u.size()) != k) throw DimensionError("wrong number of surface parameters");
  Matrix tangents(n, k);
  for (int i = 0; i < n; ++i) {
    const Jet2 xi = evaluate<Jet2>(
        run.surface[sz(i)].root(),
        [&](VarKind, int index) { return Jet2::variable(sz(k), sz(index), u[sz(index)]); },
        [&](double c) { return Jet2::constant(sz(k), c); });
    for (int j = 0; j < k; ++j) tangents(i, j) = xi.gradient[sz(j)];
  }
  const Eigen::JacobiSVD<Matrix> svd(tangents);
  if (svd.singularValues().minCoeff() < 1e-10)
    throw DegenerateSurface("surface tangents are linearly dependent");

  std::vector<double> normal(sz(n));
  Matrix M(n, n);
  M.leftCols(k) = tangents;
  double norm2 = 0.0;
  for (int i = 0; i < n; ++i) {
    M.col(k).setZero();
    M(i, k) = 1.0;
    normal[sz(i)] = M.determinant();
    norm2 += normal[sz(i)] * normal[sz(i)];
  }
  const double norm = std::sqrt(norm2);
  for (double& c : normal) c /= norm;
  return normal;
}

namespace {

using State = std::vector<double>;

struct ShiftRhs {
  const SystemDef* s;
  void operator()(const State& y, State& dy, double) const {
    const int n = s->n;
    const PhasePoint p_point(std::vector<double>(y.begin(), y.begin() + n),
                             std::vector<double>(y.begin() + n, y.end()), Representation::P);
    const InverseResult inv = legendre_inverse(*s, p_point);
    double omega = 0.0;
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i)
        omega += p_point.fiber[sz(a)] * inv.g_upper(a, i) * p_point.fiber[sz(i)];
    if (std::fabs(omega) < omega_threshold(p_point.fiber))
      throw DegeneratePoint("degenerate point along a trajectory");
    const std::vector<double> theta = theta_from_phi(*s, inv.v_point);
    for (int i = 0; i < n; ++i) {
      dy[sz(i)] = inv.v_point.fiber[sz(i)];
      dy[sz(n + i)] = theta[sz(i)];
    }
  }
};

std::vector<State> integrate_one(const SystemDef& s, const ShiftRun& run, State y0,
                                 const std::vector<double>& times) {
  namespace odeint = boost::numeric::odeint;
  std::vector<State> out;
  auto stepper =
      odeint::make_dense_output(run.atol, run.rtol, odeint::runge_kutta_dopri5<State>());
  const double dt0 = std::max(1e-6, (times.back() - times.front()) / 1000.0);
  try {
    odeint::integrate_times(stepper, ShiftRhs{&s}, y0, times.begin(), times.end(), dt0,
                            [&](const State& y, double) { out.push_back(y); });
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw IntegrationFailure(std::string("integration failed: ") + e.what());
  }
  if (out.size() != times.size()) throw IntegrationFailure("integration stopped early");
  return out;
}

}  // namespace

ShiftTrace shift_integrate(const SystemDef& s, const ShiftRun& run) {
  const int n = s.n;
  const int k = n - 1;
  if (static_cast<int>(run.surface.size()) != n)
    throw DimensionError("surface needs one component per coordinate");
  if (k < 1) throw DimensionError("normal shift needs n >= 2");
  if (static_cast<int>(run.u_min.size()) != k || static_cast<int>(run.u_max.size()) != k)
    throw DimensionError("surface parameter ranges do not match n - 1");
  if (run.samples < 1 || run.steps < 1 || !(run.t_end > 0.0))
    throw InvalidArgument("shift run needs samples >= 1, steps >= 1 and t_end > 0");

  ShiftTrace trace;
  for (int i = 0; i <= run.steps; ++i) trace.times.push_back(run.t_end * i / run.steps);

  std::vector<double> h(sz(k));
  for (int d = 0; d < k; ++d)
    h[sz(d)] = 1e-5 * std::min(1.0, std::fabs(run.u_max[sz(d)] - run.u_min[sz(d)]));

  std::size_t grid = 1;
  for (int d = 0; d < k; ++d) grid *= sz(run.samples);
  const std::size_t stencil = 1 + 2 * sz(k);

  std::vector<std::vector<double>> base(grid);
  for (std::size_t g = 0; g < grid; ++g) {
    std::size_t rest = g;
    std::vector<double> u(sz(k));
    for (int d = k - 1; d >= 0; --d) {
      const std::size_t j = rest % sz(run.samples);
      rest /= sz(run.samples);
      u[sz(d)] = run.u_min[sz(d)] +
                 (static_cast<double>(j) + 0.5) * (run.u_max[sz(d)] - run.u_min[sz(d)]) /
                     run.samples;
    }
    base[g] = u;
  }

  std::vector<std::vector<State>> paths(grid * stencil);
  parallel_for(grid * stencil, [&](std::size_t idx) {
    const std::size_t g = idx / stencil;
    const std::size_t slot = idx % stencil;
    std::vector<double> u = base[g];
    if (slot > 0) {
      const std::size_t d = (slot - 1) / 2;
      u[d] += (slot % 2 == 1 ? 1.0 : -1.0) * h[d];
    }
    State y0(2 * sz(n));
    const double nu = eval_parametric(run.nu, u);
    if (nu == 0.0) throw InvalidArgument("nu vanishes on the surface patch");
    const std::vector<double> normal = hypersurface_normal(run, u);
    for (int i = 0; i < n; ++i) {
      y0[sz(i)] = eval_parametric(run.surface[sz(i)], u);
      y0[sz(n + i)] = nu * normal[sz(i)];
    }
    paths[idx] = integrate_one(s, run, y0, trace.times);
  });

  trace.deviation.assign(trace.times.size(), 0.0);
  for (std::size_t t = 0; t < trace.times.size(); ++t) {
    double worst = 0.0;
    for (std::size_t g = 0; g < grid; ++g) {
      const State& c = paths[g * stencil][t];
      double pn = 0.0;
      for (int i = 0; i < n; ++i) pn += c[sz(n + i)] * c[sz(n + i)];
      pn = std::sqrt(pn);
      for (int d = 0; d < k; ++d) {
        const State& plus = paths[g * stencil + 1 + 2 * sz(d)][t];
        const State& minus = paths[g * stencil + 2 + 2 * sz(d)][t];
        double dot = 0.0, tn = 0.0;
        for (int i = 0; i < n; ++i) {
          const double tau = (plus[sz(i)] - minus[sz(i)]) / (2.0 * h[sz(d)]);
          dot += c[sz(n + i)] * tau;
          tn += tau * tau;
        }
        const double denom = pn * std::sqrt(tn);
        if (denom == 0.0) throw DegenerateSurface("moved surface lost a tangent direction");
        worst = std::max(worst, std::min(1.0, std::fabs(dot) / denom));
      }
    }
    trace.deviation[t] = worst;
  }
  return trace;
}

}  // namespace nlab
