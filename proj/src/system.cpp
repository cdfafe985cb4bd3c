#include "normlab/system.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "normlab/tensor.hpp"

namespace nlab {

namespace {

using DualJet = BasicJet2<Dual>;

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

void require_rep(const PhasePoint& pt, Representation rep, const char* what) {
  if (pt.rep != rep)
    throw InvalidArgument(std::string(what) + " expects a point in " +
                          representation_name(rep) + "-representation");
}

Jet2 jet_or_zero(const Expression& e, const PhasePoint& pt) {
  if (e.is_zero_literal()) return Jet2(2 * pt.x.size());
  return eval_jet(e, pt);
}

// ∂Lag/∂v^i with its gradient and Hessian: the Lagrangian is evaluated on
// jets whose coefficients carry a tangent along v^i.
Jet2 lagrangian_component(const Expression& lag, const PhasePoint& pt, int i) {
  const std::size_t n = pt.x.size();
  const std::size_t vars = 2 * n;
  const std::size_t seed = n + sz(i);
  DualJet r = evaluate<DualJet>(
      lag.root(),
      [&](VarKind kind, int index) {
        const std::size_t a = kind == VarKind::X ? sz(index) : n + sz(index);
        const double value = kind == VarKind::X ? pt.x[sz(index)] : pt.fiber[sz(index)];
        return DualJet::variable(vars, a, Dual(value, a == seed ? 1.0 : 0.0));
      },
      [&](double c) { return DualJet::constant(vars, Dual(c)); });
  Jet2 out(vars, r.value.d);
  for (std::size_t a = 0; a < vars; ++a) out.gradient[a] = r.gradient[a].d;
  for (std::size_t a = 0; a < vars * vars; ++a) out.hessian[a] = r.hessian[a].d;
  return out;
}

Matrix fiber_jacobian(const std::vector<Jet2>& L, int n) {
  Matrix g(n, n);
  for (int q = 0; q < n; ++q)
    for (int k = 0; k < n; ++k) g(q, k) = L[sz(q)].gradient[sz(n + k)];
  return g;
}

double inf_norm(const std::vector<double>& v) { return max_abs(v); }

}  // namespace

LegendreMap LegendreMap::from_expressions(std::vector<Expression> components) {
  LegendreMap m;
  m.n_ = static_cast<int>(components.size());
  for (const Expression& e : components)
    if (e.fiber_rep() == Representation::P)
      throw MixedRepresentationError("Legendre components must be functions of (x, v)");
  m.components_ = std::move(components);
  return m;
}

LegendreMap LegendreMap::from_lagrangian(Expression lagrangian, int n) {
  if (lagrangian.fiber_rep() == Representation::P)
    throw MixedRepresentationError("Lagrangian must be a function of (x, v)");
  if (lagrangian.dimension() > n)
    throw DimensionError("Lagrangian dimension exceeds system dimension");
  LegendreMap m;
  m.n_ = n;
  m.lagrangian_ = std::move(lagrangian);
  return m;
}

LegendreMap lagrangian_to_legendre(const Expression& lagrangian, int n) {
  return LegendreMap::from_lagrangian(lagrangian, n);
}

std::vector<Jet2> LegendreMap::jets(const PhasePoint& v_point) const {
  std::vector<Jet2> out;
  out.reserve(sz(n_));
  for (int i = 0; i < n_; ++i) {
    if (lagrangian_)
      out.push_back(lagrangian_component(*lagrangian_, v_point, i));
    else
      out.push_back(jet_or_zero(components_[sz(i)], v_point));
  }
  return out;
}

std::vector<double> LegendreMap::values(const PhasePoint& v_point) const {
  std::vector<double> out;
  if (lagrangian_) {
    for (const Jet2& j : jets(v_point)) out.push_back(j.value);
    return out;
  }
  for (const Expression& e : components_) out.push_back(eval_scalar(e, v_point));
  return out;
}

SystemDef make_flat_system(int n) {
  SystemDef s;
  s.n = n;
  s.name = "flat";
  std::vector<Expression> L;
  for (int i = 1; i <= n; ++i) L.push_back(parse("v" + std::to_string(i), n));
  s.L = LegendreMap::from_expressions(std::move(L));
  s.Phi.assign(sz(n), Expression());
  s.Gamma.assign(sz(n * n * n), Expression());
  return s;
}

VPrimitives evaluate_primitives(const SystemDef& s, const PhasePoint& v_point,
                                bool with_gauge) {
  require_rep(v_point, Representation::V, "evaluate_primitives");
  VPrimitives prim;
  prim.n = s.n;
  prim.point = v_point;
  prim.L = s.L.jets(v_point);
  for (const Expression& e : s.Phi) prim.Phi.push_back(jet_or_zero(e, v_point));
  prim.Gamma.reserve(s.Gamma.size());
  for (const Expression& e : s.Gamma) prim.Gamma.push_back(jet_or_zero(e, v_point));
  if (with_gauge) {
    if (!s.T) throw MissingGaugeTensor("system has no gauge tensor");
    for (const Expression& e : *s.T) prim.T.push_back(jet_or_zero(e, v_point));
  }
  return prim;
}

PhasePoint legendre_forward(const SystemDef& s, const PhasePoint& v_point) {
  require_rep(v_point, Representation::V, "legendre_forward");
  return PhasePoint(v_point.x, s.L.values(v_point), Representation::P);
}

namespace {

// Fills dy_dz, V and y from the first and second derivatives of L at the
// solved point (implicit differentiation of L(x, V(x, p)) = p).
void implicit_jets(InverseResult& r, int n) {
  const std::size_t N = sz(n);
  const std::size_t vars = 2 * N;
  const Matrix G = fiber_jacobian(r.L, n);
  r.g_lower = G;
  r.g_upper = invert_checked(G);
  const Matrix& Gi = r.g_upper;

  Matrix Lx(n, n);
  for (int q = 0; q < n; ++q)
    for (int s = 0; s < n; ++s) Lx(q, s) = r.L[sz(q)].gradient[sz(s)];
  const Matrix dVdx = -Gi * Lx;

  r.dy_dz.assign(vars, std::vector<double>(vars, 0.0));
  for (std::size_t a = 0; a < N; ++a) r.dy_dz[a][a] = 1.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      r.dy_dz[N + sz(a)][sz(b)] = dVdx(a, b);
      r.dy_dz[N + sz(a)][N + sz(b)] = Gi(a, b);
    }

  r.V.assign(N, Jet2(vars));
  for (std::size_t a = 0; a < N; ++a) {
    r.V[a].value = r.v_point.fiber[a];
    r.V[a].gradient = r.dy_dz[N + a];
  }
  VectorX rhs(n);
  for (std::size_t b = 0; b < vars; ++b) {
    for (std::size_t c = b; c < vars; ++c) {
      for (int d = 0; d < n; ++d) {
        const Jet2& Ld = r.L[sz(d)];
        double acc = 0.0;
        for (std::size_t e = 0; e < vars; ++e) {
          const double pe = r.dy_dz[e][b];
          if (pe == 0.0) continue;
          for (std::size_t f = 0; f < vars; ++f)
            acc += Ld.hess(e, f) * pe * r.dy_dz[f][c];
        }
        rhs(d) = acc;
      }
      const VectorX second = -Gi * rhs;
      for (std::size_t a = 0; a < N; ++a) {
        r.V[a].hess(b, c) = second(static_cast<Eigen::Index>(a));
        r.V[a].hess(c, b) = second(static_cast<Eigen::Index>(a));
      }
    }
  }
  r.y.clear();
  for (std::size_t a = 0; a < N; ++a)
    r.y.push_back(Jet2::variable(vars, a, r.v_point.x[a]));
  for (std::size_t a = 0; a < N; ++a) r.y.push_back(r.V[a]);
}

}  // namespace

InverseResult legendre_inverse_newton(const SystemDef& s, const PhasePoint& p_point,
                                      const NewtonOptions& options) {
  require_rep(p_point, Representation::P, "legendre_inverse");
  const int n = s.n;
  const std::vector<double>& p = p_point.fiber;
  const double tol = options.tolerance * std::max(1.0, inf_norm(p));

  std::vector<double> v = p;
  if (s.V_guess) {
    for (int i = 0; i < n; ++i) v[sz(i)] = eval_scalar((*s.V_guess)[sz(i)], p_point);
  }

  auto residual_at = [&](const std::vector<double>& vv, std::vector<Jet2>* jets) {
    PhasePoint vp(p_point.x, vv, Representation::V);
    std::vector<double> r(sz(n));
    if (jets) {
      *jets = s.L.jets(vp);
      for (int i = 0; i < n; ++i) r[sz(i)] = (*jets)[sz(i)].value - p[sz(i)];
    } else {
      const std::vector<double> Lv = s.L.values(vp);
      for (int i = 0; i < n; ++i) r[sz(i)] = Lv[sz(i)] - p[sz(i)];
    }
    return r;
  };

  InverseResult result;
  result.newton = true;
  std::vector<Jet2> jets;
  std::vector<double> r = residual_at(v, &jets);
  double rnorm = inf_norm(r);
  int it = 0;
  while (rnorm > tol) {
    if (it >= options.max_iterations) {
      std::ostringstream msg;
      msg << "Newton iteration for the inverse Legendre map did not converge"
          << " (residual " << rnorm << " after " << it << " iterations)";
      throw NonConvergence(msg.str());
    }
    const Matrix G = fiber_jacobian(jets, n);
    const Matrix Gi = invert_checked(G);
    VectorX rv(n);
    for (int i = 0; i < n; ++i) rv(i) = r[sz(i)];
    const VectorX step = Gi * rv;
    double t = 1.0;
    std::vector<double> trial(sz(n));
    std::vector<double> rt;
    double tnorm = 0.0;
    for (;;) {
      for (int i = 0; i < n; ++i) trial[sz(i)] = v[sz(i)] - t * step(i);
      try {
        rt = residual_at(trial, nullptr);
        tnorm = inf_norm(rt);
      } catch (const EvalError&) {
        tnorm = INFINITY;
      }
      if (tnorm <= (1.0 - 1e-4 * t) * rnorm || t < 1e-8) break;
      t *= 0.5;
    }
    if (!std::isfinite(tnorm)) throw NonConvergence("Newton step left the domain of L");
    v = trial;
    ++it;
    r = residual_at(v, &jets);
    rnorm = inf_norm(r);
  }
  result.iterations = it;
  result.v_point = PhasePoint(p_point.x, v, Representation::V);
  result.L = std::move(jets);
  implicit_jets(result, n);
  return result;
}

InverseResult legendre_inverse(const SystemDef& s, const PhasePoint& p_point,
                               const NewtonOptions& options) {
  require_rep(p_point, Representation::P, "legendre_inverse");
  if (!s.V) return legendre_inverse_newton(s, p_point, options);

  const int n = s.n;
  const std::size_t N = sz(n);
  const std::size_t vars = 2 * N;
  InverseResult r;
  for (const Expression& e : *s.V) r.V.push_back(jet_or_zero(e, p_point));
  std::vector<double> v(N);
  for (std::size_t a = 0; a < N; ++a) v[a] = r.V[a].value;
  r.v_point = PhasePoint(p_point.x, v, Representation::V);
  r.L = s.L.jets(r.v_point);
  r.g_lower = fiber_jacobian(r.L, n);
  r.g_upper = Matrix(n, n);
  for (int a = 0; a < n; ++a)
    for (int k = 0; k < n; ++k) r.g_upper(a, k) = r.V[sz(a)].gradient[N + sz(k)];
  if (condition_number(r.g_upper) > kSingularCondition)
    throw SingularMetric("inverse Legendre map has a singular fiber Jacobian");
  r.dy_dz.assign(vars, std::vector<double>(vars, 0.0));
  for (std::size_t a = 0; a < N; ++a) r.dy_dz[a][a] = 1.0;
  for (std::size_t a = 0; a < N; ++a) r.dy_dz[N + a] = r.V[a].gradient;
  for (std::size_t a = 0; a < N; ++a)
    r.y.push_back(Jet2::variable(vars, a, p_point.x[a]));
  for (std::size_t a = 0; a < N; ++a) r.y.push_back(r.V[a]);
  return r;
}

MetricPair metric(const SystemDef& s, const PhasePoint& v_point) {
  require_rep(v_point, Representation::V, "metric");
  const std::vector<Jet2> L = s.L.jets(v_point);
  MetricPair m;
  m.g_lower = fiber_jacobian(L, s.n);
  m.g_upper = invert_checked(m.g_lower);
  const Matrix I = Matrix::Identity(s.n, s.n);
  m.deviation = std::max((m.g_upper * m.g_lower - I).cwiseAbs().maxCoeff(),
                         (m.g_lower * m.g_upper - I).cwiseAbs().maxCoeff());
  return m;
}

std::vector<Jet1> theta_jets(const VPrimitives& prim) {
  const int n = prim.n;
  const std::size_t vars = 2 * sz(n);
  std::vector<Jet1> theta(sz(n), Jet1(vars));
  for (int i = 0; i < n; ++i) {
    const Jet2& Li = prim.L[sz(i)];
    for (int s = 0; s < n; ++s) {
      const Jet1 vs = Jet1::variable(vars, sz(n + s), prim.point.fiber[sz(s)]);
      theta[sz(i)].add_product(partial(Li, sz(s)), vs);
      theta[sz(i)].add_product(partial(Li, sz(n + s)), demote(prim.Phi[sz(s)]));
    }
  }
  return theta;
}

std::vector<Jet1> force_vector_jets(const VPrimitives& prim) {
  const int n = prim.n;
  const std::size_t vars = 2 * sz(n);
  std::vector<Jet1> v;
  for (int a = 0; a < n; ++a)
    v.push_back(Jet1::variable(vars, sz(n + a), prim.point.fiber[sz(a)]));
  std::vector<Jet1> F;
  for (int i = 0; i < n; ++i) {
    Jet1 f = demote(prim.Phi[sz(i)]);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        f.add_product(demote(prim.gamma(i, j, k)), v[sz(j)], v[sz(k)]);
    F.push_back(std::move(f));
  }
  return F;
}

std::vector<double> theta_from_phi(const SystemDef& s, const PhasePoint& v_point) {
  const VPrimitives prim = evaluate_primitives(s, v_point);
  std::vector<double> out;
  for (const Jet1& t : theta_jets(prim)) out.push_back(t.value);
  return out;
}

std::vector<double> force_vector(const SystemDef& s, const PhasePoint& v_point) {
  require_rep(v_point, Representation::V, "force_vector");
  const int n = s.n;
  std::vector<double> F(sz(n));
  for (int i = 0; i < n; ++i) {
    double f = eval_scalar(s.Phi[sz(i)], v_point);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Expression& g = s.Gamma[s.gamma_index(i, j, k)];
        if (g.is_zero_literal()) continue;
        f += eval_scalar(g, v_point) * v_point.fiber[sz(j)] * v_point.fiber[sz(k)];
      }
    F[sz(i)] = f;
  }
  return F;
}

std::vector<double> force_covector(const SystemDef& s, const PhasePoint& p_point) {
  const InverseResult inv = legendre_inverse(s, p_point);
  const int n = s.n;
  const std::vector<double> theta = theta_from_phi(s, inv.v_point);
  std::vector<double> Q(sz(n));
  for (int i = 0; i < n; ++i) {
    double q = theta[sz(i)];
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Expression& g = s.Gamma[s.gamma_index(k, i, j)];
        if (g.is_zero_literal()) continue;
        q -= eval_scalar(g, inv.v_point) * inv.v_point.fiber[sz(j)] *
             p_point.fiber[sz(k)];
      }
    Q[sz(i)] = q;
  }
  return Q;
}

std::vector<double> duals(const SystemDef& s, const PhasePoint& v_point,
                          DualKind which) {
  const MetricPair m = metric(s, v_point);
  const int n = s.n;
  std::vector<double> out(sz(n), 0.0);
  if (which == DualKind::LRight) {
    const std::vector<double> L = s.L.values(v_point);
    for (int i = 0; i < n; ++i)
      for (int q = 0; q < n; ++q) out[sz(i)] += L[sz(q)] * m.g_upper(q, i);
  } else {
    const std::vector<double> F = force_vector(s, v_point);
    for (int q = 0; q < n; ++q)
      for (int i = 0; i < n; ++i) out[sz(q)] += m.g_lower(q, i) * F[sz(i)];
  }
  return out;
}

void validate_system(const SystemDef& s, const ValidationOptions& options) {
  const int n = s.n;
  if (n < 1) throw ValidationError("dimension must be at least 1");
  if (s.L.dimension() != n || s.Phi.size() != sz(n) ||
      s.Gamma.size() != sz(n * n * n))
    throw ValidationError("component counts do not match the dimension");
  if (s.V && s.V->size() != sz(n)) throw ValidationError("V has wrong component count");
  if (s.T && s.T->size() != sz(n * n * n))
    throw ValidationError("gauge tensor has wrong component count");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::uniform_real_distribution<double> fib(0.5, 1.5);

  auto symmetric = [&](const std::vector<Expression>& c, const PhasePoint& pt) {
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const Expression& a = c[s.gamma_index(k, i, j)];
          const Expression& b = c[s.gamma_index(k, j, i)];
          if (a == b) continue;
          const double va = eval_scalar(a, pt);
          const double vb = eval_scalar(b, pt);
          if (std::fabs(va - vb) >
              options.symmetry_tolerance * std::max(1.0, std::fabs(va)))
            return false;
        }
    return true;
  };

  for (int sample = 0; sample < options.samples; ++sample) {
    std::vector<double> x(sz(n)), v(sz(n));
    for (double& xi : x) xi = box(rng);
    for (double& vi : v) vi = fib(rng);
    const PhasePoint vp(x, v, Representation::V);
    try {
      if (!symmetric(s.Gamma, vp)) throw ValidationError("connection not symmetric");
      if (s.T && !symmetric(*s.T, vp)) throw ValidationError("gauge tensor not symmetric");
    } catch (const EvalError&) {
    }

    std::vector<double> L0;
    try {
      L0 = s.L.values(PhasePoint(x, std::vector<double>(sz(n), 0.0), Representation::V));
    } catch (const EvalError&) {
      throw ValidationError("Legendre map is not defined at zero fiber");
    }
    if (max_abs(L0) > options.zero_tolerance)
      throw ValidationError("Legendre map does not send zero to zero");

    if (s.V) {
      try {
        const PhasePoint pp = legendre_forward(s, vp);
        std::vector<double> vv(sz(n));
        for (int i = 0; i < n; ++i) vv[sz(i)] = eval_scalar((*s.V)[sz(i)], pp);
        const std::vector<double> back =
            s.L.values(PhasePoint(x, vv, Representation::V));
        if (max_abs_diff(back, pp.fiber) >
            options.inverse_tolerance * std::max(1.0, max_abs(pp.fiber)))
          throw ValidationError("V inconsistent with L");
      } catch (const EvalError&) {
        throw ValidationError("V inconsistent with L");
      }
    }
  }
}

}  // namespace nlab
