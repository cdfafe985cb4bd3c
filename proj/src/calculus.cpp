#include "normlab/calculus.hpp"

#include <algorithm>
#include <string>

namespace nlab {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

Jet1 derivative_of(const Jet2& c, std::size_t a) { return partial(c, a); }
double derivative_of(const Jet1& c, std::size_t a) { return partial(c, a); }

template <class D>
D fiber_variable(const PhasePoint& pt, int a);

template <>
Jet1 fiber_variable<Jet1>(const PhasePoint& pt, int a) {
  const std::size_t n = pt.x.size();
  return Jet1::variable(2 * n, n + sz(a), pt.fiber[sz(a)]);
}

template <>
double fiber_variable<double>(const PhasePoint& pt, int a) {
  return pt.fiber[sz(a)];
}

void add_product(double& acc, double a, double b) { acc += a * b; }
void add_product(Jet1& acc, const Jet1& a, const Jet1& b) { acc.add_product(a, b); }
void sub_product(double& acc, double a, double b) { acc -= a * b; }
void sub_product(Jet1& acc, const Jet1& a, const Jet1& b) { acc.add_product(-a, b); }

template <class D>
D zero_like(std::size_t vars);
template <>
Jet1 zero_like<Jet1>(std::size_t vars) { return Jet1(vars); }
template <>
double zero_like<double>(std::size_t) { return 0.0; }

template <class C>
void check_connection(const FieldValue<C>& X, int n, Representation rep, int up,
                      int low, const char* what) {
  if (X.n != n || X.rep != rep || X.upper != up || X.lower != low)
    throw InvalidArgument(std::string(what) + ": field shape mismatch");
}

void decompose(std::size_t flat, int n, int rank, std::vector<int>& digits) {
  digits.assign(sz(rank), 0);
  for (int d = rank - 1; d >= 0; --d) {
    digits[sz(d)] = static_cast<int>(flat % sz(n));
    flat /= sz(n);
  }
}

std::size_t compose_index(const std::vector<int>& digits, int n) {
  std::size_t o = 0;
  for (int d : digits) o = o * sz(n) + sz(d);
  return o;
}

template <class C, class D>
FieldValue<D> vertical_impl(const FieldValue<C>& X) {
  const int n = X.n;
  const std::size_t N = sz(n);
  std::vector<D> out(X.count() * N);
  const std::size_t lower_block = Tensor::count(n, X.lower);
  for (std::size_t flat = 0; flat < X.count(); ++flat) {
    for (int k = 0; k < n; ++k) {
      const D d = derivative_of(X.components[flat], N + sz(k));
      std::size_t target;
      if (X.rep == Representation::V) {
        target = flat * N + sz(k);
      } else {
        const std::size_t up = flat / lower_block;
        const std::size_t low = flat % lower_block;
        target = (up * N + sz(k)) * lower_block + low;
      }
      out[target] = d;
    }
  }
  if (X.rep == Representation::V)
    return FieldValue<D>(n, X.upper, X.lower + 1, X.rep, X.point, std::move(out));
  return FieldValue<D>(n, X.upper + 1, X.lower, X.rep, X.point, std::move(out));
}

template <class C, class D>
FieldValue<D> horizontal_impl(const FieldValue<C>& X, const FieldValue<D>& G) {
  const int n = X.n;
  const std::size_t N = sz(n);
  check_connection(G, n, X.rep, 1, 2, "horizontal_derivative");
  const std::size_t vars = 2 * N;
  std::vector<D> fiber;
  for (int a = 0; a < n; ++a) fiber.push_back(fiber_variable<D>(X.point, a));

  // Coefficient of ∂X/∂(fiber_b) for derivative direction m.
  std::vector<D> coeff(N * N, zero_like<D>(vars));
  for (int m = 0; m < n; ++m)
    for (int b = 0; b < n; ++b) {
      D& c = coeff[sz(m) * N + sz(b)];
      for (int a = 0; a < n; ++a) {
        if (X.rep == Representation::V)
          sub_product(c, fiber[sz(a)], G(b, a, m));
        else
          add_product(c, fiber[sz(a)], G(a, m, b));
      }
    }

  std::vector<D> base;
  base.reserve(X.count());
  for (const C& c : X.components) base.push_back(demote(c));

  const int rank = X.rank();
  std::vector<D> out(X.count() * N, zero_like<D>(vars));
  std::vector<int> digits;
  std::vector<int> moved;
  for (std::size_t flat = 0; flat < X.count(); ++flat) {
    decompose(flat, n, rank, digits);
    std::vector<D> dfiber;
    for (int b = 0; b < n; ++b) dfiber.push_back(derivative_of(X.components[flat], N + sz(b)));
    for (int m = 0; m < n; ++m) {
      D acc = derivative_of(X.components[flat], sz(m));
      for (int b = 0; b < n; ++b) add_product(acc, coeff[sz(m) * N + sz(b)], dfiber[sz(b)]);
      for (int slot = 0; slot < rank; ++slot) {
        moved = digits;
        const int idx = digits[sz(slot)];
        for (int a = 0; a < n; ++a) {
          moved[sz(slot)] = a;
          const D& other = base[compose_index(moved, n)];
          if (slot < X.upper)
            add_product(acc, G(idx, m, a), other);
          else
            sub_product(acc, G(a, m, idx), other);
        }
      }
      out[flat * N + sz(m)] = std::move(acc);
    }
  }
  return FieldValue<D>(n, X.upper, X.lower + 1, X.rep, X.point, std::move(out));
}

}  // namespace

FieldValue<Jet1> vertical_derivative(const FieldValue<Jet2>& X) {
  return vertical_impl<Jet2, Jet1>(X);
}

FieldValue<double> vertical_derivative(const FieldValue<Jet1>& X) {
  return vertical_impl<Jet1, double>(X);
}

FieldValue<double> vertical_derivative(const FieldValue<double>&) {
  throw MissingJets("field was built without derivative data");
}

FieldValue<Jet1> horizontal_derivative(const FieldValue<Jet2>& X,
                                       const FieldValue<Jet1>& gamma) {
  return horizontal_impl<Jet2, Jet1>(X, gamma);
}

FieldValue<double> horizontal_derivative(const FieldValue<Jet1>& X,
                                         const FieldValue<double>& gamma) {
  return horizontal_impl<Jet1, double>(X, gamma);
}

FieldValue<double> horizontal_derivative(const FieldValue<double>&,
                                         const FieldValue<double>&) {
  throw MissingJets("field was built without derivative data");
}

FieldValue<double> values_of(const FieldValue<Jet1>& X) {
  std::vector<double> v;
  v.reserve(X.count());
  for (const Jet1& c : X.components) v.push_back(c.value);
  return FieldValue<double>(X.n, X.upper, X.lower, X.rep, X.point, std::move(v));
}

FieldValue<Jet1> demote(const FieldValue<Jet2>& X) {
  std::vector<Jet1> v;
  v.reserve(X.count());
  for (const Jet2& c : X.components) v.push_back(demote(c));
  return FieldValue<Jet1>(X.n, X.upper, X.lower, X.rep, X.point, std::move(v));
}

FieldValue<Jet1> connection_v(const VPrimitives& prim) {
  std::vector<Jet1> c;
  c.reserve(prim.Gamma.size());
  for (const Jet2& g : prim.Gamma) c.push_back(demote(g));
  return FieldValue<Jet1>(prim.n, 1, 2, Representation::V, prim.point, std::move(c));
}

FieldValue<Jet1> connection_p(const VPrimitives& prim, const InverseResult& inv,
                              const PhasePoint& p_point) {
  std::vector<Jet1> c;
  c.reserve(prim.Gamma.size());
  for (const Jet2& g : prim.Gamma) c.push_back(compose(demote(g), inv.dy_dz));
  return FieldValue<Jet1>(prim.n, 1, 2, Representation::P, p_point, std::move(c));
}

Tensor dynamic_curvature(const FieldValue<Jet1>& G) {
  const int n = G.n;
  const std::size_t N = sz(n);
  Tensor D(n, 4);
  for (int k = 0; k < n; ++k)
    for (int r = 0; r < n; ++r)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (G.rep == Representation::V)
            D(k, r, i, j) = -G(k, i, r).gradient[N + sz(j)];
          else
            D(k, r, i, j) = -G(k, i, j).gradient[N + sz(r)];
        }
  return D;
}

Tensor curvature_R(const FieldValue<Jet1>& G) {
  const int n = G.n;
  const std::size_t N = sz(n);
  const std::vector<double>& f = G.point.fiber;
  Tensor R(n, 4);
  for (int k = 0; k < n; ++k)
    for (int r = 0; r < n; ++r)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double acc = G(k, j, r).gradient[sz(i)] - G(k, i, r).gradient[sz(j)];
          for (int m = 0; m < n; ++m)
            acc += G(k, i, m).value * G(m, j, r).value -
                   G(k, j, m).value * G(m, i, r).value;
          for (int m = 0; m < n; ++m)
            for (int s = 0; s < n; ++s) {
              const double fs = f[sz(s)];
              if (G.rep == Representation::V) {
                acc -= fs * G(m, i, s).value * G(k, j, r).gradient[N + sz(m)];
                acc += fs * G(m, j, s).value * G(k, i, r).gradient[N + sz(m)];
              } else {
                acc += fs * G(s, m, i).value * G(k, j, r).gradient[N + sz(m)];
                acc -= fs * G(s, m, j).value * G(k, i, r).gradient[N + sz(m)];
              }
            }
          R(k, r, i, j) = acc;
        }
  return R;
}

namespace {

FieldValue<Jet1> connection_at(const SystemDef& s, const PhasePoint& point) {
  if (point.rep == Representation::V) return connection_v(evaluate_primitives(s, point));
  const InverseResult inv = legendre_inverse(s, point);
  return connection_p(evaluate_primitives(s, inv.v_point), inv, point);
}

}  // namespace

Tensor dynamic_curvature(const SystemDef& s, const PhasePoint& point) {
  return dynamic_curvature(connection_at(s, point));
}

Tensor curvature_R(const SystemDef& s, const PhasePoint& point) {
  return curvature_R(connection_at(s, point));
}

Tensor dynamic_curvature_pullback(const Tensor& D_v, const Matrix& gu) {
  const int n = D_v.dim();
  Tensor out(n, 4);
  for (int k = 0; k < n; ++k)
    for (int r = 0; r < n; ++r)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double acc = 0.0;
          for (int s = 0; s < n; ++s) acc += gu(s, r) * D_v(k, i, j, s);
          out(k, r, i, j) = acc;
        }
  return out;
}

Tensor curvature_pullback(const Tensor& R_v, const Tensor& D_v,
                          const FieldValue<double>& nabla_L, const Matrix& gu) {
  const int n = R_v.dim();
  Tensor out = R_v;
  for (int k = 0; k < n; ++k)
    for (int r = 0; r < n; ++r)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double acc = 0.0;
          for (int q = 0; q < n; ++q)
            for (int s = 0; s < n; ++s)
              acc += nabla_L(q, i) * gu(s, q) * D_v(k, j, r, s) -
                     nabla_L(q, j) * gu(s, q) * D_v(k, i, r, s);
          out(k, r, i, j) += acc;
        }
  return out;
}

double TransportDeviations::max() const noexcept {
  return std::max({vertical_from_v, vertical_from_p, horizontal_from_p, horizontal_from_v});
}

TransportDeviations transport_identities(const SystemDef& s, const PhasePoint& v_point,
                                         std::span<const Expression> field_v,
                                         std::span<const Expression> field_p, int upper) {
  if (v_point.rep != Representation::V)
    throw InvalidArgument("transport_identities expects a v-point");
  const int n = s.n;
  const std::size_t N = sz(n);
  if (upper < 0 || upper > 1) throw InvalidArgument("transport fields have rank (0,0) or (1,0)");
  const std::size_t count = Tensor::count(n, upper);
  if (field_v.size() != count || field_p.size() != count)
    throw DimensionError("transport field has the wrong number of components");

  const PhasePoint p_point = legendre_forward(s, v_point);
  const InverseResult inv = legendre_inverse(s, p_point);
  const PhasePoint& vp = inv.v_point;
  const VPrimitives prim = evaluate_primitives(s, vp);
  const FieldValue<Jet1> Gv = connection_v(prim);
  const FieldValue<Jet1> Gp = connection_p(prim, inv, p_point);

  std::vector<Jet2> forward;
  for (int a = 0; a < n; ++a) forward.push_back(Jet2::variable(2 * N, sz(a), vp.x[sz(a)]));
  for (const Jet2& l : prim.L) forward.push_back(l);

  std::vector<Jet2> xv, xv_p, xp, xp_v;
  for (const Expression& e : field_v) {
    xv.push_back(eval_jet(e, vp));
    xv_p.push_back(compose(xv.back(), inv.y));
  }
  for (const Expression& e : field_p) {
    xp.push_back(eval_jet(e, p_point));
    xp_v.push_back(compose(xp.back(), forward));
  }
  const FieldValue<Jet2> Xv(n, upper, 0, Representation::V, vp, xv);
  const FieldValue<Jet2> Xv_p(n, upper, 0, Representation::P, p_point, xv_p);
  const FieldValue<Jet2> Xp(n, upper, 0, Representation::P, p_point, xp);
  const FieldValue<Jet2> Xp_v(n, upper, 0, Representation::V, vp, xp_v);

  const FieldValue<double> dXv = values_of(vertical_derivative(Xv));
  const FieldValue<double> dXv_p = values_of(vertical_derivative(Xv_p));
  const FieldValue<double> dXp = values_of(vertical_derivative(Xp));
  const FieldValue<double> dXp_v = values_of(vertical_derivative(Xp_v));
  const FieldValue<double> hXv = values_of(horizontal_derivative(Xv, Gv));
  const FieldValue<double> hXv_p = values_of(horizontal_derivative(Xv_p, Gp));
  const FieldValue<double> hXp = values_of(horizontal_derivative(Xp, Gp));
  const FieldValue<double> hXp_v = values_of(horizontal_derivative(Xp_v, Gv));

  const FieldValue<Jet2> Lf(n, 0, 1, Representation::V, vp, prim.L);
  const FieldValue<double> nabla_L = values_of(horizontal_derivative(Lf, Gv));
  const FieldValue<Jet2> Vf(n, 1, 0, Representation::P, p_point, inv.V);
  const FieldValue<double> nabla_V = values_of(horizontal_derivative(Vf, Gp));

  std::vector<double> l25, r25, l26, r26, l35, r35, l36, r36;
  for (std::size_t f = 0; f < count; ++f)
    for (int k = 0; k < n; ++k) {
      const std::size_t at = f * N + sz(k);
      double a25 = 0.0, a26 = 0.0, a35 = hXp_v.components[at], a36 = hXv_p.components[at];
      for (int q = 0; q < n; ++q) {
        const std::size_t aq = f * N + sz(q);
        a25 += inv.g_lower(q, k) * dXv_p.components[aq];
        a26 += inv.g_upper(q, k) * dXp_v.components[aq];
        a35 += nabla_V(q, k) * dXp_v.components[aq];
        a36 += nabla_L(q, k) * dXv_p.components[aq];
      }
      l25.push_back(dXv.components[at]);
      r25.push_back(a25);
      l26.push_back(dXp.components[at]);
      r26.push_back(a26);
      l35.push_back(hXp.components[at]);
      r35.push_back(a35);
      l36.push_back(hXv.components[at]);
      r36.push_back(a36);
    }
  return {relative_deviation(l25, r25), relative_deviation(l26, r26),
          relative_deviation(l35, r35), relative_deviation(l36, r36)};
}

}  // namespace nlab
