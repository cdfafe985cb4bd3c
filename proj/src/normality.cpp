#include "normlab/normality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlab {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

std::vector<double> flatten(const Matrix& m) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

void check_omega(double omega, const std::vector<double>& p) {
  if (std::fabs(omega) < omega_threshold(p)) {
    std::ostringstream msg;
    msg << "degenerate point: |Omega| = " << std::fabs(omega);
    throw DegeneratePoint(msg.str());
  }
}

Matrix projector(const std::vector<double>& W, const std::vector<double>& p,
                 double omega) {
  const int n = static_cast<int>(W.size());
  Matrix P = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P(i, j) -= W[sz(i)] * p[sz(j)] / omega;
  return P;
}

std::vector<double> values(const std::vector<Jet1>& v) {
  std::vector<double> out;
  for (const Jet1& j : v) out.push_back(j.value);
  return out;
}

}  // namespace

const char* field_name(FieldId id) noexcept {
  switch (id) {
    case FieldId::W: return "W";
    case FieldId::Omega: return "Omega";
    case FieldId::P: return "P";
    case FieldId::U: return "U";
    case FieldId::Alpha: return "alpha";
    case FieldId::Beta: return "beta";
    case FieldId::Eta: return "eta";
    case FieldId::A: return "A";
    case FieldId::B: return "B";
    case FieldId::C: return "C";
  }
  return "?";
}

std::optional<FieldId> field_from_name(std::string_view name) {
  for (FieldId id : kAllFields)
    if (name == field_name(id)) return id;
  return std::nullopt;
}

std::vector<double> NormalityBundle::field(FieldId id) const {
  switch (id) {
    case FieldId::W: return W;
    case FieldId::Omega: return {Omega};
    case FieldId::P: return flatten(P);
    case FieldId::U: return U;
    case FieldId::Alpha: return alpha;
    case FieldId::Beta: return beta;
    case FieldId::Eta: return eta;
    case FieldId::A: return flatten(A);
    case FieldId::B: return flatten(B);
    case FieldId::C: return flatten(C);
  }
  return {};
}

double omega_threshold(const std::vector<double>& p) {
  double norm2 = 0.0;
  for (double x : p) norm2 += x * x;
  return 1e-12 * (1.0 + norm2);
}

double lambda_scalar(const Matrix& B, const Matrix& P, int n) {
  if (n < 2) throw InvalidArgument("lambda requires n >= 2");
  double acc = 0.0;
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s) acc += B(r, s) * P(s, r);
  return acc / (n - 1);
}

PRepFields prep_fields(const SystemDef& s, const PhasePoint& p_point) {
  if (p_point.rep != Representation::P)
    throw InvalidArgument("prep_fields expects a p-point");
  const int n = s.n;
  const std::size_t N = sz(n);
  const std::size_t vars = 2 * N;
  const std::vector<double>& p = p_point.fiber;

  PRepFields out;
  out.p_point = p_point;
  out.inverse = legendre_inverse(s, p_point);
  const InverseResult& inv = out.inverse;
  const VPrimitives prim = evaluate_primitives(s, inv.v_point);
  const std::vector<double>& v = inv.v_point.fiber;

  const FieldValue<Jet1> G = connection_p(prim, inv, p_point);
  const FieldValue<double> Gv = values_of(G);

  std::vector<Jet1> ps;
  for (int a = 0; a < n; ++a) ps.push_back(Jet1::variable(vars, N + sz(a), p[sz(a)]));

  std::vector<Jet1> W(N, Jet1(vars));
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) W[sz(i)].add_product(ps[sz(a)], partial(inv.V[sz(a)], N + sz(i)));
  double omega = 0.0;
  for (int a = 0; a < n; ++a) omega += p[sz(a)] * W[sz(a)].value;
  check_omega(omega, p);

  std::vector<Jet1> Vz;
  for (const Jet2& j : inv.V) Vz.push_back(demote(j));

  std::vector<Jet1> theta;
  for (const Jet1& t : theta_jets(prim)) theta.push_back(compose(t, inv.dy_dz));

  std::vector<Jet1> Q = theta;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) Q[sz(i)].add_product(-G(k, i, j), Vz[sz(j)], ps[sz(k)]);

  const FieldValue<Jet2> Vf(n, 1, 0, Representation::P, p_point, inv.V);
  const FieldValue<Jet1> nablaV = horizontal_derivative(Vf, G);
  std::vector<Jet1> U = Q;
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) U[sz(i)].add_product(nablaV(a, i), ps[sz(a)]);

  const FieldValue<Jet1> Wf(n, 1, 0, Representation::P, p_point, W);
  const FieldValue<Jet1> Uf(n, 0, 1, Representation::P, p_point, U);
  const FieldValue<Jet1> Qf(n, 0, 1, Representation::P, p_point, Q);
  const FieldValue<double> nW = horizontal_derivative(Wf, Gv);  // [k][r] = ∇_r W^k
  const FieldValue<double> dW = vertical_derivative(Wf);        // [k][r] = ∂W^k/∂p_r
  const FieldValue<double> nU = horizontal_derivative(Uf, Gv);  // [k][r] = ∇_r U_k
  const FieldValue<double> dU = vertical_derivative(Uf);        // [r][k] = ∂U_k/∂p_r
  const FieldValue<double> nQ = horizontal_derivative(Qf, Gv);  // [r][k] = ∇_k Q_r
  const FieldValue<double> dQ = vertical_derivative(Qf);        // [k][r] = ∂Q_r/∂p_k
  out.nabla_V = values_of(nablaV);
  const FieldValue<double>& nV = out.nabla_V;                   // [s][i] = ∇_i V^s

  out.D = dynamic_curvature(G);
  out.R = curvature_R(G);
  const Tensor& D = out.D;
  const Tensor& R = out.R;

  NormalityBundle& b = out.bundle;
  b.rep = Representation::P;
  b.n = n;
  b.W = values(W);
  b.Omega = omega;
  b.P = projector(b.W, p, omega);
  b.U = values(U);
  out.Q = values(Q);
  const std::vector<double>& Wv = b.W;
  const std::vector<double>& Uv = b.U;
  const std::vector<double>& Qv = out.Q;
  auto dVdp = [&](int r, int k) { return inv.V[sz(r)].gradient[N + sz(k)]; };

  b.alpha.assign(N, 0.0);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int r = 0; r < n; ++r) {
      acc += dVdp(r, k) * Uv[sz(r)];
      acc += nW(k, r) * v[sz(r)];
      acc += dW(k, r) * Qv[sz(r)];
      acc += Wv[sz(r)] * dQ(k, r);
    }
    for (int r = 0; r < n; ++r)
      for (int a = 0; a < n; ++a)
        for (int q = 0; q < n; ++q) acc -= p[sz(a)] * D(a, k, r, q) * Wv[sz(r)] * v[sz(q)];
    b.alpha[sz(k)] = acc;
  }

  b.beta.assign(N, 0.0);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int r = 0; r < n; ++r) {
      acc += nU(k, r) * v[sz(r)];
      acc += dU(r, k) * Qv[sz(r)];
      acc += nV(r, k) * Uv[sz(r)];
      acc += nQ(r, k) * Wv[sz(r)];
    }
    for (int r = 0; r < n; ++r)
      for (int a = 0; a < n; ++a)
        for (int m = 0; m < n; ++m)
          acc -= (R(a, r, m, k) * v[sz(m)] - D(a, m, r, k) * Qv[sz(m)]) * Wv[sz(r)] * p[sz(a)];
    b.beta[sz(k)] = acc;
  }

  double alpha_p = 0.0;
  for (int a = 0; a < n; ++a) alpha_p += b.alpha[sz(a)] * p[sz(a)];
  b.eta.assign(N, 0.0);
  for (int k = 0; k < n; ++k) b.eta[sz(k)] = b.beta[sz(k)] - Uv[sz(k)] * alpha_p / omega;

  b.A = Matrix(n, n);
  for (int r = 0; r < n; ++r)
    for (int a = 0; a < n; ++a) b.A(r, a) = dW(a, r);

  b.B = Matrix(n, n);
  for (int r = 0; r < n; ++r)
    for (int a = 0; a < n; ++a) {
      double acc = dU(r, a) - nW(r, a);
      for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) acc += Wv[sz(k)] * p[sz(m)] * D(m, r, k, a);
      for (int m = 0; m < n; ++m)
        acc += (dW(r, m) - dW(m, r)) / omega * Uv[sz(a)] * p[sz(m)];
      b.B(r, a) = acc;
    }

  b.C = Matrix(n, n);
  for (int r = 0; r < n; ++r)
    for (int a = 0; a < n; ++a) {
      double acc = nU(a, r);
      for (int m = 0; m < n; ++m)
        acc -= (Uv[sz(r)] * dU(m, a) + Uv[sz(a)] * nW(m, r)) / omega * p[sz(m)];
      for (int k = 0; k < n; ++k)
        for (int q = 0; q < n; ++q) {
          double inner = R(q, k, r, a) / 2.0;
          for (int m = 0; m < n; ++m) inner += D(m, q, k, a) * Uv[sz(r)] / omega * p[sz(m)];
          acc -= inner * Wv[sz(k)] * p[sz(q)];
        }
      b.C(r, a) = acc;
    }

  b.lambda = n >= 2 ? lambda_scalar(b.B, b.P, n) : 0.0;
  return out;
}

VRepFields vrep_fields(const SystemDef& s, const PhasePoint& v_point,
                       const VFormOptions& options) {
  if (v_point.rep != Representation::V)
    throw InvalidArgument("vrep_fields expects a v-point");
  const int n = s.n;
  const std::size_t N = sz(n);
  const std::size_t vars = 2 * N;
  const std::vector<double>& v = v_point.fiber;

  VRepFields out;
  out.v_point = v_point;
  out.prim = evaluate_primitives(s, v_point);
  const VPrimitives& prim = out.prim;

  std::vector<Jet1> gl;
  for (int q = 0; q < n; ++q)
    for (int k = 0; k < n; ++k) gl.push_back(partial(prim.L[sz(q)], N + sz(k)));
  const std::vector<Jet1> gu = invert_jet(gl, n);
  out.g_lower = values_of(gl, n);
  out.g_upper = values_of(gu, n);

  std::vector<Jet1> Lq;
  for (const Jet2& j : prim.L) Lq.push_back(demote(j));
  std::vector<Jet1> Lu(N, Jet1(vars));
  for (int i = 0; i < n; ++i)
    for (int q = 0; q < n; ++q) Lu[sz(i)].add_product(Lq[sz(q)], gu[sz(q * n + i)]);

  const std::vector<Jet1> F = force_vector_jets(prim);
  std::vector<Jet1> Fl(N, Jet1(vars));
  for (int q = 0; q < n; ++q)
    for (int i = 0; i < n; ++i) Fl[sz(q)].add_product(gl[sz(q * n + i)], F[sz(i)]);

  const FieldValue<Jet1> G = connection_v(prim);
  out.gamma = values_of(G);
  const FieldValue<double>& Gv = out.gamma;

  const FieldValue<Jet2> Lf(n, 0, 1, Representation::V, v_point, prim.L);
  const FieldValue<Jet1> nL = horizontal_derivative(Lf, G);  // [q][m] = ∇_m L_q

  std::vector<Jet1> vj;
  for (int a = 0; a < n; ++a) vj.push_back(Jet1::variable(vars, N + sz(a), v[sz(a)]));

  std::vector<Jet1> U = Fl;
  for (int i = 0; i < n; ++i)
    for (int q = 0; q < n; ++q) {
      U[sz(i)].add_product(vj[sz(q)], nL(i, q));
      U[sz(i)].add_product(-Lu[sz(q)], nL(q, i));
    }

  const FieldValue<Jet1> Luf(n, 1, 0, Representation::V, v_point, Lu);
  const FieldValue<Jet1> Flf(n, 0, 1, Representation::V, v_point, Fl);
  const FieldValue<Jet1> Uf(n, 0, 1, Representation::V, v_point, U);
  const FieldValue<double> nLu = horizontal_derivative(Luf, Gv);  // [k][r] = ∇_r L^k
  out.dL_up = vertical_derivative(Luf);                          // [k][q] = ∂L^k/∂v^q
  const FieldValue<double>& dLu = out.dL_up;
  const FieldValue<double> nnL = horizontal_derivative(nL, Gv);  // [r][m][k] = ∇_k ∇_m L_r
  const FieldValue<double> dnL = vertical_derivative(nL);        // [r][s][q] = ∂(∇_s L_r)/∂v^q
  const FieldValue<double> nF = horizontal_derivative(Flf, Gv);  // [r][k] = ∇_k F_r
  const FieldValue<double> dF = vertical_derivative(Flf);        // [r][s] = ∂F_r/∂v^s
  const FieldValue<double> nU = horizontal_derivative(Uf, Gv);   // [k][r] = ∇_r U_k
  const FieldValue<double> dU = vertical_derivative(Uf);         // [k][q] = ∂U_k/∂v^q
  out.nabla_L = values_of(nL);
  const FieldValue<double>& nLv = out.nabla_L;

  out.D = dynamic_curvature(G);
  out.R = curvature_R(G);
  const Tensor& D = out.D;
  const Tensor& R = out.R;

  out.L = values(Lq);
  out.L_up = values(Lu);
  out.F_up = values(F);
  out.F_low = values(Fl);
  const std::vector<double>& L = out.L;
  const std::vector<double>& Lup = out.L_up;
  const std::vector<double>& Fup = out.F_up;
  const std::vector<double>& Flo = out.F_low;
  const Matrix& gu_v = out.g_upper;

  NormalityBundle& b = out.bundle;
  b.rep = Representation::V;
  b.n = n;
  b.W = Lup;
  double omega = 0.0;
  for (int a = 0; a < n; ++a) omega += L[sz(a)] * Lup[sz(a)];
  check_omega(omega, L);
  b.Omega = omega;
  b.P = projector(Lup, L, omega);
  b.U = values(U);
  const std::vector<double>& Uv = b.U;

  b.alpha.assign(N, 0.0);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int r = 0; r < n; ++r) {
      acc += gu_v(r, k) * Uv[sz(r)];
      acc += v[sz(r)] * nLu(k, r);
      acc += Fup[sz(r)] * dLu(k, r);
    }
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r) {
        const double Lg = Lup[sz(r)] * gu_v(q, k);
        for (int a = 0; a < n; ++a) acc += Lg * v[sz(a)] * dnL(r, a, q);
        acc += Lg * dF(r, q);
        acc += Lg * nLv(r, q);
      }
    for (int q = 0; q < n; ++q)
      for (int m = 0; m < n; ++m)
        for (int r = 0; r < n; ++r)
          for (int a = 0; a < n; ++a)
            acc -= gu_v(m, k) * L[sz(a)] * D(a, r, q, m) * Lup[sz(r)] * v[sz(q)];
    b.alpha[sz(k)] = acc;
  }

  b.beta.assign(N, 0.0);
  for (int k = 0; k < n; ++k) {
    double t[12] = {};
    for (int r = 0; r < n; ++r) {
      t[1] += v[sz(r)] * nU(k, r);
      t[2] += Fup[sz(r)] * dU(k, r);
      t[5] += Lup[sz(r)] * nF(r, k);
      for (int m = 0; m < n; ++m) t[6] += Lup[sz(r)] * v[sz(m)] * nnL(r, m, k);
    }
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r) {
        const double kq = nLv(q, k);
        t[4] -= kq * gu_v(r, q) * Flo[sz(r)];
        for (int a = 0; a < n; ++a) {
          t[3] -= kq * gu_v(r, q) * v[sz(a)] * nLv(r, a);
          t[7] -= Lup[sz(r)] * kq * gu_v(a, q) * dF(r, a);
          for (int m = 0; m < n; ++m)
            t[8] -= Lup[sz(r)] * kq * gu_v(a, q) * v[sz(m)] * dnL(r, m, a);
        }
      }
    for (int r = 0; r < n; ++r)
      for (int a = 0; a < n; ++a)
        for (int m = 0; m < n; ++m) {
          const double LL = Lup[sz(r)] * L[sz(a)];
          t[9] -= R(a, r, m, k) * v[sz(m)] * LL;
          for (int c = 0; c < n; ++c) {
            t[11] += gu_v(c, m) * D(a, r, k, c) * Flo[sz(m)] * LL;
            for (int q = 0; q < n; ++q)
              t[10] += gu_v(c, q) * nLv(q, k) * D(a, m, r, c) * v[sz(m)] * LL;
          }
        }
    if (options.flip_beta_term >= 1 && options.flip_beta_term <= 11)
      t[options.flip_beta_term] = -t[options.flip_beta_term];
    double acc = 0.0;
    for (int i = 1; i <= 11; ++i) acc += t[i];
    b.beta[sz(k)] = acc;
  }

  double alpha_L = 0.0;
  for (int a = 0; a < n; ++a) alpha_L += b.alpha[sz(a)] * L[sz(a)];
  b.eta.assign(N, 0.0);
  for (int k = 0; k < n; ++k) b.eta[sz(k)] = b.beta[sz(k)] - Uv[sz(k)] * alpha_L / omega;

  b.A = Matrix::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (int a = 0; a < n; ++a)
      for (int q = 0; q < n; ++q) b.A(r, a) += gu_v(q, r) * dLu(a, q);

  b.B = Matrix(n, n);
  for (int r = 0; r < n; ++r)
    for (int a = 0; a < n; ++a) {
      double acc = -nLu(r, a);
      for (int q = 0; q < n; ++q) {
        acc += gu_v(q, r) * dU(a, q);
        for (int m = 0; m < n; ++m)
          for (int k = 0; k < n; ++k)
            acc += gu_v(q, r) * Lup[sz(k)] * L[sz(m)] * D(m, k, a, q);
        for (int k = 0; k < n; ++k) acc += nLv(k, a) * gu_v(q, k) * dLu(r, q);
        for (int m = 0; m < n; ++m)
          acc += (gu_v(q, m) * dLu(r, q) - gu_v(q, r) * dLu(m, q)) / omega * Uv[sz(a)] *
                 L[sz(m)];
      }
      b.B(r, a) = acc;
    }

  b.C = Matrix(n, n);
  for (int r = 0; r < n; ++r)
    for (int a = 0; a < n; ++a) {
      double acc = nU(a, r);
      for (int q = 0; q < n; ++q)
        for (int k = 0; k < n; ++k) acc -= nLv(q, r) * gu_v(k, q) * dU(a, k);
      for (int m = 0; m < n; ++m) {
        acc -= Uv[sz(a)] * nLu(m, r) * L[sz(m)] / omega;
        for (int q = 0; q < n; ++q) {
          acc -= Uv[sz(r)] * gu_v(q, m) * dU(a, q) * L[sz(m)] / omega;
          for (int k = 0; k < n; ++k)
            acc += Uv[sz(a)] * nLv(k, r) * gu_v(q, k) * dLu(m, q) * L[sz(m)] / omega;
        }
      }
      for (int k = 0; k < n; ++k)
        for (int q = 0; q < n; ++q) {
          const double LL = Lup[sz(k)] * L[sz(q)];
          acc -= R(q, k, r, a) / 2.0 * LL;
          for (int m = 0; m < n; ++m)
            for (int c = 0; c < n; ++c) {
              acc -= gu_v(c, q) * D(m, k, a, c) * Uv[sz(r)] * L[sz(m)] * LL / omega;
              if (options.c_collapsed) {
                acc -= nLv(m, r) * D(q, k, a, c) * gu_v(c, m) * LL;
              } else {
                acc -= 0.5 * nLv(m, r) * D(q, k, a, c) * gu_v(c, m) * LL;
                acc += 0.5 * nLv(m, a) * D(q, k, r, c) * gu_v(c, m) * LL;
              }
            }
        }
      b.C(r, a) = acc;
    }

  b.lambda = n >= 2 ? lambda_scalar(b.B, b.P, n) : 0.0;
  return out;
}

NormalityBundle normality_bundle(const SystemDef& s, const PhasePoint& point,
                                 const VFormOptions& options) {
  if (point.rep == Representation::P) return prep_fields(s, point).bundle;
  return vrep_fields(s, point, options).bundle;
}

const char* residual_name(ResidualId id) noexcept {
  switch (id) {
    case ResidualId::WeakAlpha: return "weak-alpha";
    case ResidualId::WeakEta: return "weak-eta";
    case ResidualId::AddlA: return "addl-A";
    case ResidualId::AddlB: return "addl-B";
    case ResidualId::AddlC: return "addl-C";
  }
  return "?";
}

std::vector<Residual> normality_residuals(const NormalityBundle& b, double tolerance) {
  const int n = b.n;
  if (n < 2) throw InvalidArgument("normality residuals require n >= 2");
  const Matrix& P = b.P;
  std::vector<Residual> out;
  auto push = [&](ResidualId id, double norm, bool decisive) {
    out.push_back({id, norm, tolerance, norm <= tolerance, decisive});
  };

  double wa = 0.0, we = 0.0;
  for (int k = 0; k < n; ++k) {
    double sa = 0.0, se = 0.0;
    for (int r = 0; r < n; ++r) {
      sa += b.alpha[sz(r)] * P(k, r);
      se += b.eta[sz(r)] * P(r, k);
    }
    wa = std::max(wa, std::fabs(sa));
    we = std::max(we, std::fabs(se));
  }
  push(ResidualId::WeakAlpha, wa, true);
  push(ResidualId::WeakEta, we, true);

  const bool decisive = n >= 3;
  const Matrix Aanti = b.A - b.A.transpose();
  push(ResidualId::AddlA, (P * Aanti * P.transpose()).cwiseAbs().maxCoeff(), decisive);
  const Matrix PBP = P * b.B * P;
  push(ResidualId::AddlB, (PBP - b.lambda * P).cwiseAbs().maxCoeff(), decisive);
  const Matrix Canti = b.C - b.C.transpose();
  push(ResidualId::AddlC, (P.transpose() * Canti * P).cwiseAbs().maxCoeff(), decisive);
  return out;
}

std::vector<Residual> normality_residuals(const SystemDef& s, const PhasePoint& point,
                                          double tolerance) {
  return normality_residuals(normality_bundle(s, point), tolerance);
}

ProjectorLaws projector_laws(const NormalityBundle& b, const std::vector<double>& p) {
  const int n = b.n;
  const Matrix& P = b.P;
  ProjectorLaws laws;
  laws.idempotence = (P * P - P).cwiseAbs().maxCoeff();
  laws.trace = std::fabs(P.trace() - (n - 1));
  for (int i = 0; i < n; ++i) {
    double w = 0.0, q = 0.0;
    for (int r = 0; r < n; ++r) {
      w += P(i, r) * b.W[sz(r)];
      q += p[sz(r)] * P(r, i);
    }
    laws.kills_W = std::max(laws.kills_W, std::fabs(w));
    laws.kills_p = std::max(laws.kills_p, std::fabs(q));
  }
  return laws;
}

std::vector<CrossCheck> cross_check_all(const SystemDef& s, const PhasePoint& point,
                                        const VFormOptions& options) {
  PhasePoint v_point = point;
  PhasePoint p_point = point;
  if (point.rep == Representation::V)
    p_point = legendre_forward(s, point);
  else
    v_point = legendre_inverse(s, point).v_point;
  const NormalityBundle pb = prep_fields(s, p_point).bundle;
  const NormalityBundle vb = vrep_fields(s, v_point, options).bundle;
  std::vector<CrossCheck> out;
  for (FieldId id : kAllFields)
    out.push_back({id, relative_deviation(pb.field(id), vb.field(id))});
  return out;
}

double cross_check(const SystemDef& s, const PhasePoint& point, FieldId field,
                   const VFormOptions& options) {
  for (const CrossCheck& c : cross_check_all(s, point, options))
    if (c.field == field) return c.deviation;
  return 0.0;
}

CurvatureRelations curvature_relations(const SystemDef& s, const PhasePoint& v_point) {
  const VRepFields vf = vrep_fields(s, v_point);
  const PhasePoint p_point = legendre_forward(s, v_point);
  const InverseResult inv = legendre_inverse(s, p_point);
  const VPrimitives prim = evaluate_primitives(s, inv.v_point);
  const FieldValue<Jet1> G = connection_p(prim, inv, p_point);
  const Tensor Dp = dynamic_curvature(G);
  const Tensor Rp = curvature_R(G);
  const Tensor Dv_pulled = dynamic_curvature_pullback(vf.D, vf.g_upper);
  const Tensor Rv_pulled = curvature_pullback(vf.R, vf.D, vf.nabla_L, vf.g_upper);
  return {relative_deviation(Dp.data(), Dv_pulled.data()),
          relative_deviation(Rp.data(), Rv_pulled.data())};
}

}  // namespace nlab
