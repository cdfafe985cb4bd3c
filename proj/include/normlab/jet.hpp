#pragma once

// Second-order forward-mode differentiation over the 2n phase variables
// (x1..xn, fiber1..fibern), plus the first-order jets used for derived
// fields whose own derivatives are needed once more.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "normlab/expr.hpp"
#include "normlab/expr_eval.hpp"

namespace nlab {

// First-order tangent number. Used as the coefficient type of jets when one
// extra directional derivative is needed (Legendre maps built from a
// Lagrangian).
struct Dual {
  double v = 0.0;
  double d = 0.0;

  Dual() = default;
  Dual(double value, double tangent = 0.0) : v(value), d(tangent) {}

  Dual operator-() const { return {-v, -d}; }
  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(const Dual& a, const Dual& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d};
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
  }
  friend bool operator==(const Dual& a, const Dual& b) {
    return a.v == b.v && a.d == b.d;
  }
};

namespace jetmath {

inline double primal(double a) { return a; }
inline double primal(const Dual& a) { return a.v; }
inline bool is_zero(double a) { return a == 0.0; }
inline bool is_zero(const Dual& a) { return a.v == 0.0 && a.d == 0.0; }

inline double sin(double a) { return std::sin(a); }
inline double cos(double a) { return std::cos(a); }
inline double exp(double a) { return std::exp(a); }
inline double log(double a) { return std::log(a); }
inline double sqrt(double a) { return std::sqrt(a); }
inline double tanh(double a) { return std::tanh(a); }
inline double pow(double a, double b) { return std::pow(a, b); }

inline Dual sin(const Dual& a) { return {std::sin(a.v), std::cos(a.v) * a.d}; }
inline Dual cos(const Dual& a) { return {std::cos(a.v), -std::sin(a.v) * a.d}; }
inline Dual exp(const Dual& a) {
  const double e = std::exp(a.v);
  return {e, e * a.d};
}
inline Dual log(const Dual& a) { return {std::log(a.v), a.d / a.v}; }
inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}
inline Dual tanh(const Dual& a) {
  const double t = std::tanh(a.v);
  return {t, (1.0 - t * t) * a.d};
}
// Real exponent, constant along the tangent direction.
inline Dual pow(const Dual& a, double b) {
  return {std::pow(a.v, b), b * std::pow(a.v, b - 1.0) * a.d};
}

template <class T>
T ipow(const T& a, int k) {
  if (k < 0) return T(1.0) / ipow(a, -k);
  T result(1.0);
  T base = a;
  while (k > 0) {
    if (k & 1) result = result * base;
    base = base * base;
    k >>= 1;
  }
  return result;
}

}  // namespace jetmath

// Value, gradient and (exactly symmetric) Hessian of a scalar function of
// `size()` variables. Hessian stored dense, row-major.
template <class T>
struct BasicJet2 {
  T value{};
  std::vector<T> gradient;
  std::vector<T> hessian;

  BasicJet2() = default;
  explicit BasicJet2(std::size_t vars, T v = T{})
      : value(v), gradient(vars, T{}), hessian(vars * vars, T{}) {}

  static BasicJet2 constant(std::size_t vars, T v) { return BasicJet2(vars, v); }
  static BasicJet2 variable(std::size_t vars, std::size_t index, T v) {
    BasicJet2 j(vars, v);
    j.gradient[index] = T(1.0);
    return j;
  }

  std::size_t size() const noexcept { return gradient.size(); }
  const T& hess(std::size_t i, std::size_t j) const {
    return hessian[i * size() + j];
  }
  T& hess(std::size_t i, std::size_t j) { return hessian[i * size() + j]; }

  bool is_constant() const {
    for (const T& g : gradient)
      if (!jetmath::is_zero(g)) return false;
    for (const T& h : hessian)
      if (!jetmath::is_zero(h)) return false;
    return true;
  }

  BasicJet2 operator-() const {
    BasicJet2 r(*this);
    r.value = -r.value;
    for (T& g : r.gradient) g = -g;
    for (T& h : r.hessian) h = -h;
    return r;
  }

  BasicJet2& operator+=(const BasicJet2& o) {
    value += o.value;
    for (std::size_t i = 0; i < gradient.size(); ++i) gradient[i] += o.gradient[i];
    for (std::size_t i = 0; i < hessian.size(); ++i) hessian[i] += o.hessian[i];
    return *this;
  }
  BasicJet2& operator-=(const BasicJet2& o) {
    value -= o.value;
    for (std::size_t i = 0; i < gradient.size(); ++i) gradient[i] -= o.gradient[i];
    for (std::size_t i = 0; i < hessian.size(); ++i) hessian[i] -= o.hessian[i];
    return *this;
  }
  friend BasicJet2 operator+(BasicJet2 a, const BasicJet2& b) { return a += b; }
  friend BasicJet2 operator-(BasicJet2 a, const BasicJet2& b) { return a -= b; }

  friend BasicJet2 operator*(const BasicJet2& a, const BasicJet2& b) {
    const std::size_t n = a.size();
    BasicJet2 r(n, a.value * b.value);
    for (std::size_t i = 0; i < n; ++i)
      r.gradient[i] = a.value * b.gradient[i] + b.value * a.gradient[i];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        T h = a.value * b.hess(i, j) + b.value * a.hess(i, j) +
              a.gradient[i] * b.gradient[j] + b.gradient[i] * a.gradient[j];
        r.hess(i, j) = h;
        r.hess(j, i) = h;
      }
    }
    return r;
  }

  // f(a) given f, f' and f'' evaluated at a.value.
  friend BasicJet2 chain(const BasicJet2& a, T f0, T f1, T f2) {
    const std::size_t n = a.size();
    BasicJet2 r(n, f0);
    for (std::size_t i = 0; i < n; ++i) r.gradient[i] = f1 * a.gradient[i];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        T h = f1 * a.hess(i, j) + f2 * a.gradient[i] * a.gradient[j];
        r.hess(i, j) = h;
        r.hess(j, i) = h;
      }
    }
    return r;
  }
};

using Jet2 = BasicJet2<double>;

template <class T>
BasicJet2<T> reciprocal(const BasicJet2<T>& b) {
  if (jetmath::primal(b.value) == 0.0) throw EvalError("division by zero");
  const T inv = T(1.0) / b.value;
  return chain(b, inv, -(inv * inv), T(2.0) * inv * inv * inv);
}

template <class T>
BasicJet2<T> elementary(Func f, const BasicJet2<T>& a) {
  using namespace jetmath;
  const T& x = a.value;
  switch (f) {
    case Func::Sin: {
      const T s = sin(x);
      const T c = cos(x);
      return chain(a, s, c, -s);
    }
    case Func::Cos: {
      const T s = sin(x);
      const T c = cos(x);
      return chain(a, c, -s, -c);
    }
    case Func::Exp: {
      const T e = exp(x);
      return chain(a, e, e, e);
    }
    case Func::Ln: {
      if (!(primal(x) > 0.0)) throw EvalError("ln of non-positive value");
      const T inv = T(1.0) / x;
      return chain(a, log(x), inv, -(inv * inv));
    }
    case Func::Sqrt: {
      if (!(primal(x) > 0.0)) {
        if (primal(x) == 0.0 && a.is_constant()) return a;
        throw EvalError(primal(x) < 0.0 ? "sqrt of negative value"
                                        : "sqrt not differentiable at 0");
      }
      const T s = sqrt(x);
      const T d1 = T(0.5) / s;
      return chain(a, s, d1, -(d1 / (T(2.0) * x)));
    }
    case Func::Tanh: {
      const T t = tanh(x);
      const T d1 = T(1.0) - t * t;
      return chain(a, t, d1, T(-2.0) * t * d1);
    }
  }
  return a;
}

template <class T>
BasicJet2<T> power(const BasicJet2<T>& a, const BasicJet2<T>& b) {
  using namespace jetmath;
  const double base = primal(a.value);
  const double expo = primal(b.value);
  if (b.is_constant()) {
    if (scalar::is_integer(expo) && std::fabs(expo) < 1e9) {
      const int k = static_cast<int>(expo);
      if (k == 0) return BasicJet2<T>::constant(a.size(), T(1.0));
      if (k < 0 && base == 0.0) throw EvalError("division by zero");
      const T f0 = ipow(a.value, k);
      const T f1 = T(static_cast<double>(k)) * ipow(a.value, k - 1);
      const T f2 = k == 1 ? T(0.0)
                          : T(static_cast<double>(k) * (k - 1)) *
                                ipow(a.value, k - 2);
      return chain(a, f0, f1, f2);
    }
    if (!(base > 0.0)) {
      if (base < 0.0) throw EvalError("non-integer power of negative base");
      throw EvalError("non-integer power of zero is not differentiable");
    }
    return chain(a, jetmath::pow(a.value, expo),
                 T(expo) * jetmath::pow(a.value, expo - 1.0),
                 T(expo * (expo - 1.0)) * jetmath::pow(a.value, expo - 2.0));
  }
  if (!(base > 0.0))
    throw EvalError("variable exponent requires a positive base");
  return elementary(Func::Exp, b * elementary(Func::Ln, a));
}

template <class T>
struct ScalarOps<BasicJet2<T>> {
  static BasicJet2<T> call(Func f, const BasicJet2<T>& a) {
    return elementary(f, a);
  }
  static BasicJet2<T> divide(const BasicJet2<T>& a, const BasicJet2<T>& b) {
    return a * reciprocal(b);
  }
  static BasicJet2<T> power(const BasicJet2<T>& a, const BasicJet2<T>& b) {
    return nlab::power(a, b);
  }
};

// Value and gradient only.
struct Jet1 {
  double value = 0.0;
  std::vector<double> gradient;

  Jet1() = default;
  explicit Jet1(std::size_t vars, double v = 0.0) : value(v), gradient(vars, 0.0) {}
  static Jet1 variable(std::size_t vars, std::size_t index, double v) {
    Jet1 j(vars, v);
    j.gradient[index] = 1.0;
    return j;
  }

  std::size_t size() const noexcept { return gradient.size(); }

  Jet1 operator-() const {
    Jet1 r(*this);
    r.value = -r.value;
    for (double& g : r.gradient) g = -g;
    return r;
  }
  Jet1& operator+=(const Jet1& o) {
    value += o.value;
    for (std::size_t i = 0; i < gradient.size(); ++i) gradient[i] += o.gradient[i];
    return *this;
  }
  Jet1& operator-=(const Jet1& o) {
    value -= o.value;
    for (std::size_t i = 0; i < gradient.size(); ++i) gradient[i] -= o.gradient[i];
    return *this;
  }
  Jet1& operator*=(double s) {
    value *= s;
    for (double& g : gradient) g *= s;
    return *this;
  }
  // this += a * b
  void add_product(const Jet1& a, const Jet1& b) {
    value += a.value * b.value;
    for (std::size_t i = 0; i < gradient.size(); ++i)
      gradient[i] += a.value * b.gradient[i] + b.value * a.gradient[i];
  }
  // this += a * b * c
  void add_product(const Jet1& a, const Jet1& b, const Jet1& c) {
    const double ab = a.value * b.value;
    value += ab * c.value;
    for (std::size_t i = 0; i < gradient.size(); ++i)
      gradient[i] += ab * c.gradient[i] +
                     c.value * (a.value * b.gradient[i] + b.value * a.gradient[i]);
  }
  friend Jet1 operator+(Jet1 a, const Jet1& b) { return a += b; }
  friend Jet1 operator-(Jet1 a, const Jet1& b) { return a -= b; }
  friend Jet1 operator*(Jet1 a, double s) { return a *= s; }
  friend Jet1 operator*(double s, Jet1 a) { return a *= s; }
  friend Jet1 operator*(const Jet1& a, const Jet1& b) {
    Jet1 r(a.size());
    r.add_product(a, b);
    return r;
  }
};

// d/dz_a of a jet, as a jet of one order lower.
Jet1 partial(const Jet2& j, std::size_t a);
inline double partial(const Jet1& j, std::size_t a) { return j.gradient[a]; }

// Drop the highest-order part.
Jet1 demote(const Jet2& j);
inline double demote(const Jet1& j) { return j.value; }
inline double demote(double v) { return v; }

// Chain rule for a change of variables y = y(z): `f` is a jet in y and
// `dy_dz` is the Jacobian (rows: y, columns: z). The value is kept.
Jet1 compose(const Jet1& f, std::span<const std::vector<double>> dy_dz);

// Full second-order composition: `f` is a jet in y, `y` lists the jets of the
// y-coordinates as functions of z.
Jet2 compose(const Jet2& f, std::span<const Jet2> y);

// Jet of `e` at `point`; gradient/hessian are w.r.t. (x1..xn, fiber1..fibern).
Jet2 eval_jet(const Expression& e, const PhasePoint& point);

enum class JetOp { Add, Sub, Mul, Div, Pow };
Jet2 jet_arithmetic(const Jet2& a, const Jet2& b, JetOp op);

}  // namespace nlab
