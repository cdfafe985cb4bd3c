#include <doctest.h>

#include <cmath>

#include "normlab/calculus.hpp"
#include "support.hpp"

using namespace nlab;

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

FieldValue<Jet2> field(const std::vector<Expression>& comps, int upper, int lower,
                       const PhasePoint& pt) {
  std::vector<Jet2> jets;
  for (const Expression& e : comps) jets.push_back(eval_jet(e, pt));
  return FieldValue<Jet2>(pt.dimension(), upper, lower, pt.rep, pt, std::move(jets));
}

std::vector<Expression> parse_all(const std::vector<std::string>& src, int n) {
  std::vector<Expression> out;
  for (const std::string& s : src) out.push_back(parse(s, n));
  return out;
}

// ∂e/∂(coordinate a) by central differences.
double fd(const Expression& e, const PhasePoint& pt, int a, double h = 1e-6) {
  return (eval_scalar(e, support::shifted(pt, a, h)) - eval_scalar(e, support::shifted(pt, a, -h))) /
         (2 * h);
}

// Γ^k_ij as a function of (x, p) through the inverse Legendre map.
double gamma_p(const SystemDef& s, int k, int i, int j, const PhasePoint& p) {
  return eval_scalar(s.Gamma[s.gamma_index(k, i, j)], legendre_inverse(s, p).v_point);
}

double gamma_p_fd(const SystemDef& s, int k, int i, int j, const PhasePoint& p, int a) {
  const double h = 1e-6;
  return (gamma_p(s, k, i, j, support::shifted(p, a, h)) -
          gamma_p(s, k, i, j, support::shifted(p, a, -h))) /
         (2 * h);
}

}  // namespace

TEST_CASE("vertical derivative in the v-representation matches finite differences") {
  const PhasePoint pt({0.2, -0.4}, {0.7, 1.3}, Representation::V);
  const auto comps = parse_all({"x1*v1^2 + sin(v2)", "exp(x2*v1)*v2"}, 2);
  const FieldValue<Jet1> d = vertical_derivative(field(comps, 1, 0, pt));
  CHECK(d.upper == 1);
  CHECK(d.lower == 1);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      CHECK(d(i, k).value == doctest::Approx(fd(comps[sz(i)], pt, 2 + k)).epsilon(1e-8));
}

TEST_CASE("vertical derivative in the p-representation appends an upper index") {
  const PhasePoint pt({0.2, -0.4}, {0.7, 1.3}, Representation::P);
  const auto comps = parse_all({"x1*p1^2 + p2", "p1*p2*x2"}, 2);
  const FieldValue<Jet1> d = vertical_derivative(field(comps, 0, 1, pt));
  CHECK(d.upper == 1);
  CHECK(d.lower == 1);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      CHECK(d(k, j).value == doctest::Approx(fd(comps[sz(j)], pt, 2 + k)).epsilon(1e-8));
}

TEST_CASE("second vertical derivative needs jets") {
  const PhasePoint pt({0.2}, {0.7}, Representation::V);
  const FieldValue<Jet1> d = vertical_derivative(field(parse_all({"v1^3"}, 1), 0, 0, pt));
  const FieldValue<double> dd = vertical_derivative(d);
  CHECK(dd(0, 0) == doctest::Approx(6 * 0.7));
  CHECK_THROWS_AS(vertical_derivative(dd), MissingJets);
}

TEST_CASE("fiber derivative of the Legendre map is the metric") {
  const SystemFile f = support::load("fiber_gamma.sys");
  const PhasePoint pt({0.2, -0.4, 0.1}, {0.7, 1.3, -0.5}, Representation::V);
  const FieldValue<Jet1> d = vertical_derivative(field(f.system.L.expressions(), 0, 1, pt));
  const MetricPair m = metric(f.system, pt);
  for (int q = 0; q < 3; ++q)
    for (int k = 0; k < 3; ++k) CHECK(d(q, k).value == doctest::Approx(m.g_lower(q, k)));
}

TEST_CASE("horizontal derivative of a v-representation vector field") {
  const SystemFile f = support::load("fiber_gamma.sys");
  const SystemDef& s = f.system;
  const PhasePoint pt({0.2, -0.4, 0.1}, {0.7, 1.3, -0.5}, Representation::V);
  const auto X = parse_all({"x1*v2 + v3^2", "sin(x2)*v1", "x3*x1 + v1*v2"}, 3);
  const FieldValue<Jet1> nabla =
      horizontal_derivative(field(X, 1, 0, pt), connection_v(evaluate_primitives(s, pt)));
  auto G = [&](int k, int i, int j) { return eval_scalar(s.Gamma[s.gamma_index(k, i, j)], pt); };
  for (int i = 0; i < 3; ++i) {
    for (int m = 0; m < 3; ++m) {
      double expect = fd(X[sz(i)], pt, m);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          expect -= pt.fiber[sz(a)] * G(b, a, m) * fd(X[sz(i)], pt, 3 + b);
      for (int a = 0; a < 3; ++a) expect += G(i, m, a) * eval_scalar(X[sz(a)], pt);
      CHECK(nabla(i, m).value == doctest::Approx(expect).epsilon(1e-8));
    }
  }
}

TEST_CASE("horizontal derivative of a p-representation covector field") {
  const auto gamma_src = parse_all({"0.3*x2", "0.1*x1*x2", "0.1*x1*x2", "x1^2",
                                    "0.5", "x2", "x2", "-0.2*x1"},
                                   2);
  const PhasePoint pt({0.4, -0.3}, {0.8, 1.1}, Representation::P);
  std::vector<Jet1> gjets;
  for (const Expression& e : gamma_src) gjets.push_back(demote(eval_jet(e, pt)));
  const FieldValue<Jet1> gamma(2, 1, 2, Representation::P, pt, gjets);
  auto G = [&](int k, int i, int j) { return eval_scalar(gamma_src[sz((k * 2 + i) * 2 + j)], pt); };
  const auto X = parse_all({"x1*p2^2", "p1*exp(x2)"}, 2);
  const FieldValue<Jet1> nabla = horizontal_derivative(field(X, 0, 1, pt), gamma);
  for (int j = 0; j < 2; ++j) {
    for (int m = 0; m < 2; ++m) {
      double expect = fd(X[sz(j)], pt, m);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          expect += pt.fiber[sz(a)] * G(a, m, b) * fd(X[sz(j)], pt, 2 + b);
      for (int b = 0; b < 2; ++b) expect -= G(b, m, j) * eval_scalar(X[sz(b)], pt);
      CHECK(nabla(j, m).value == doctest::Approx(expect).epsilon(1e-8));
    }
  }
}

TEST_CASE("horizontal derivative obeys the product rule") {
  const SystemFile f = support::load("fiber_gamma.sys");
  const PhasePoint pt({0.2, -0.4, 0.1}, {0.7, 1.3, -0.5}, Representation::V);
  const FieldValue<Jet1> gamma = connection_v(evaluate_primitives(f.system, pt));
  const auto a = parse_all({"x1*v2 + v3^2"}, 3);
  const auto b = parse_all({"sin(x2)*v1 + x3"}, 3);
  const auto ab = parse_all({"(x1*v2 + v3^2)*(sin(x2)*v1 + x3)"}, 3);
  const auto na = horizontal_derivative(field(a, 0, 0, pt), gamma);
  const auto nb = horizontal_derivative(field(b, 0, 0, pt), gamma);
  const auto nab = horizontal_derivative(field(ab, 0, 0, pt), gamma);
  const double va = eval_scalar(a[0], pt), vb = eval_scalar(b[0], pt);
  for (int m = 0; m < 3; ++m)
    CHECK(nab(m).value == doctest::Approx(na(m).value * vb + va * nb(m).value));
}

TEST_CASE("dynamic curvature vanishes for a fiber-independent connection") {
  SystemDef s = make_flat_system(2);
  s.Gamma[s.gamma_index(0, 0, 1)] = parse("x1*x2", 2);
  s.Gamma[s.gamma_index(0, 1, 0)] = parse("x1*x2", 2);
  s.Gamma[s.gamma_index(1, 1, 1)] = parse("sin(x1)", 2);
  const PhasePoint v({0.3, 0.6}, {1.0, -0.5}, Representation::V);
  CHECK(dynamic_curvature(s, v).max_abs() == 0.0);
  CHECK(dynamic_curvature(s, legendre_forward(s, v)).max_abs() == 0.0);
}

TEST_CASE("dynamic curvature of a linear one-dimensional connection") {
  SystemDef s = make_flat_system(1);
  s.Gamma[0] = parse("v1", 1);
  const PhasePoint v({0.3}, {0.8}, Representation::V);
  CHECK(dynamic_curvature(s, v)(0, 0, 0, 0) == doctest::Approx(-1.0));
  CHECK(dynamic_curvature(s, legendre_forward(s, v))(0, 0, 0, 0) == doctest::Approx(-1.0));
}

TEST_CASE("dynamic curvature matches finite differences in both representations") {
  const SystemFile f = support::load("fiber_gamma.sys");
  const SystemDef& s = f.system;
  const PhasePoint v({0.2, -0.4, 0.1}, {0.7, 1.3, -0.5}, Representation::V);
  const PhasePoint p = legendre_forward(s, v);
  const Tensor Dv = dynamic_curvature(s, v);
  const Tensor Dp = dynamic_curvature(s, p);
  for (int k = 0; k < 3; ++k)
    for (int r = 0; r < 3; ++r)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          CHECK(Dv(k, r, i, j) ==
                doctest::Approx(-fd(s.Gamma[s.gamma_index(k, i, r)], v, 3 + j)).epsilon(1e-8));
          CHECK(Dp(k, r, i, j) ==
                doctest::Approx(-gamma_p_fd(s, k, i, j, p, 3 + r)).epsilon(1e-6));
        }
}

TEST_CASE("curvature of a constant connection is the quadratic loop") {
  support::Gen g(21);
  SystemDef s = make_flat_system(3);
  std::vector<double> G(27);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        const double c = std::stod(std::to_string(g.uniform(-1, 1)));
        G[sz((k * 3 + i) * 3 + j)] = G[sz((k * 3 + j) * 3 + i)] = c;
        s.Gamma[s.gamma_index(k, i, j)] = s.Gamma[s.gamma_index(k, j, i)] =
            parse(std::to_string(c), 3);
      }
  auto at = [&](int k, int i, int j) { return G[sz((k * 3 + i) * 3 + j)]; };
  const PhasePoint v({0.1, 0.2, 0.3}, {0.5, 0.6, 0.7}, Representation::V);
  const Tensor R = curvature_R(s, v);
  for (int k = 0; k < 3; ++k)
    for (int r = 0; r < 3; ++r)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double expect = 0.0;
          for (int m = 0; m < 3; ++m) expect += at(k, i, m) * at(m, j, r) - at(k, j, m) * at(m, i, r);
          CHECK(R(k, r, i, j) == doctest::Approx(expect).epsilon(1e-9));
          CHECK(R(k, r, i, j) == doctest::Approx(-R(k, r, j, i)));
        }
}

TEST_CASE("curvature with fiber-dependent connection matches finite differences") {
  const SystemFile f = support::load("fiber_gamma.sys");
  const SystemDef& s = f.system;
  const PhasePoint v({0.2, -0.4, 0.1}, {0.7, 1.3, -0.5}, Representation::V);
  const PhasePoint p = legendre_forward(s, v);
  const Tensor Rv = curvature_R(s, v);
  const Tensor Rp = curvature_R(s, p);
  auto G = [&](int k, int i, int j) { return eval_scalar(s.Gamma[s.gamma_index(k, i, j)], v); };
  auto dG = [&](int k, int i, int j, int a) { return fd(s.Gamma[s.gamma_index(k, i, j)], v, a); };
  for (int k = 0; k < 3; ++k)
    for (int r = 0; r < 3; ++r)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double ev = dG(k, j, r, i) - dG(k, i, r, j);
          double ep = gamma_p_fd(s, k, j, r, p, i) - gamma_p_fd(s, k, i, r, p, j);
          for (int m = 0; m < 3; ++m) {
            const double quad = G(k, i, m) * G(m, j, r) - G(k, j, m) * G(m, i, r);
            ev += quad;
            ep += quad;
            for (int q = 0; q < 3; ++q) {
              ev -= v.fiber[sz(q)] * G(m, i, q) * dG(k, j, r, 3 + m);
              ev += v.fiber[sz(q)] * G(m, j, q) * dG(k, i, r, 3 + m);
              ep += p.fiber[sz(q)] * G(q, m, i) * gamma_p_fd(s, k, j, r, p, 3 + m);
              ep -= p.fiber[sz(q)] * G(q, m, j) * gamma_p_fd(s, k, i, r, p, 3 + m);
            }
          }
          CHECK(Rv(k, r, i, j) == doctest::Approx(ev).epsilon(1e-7));
          CHECK(Rp(k, r, i, j) == doctest::Approx(ep).epsilon(1e-6));
        }
}

TEST_CASE("transport identities hold for random fields") {
  support::Gen g(8);
  for (const char* name : {"cubic.sys", "fiber_gamma.sys", "anisotropic.sys", "closed_inverse.sys"}) {
    const SystemFile f = support::load(name);
    const int n = f.system.n;
    for (int k = 0; k < 6; ++k) {
      const int upper = k % 2;
      const int count = upper == 0 ? 1 : n;
      std::vector<Expression> fv, fp;
      for (int c = 0; c < count; ++c) {
        fv.push_back(parse(support::random_expression(g, n, 'v', 3), n));
        fp.push_back(parse(support::random_expression(g, n, 'p', 3), n));
      }
      const PhasePoint v = support::random_point(g, n, Representation::V, -1.0, 1.0);
      const TransportDeviations t = transport_identities(f.system, v, fv, fp, upper);
      CHECK(t.max() < 1e-7);
    }
  }
}

TEST_CASE("base derivatives differ between representations") {
  const SystemFile f = support::load("fiber_gamma.sys");
  const PhasePoint v({0.2, -0.4, 0.1}, {0.7, 1.3, -0.5}, Representation::V);
  const auto fv = parse_all({"x1*v2^2 + v3"}, 3);
  const auto fp = parse_all({"x2*p1 + p3^2"}, 3);
  const TransportDeviations t = transport_identities(f.system, v, fv, fp, 0);
  CHECK(t.max() < 1e-9);
  const PhasePoint p = legendre_forward(f.system, v);
  const double naive = fd(fv[0], v, 0);
  const auto Xp = [&](const PhasePoint& q) {
    return eval_scalar(fv[0], legendre_inverse(f.system, q).v_point);
  };
  const double h = 1e-6;
  const double through_p =
      (Xp(support::shifted(p, 0, h)) - Xp(support::shifted(p, 0, -h))) / (2 * h);
  CHECK(std::fabs(naive - through_p) > 1e-3);
}
