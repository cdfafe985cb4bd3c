#include <doctest.h>

#include <cmath>

#include "normlab/checks.hpp"
#include "normlab/experiments.hpp"
#include "support.hpp"

using namespace nlab;

namespace {

std::vector<Expression> zero_tensor(int n) {
  return std::vector<Expression>(static_cast<std::size_t>(n * n * n), parse("0", n));
}

SystemDef with_gauge(SystemDef s, std::vector<Expression> T) {
  s.T = std::move(T);
  return s;
}

ShiftRun circle_run(const char* nu) {
  ShiftRun run;
  run.surface = {parse_parametric("cos(u1)", 1), parse_parametric("sin(u1)", 1)};
  run.nu = parse_parametric(nu, 1);
  run.u_min = {0.0};
  run.u_max = {6.283185307179586};
  return run;
}

}  // namespace

TEST_CASE("a zero gauge tensor changes nothing") {
  const SystemFile f = support::load("fiber_gamma.sys");
  const SystemDef g = apply_gauge(f.system, zero_tensor(3));
  const PhasePoint v({0.3, -0.2, 0.5}, {0.8, 1.1, 0.9}, Representation::V);
  CHECK(force_vector(g, v) == force_vector(f.system, v));
  const NormalityBundle a = normality_bundle(f.system, v), b = normality_bundle(g, v);
  for (FieldId id : kAllFields) CHECK(support::rel_diff(a.field(id), b.field(id)) < 1e-14);
}

TEST_CASE("applying T and then -T restores the connection values") {
  const SystemFile f = support::load("fiber_gamma.sys");
  const auto T = random_gauge_tensor(3, 5);
  std::vector<Expression> minus;
  for (const Expression& e : T) minus.push_back(-e);
  const SystemDef back = apply_gauge(apply_gauge(f.system, T), minus);
  const PhasePoint v({0.3, -0.2, 0.5}, {0.8, 1.1, 0.9}, Representation::V);
  for (std::size_t i = 0; i < back.Gamma.size(); ++i)
    CHECK(eval_scalar(back.Gamma[i], v) ==
          doctest::Approx(eval_scalar(f.system.Gamma[i], v)).epsilon(1e-14));
  CHECK(support::rel_diff(force_vector(back, v), force_vector(f.system, v)) < 1e-14);
}

TEST_CASE("the gauge shift compensates the force") {
  const SystemFile f = support::load("gauge_given.sys");
  const SystemDef g = apply_gauge(f.system);
  const PhasePoint v({0.3, -0.2}, {0.8, 1.1}, Representation::V);
  const std::vector<double> F0 = force_vector(f.system, v), F1 = force_vector(g, v);
  const double x1 = 0.3, v1 = 0.8, v2 = 1.1;
  const double T111 = 0.2 * x1 + 0.1 * v2;
  const double T212 = 0.3 * v1 * v2;
  std::vector<double> phi0, phi1;
  for (std::size_t i = 0; i < 2; ++i) {
    phi0.push_back(eval_scalar(f.system.Phi[i], v));
    phi1.push_back(eval_scalar(g.Phi[i], v));
  }
  CHECK(F1[0] - phi1[0] - (F0[0] - phi0[0]) == doctest::Approx(T111 * v1 * v1));
  CHECK(F1[1] - phi1[1] - (F0[1] - phi0[1]) == doctest::Approx(2 * T212 * v1 * v2));
  CHECK(phi1 == phi0);
  CHECK(theta_from_phi(g, v) == theta_from_phi(f.system, v));
}

TEST_CASE("missing and asymmetric gauge tensors are rejected") {
  const SystemFile f = support::load("fiber_gamma.sys");
  CHECK_THROWS_AS(apply_gauge(f.system), MissingGaugeTensor);
  auto T = zero_tensor(3);
  T[1] = parse("x1", 3);
  CHECK_THROWS_AS(apply_gauge(f.system, T), AsymmetricGauge);
}

TEST_CASE("constant gauge on the flat system keeps alpha zero") {
  const SystemDef s = make_flat_system(2);
  auto T = zero_tensor(2);
  T[0] = parse("0.7", 2);
  T[1] = T[2] = parse("-0.3", 2);
  const SystemDef g = apply_gauge(s, T);
  const PhasePoint v({0.3, -0.2}, {0.8, 1.1}, Representation::V);
  for (double a : normality_bundle(g, v).alpha) CHECK(a == doctest::Approx(0.0));
}

TEST_CASE("gauge invariants and rules hold at random points") {
  support::Gen g(9);
  for (const char* name : {"fiber_gamma.sys", "cubic.sys", "closed_inverse.sys"}) {
    const SystemFile f = support::load(name);
    const SystemDef s = with_gauge(f.system, random_gauge_tensor(f.system.n, 3));
    std::vector<PhasePoint> pts;
    for (int k = 0; k < 15; ++k)
      pts.push_back(support::random_point(g, f.system.n, Representation::V, 0.5, 1.5));
    const GaugeReport r = gauge_invariance_report(s, pts);
    CHECK(r.points.size() == pts.size());
    for (const GaugeEntry& e : r.worst) {
      if (e.kind == GaugeKind::Invariant) CHECK_MESSAGE(e.deviation < 1e-7, name << " " << e.quantity);
      if (e.kind == GaugeKind::Rule) CHECK_MESSAGE(e.deviation < 1e-6, name << " " << e.quantity);
    }
  }
}

TEST_CASE("residual invariance is decisive only when prerequisite equations hold") {
  NormalityBundle b;
  b.n = 3;
  b.P = Matrix::Identity(3, 3);
  b.W = {1, 0, 0};
  b.alpha = {1, 0, 0};
  b.eta = {0, 0, 0};
  b.A = Matrix::Zero(3, 3);
  b.B = Matrix::Zero(3, 3);
  b.C = Matrix::Zero(3, 3);
  const auto entries = residual_invariance(b, b);
  for (const GaugeEntry& e : entries) {
    CHECK(e.deviation == 0.0);
    if (e.quantity == "weak-alpha") CHECK(e.decisive);
    if (e.quantity == "weak-eta") CHECK_FALSE(e.decisive);
  }
}

TEST_CASE("connection-free mode zeroes the connection") {
  const SystemFile f = support::load("fiber_gamma.sys");
  const SystemDef s = connection_free_mode(f.system);
  for (const Expression& e : s.Gamma) CHECK(e.is_zero_literal());
  const PhasePoint v({0.3, -0.2, 0.5}, {0.8, 1.1, 0.9}, Representation::V);
  std::vector<double> phi;
  for (const Expression& e : s.Phi) phi.push_back(eval_scalar(e, v));
  CHECK(force_vector(s, v) == phi);
}

TEST_CASE("hypersurface normals") {
  ShiftRun line;
  line.surface = {parse_parametric("u1", 1), parse_parametric("0", 1)};
  const auto n0 = hypersurface_normal(line, {0.4});
  CHECK(n0[0] == doctest::Approx(0.0));
  CHECK(n0[1] == doctest::Approx(1.0));

  const ShiftRun circle = circle_run("1");
  for (double u : {0.0, 0.7, 2.5, 4.0}) {
    const auto n = hypersurface_normal(circle, {u});
    CHECK(std::fabs(n[0] * std::cos(u) + n[1] * std::sin(u)) == doctest::Approx(1.0));
  }

  ShiftRun patch;
  patch.surface = {parse_parametric("u1 + 0.3*u2^2", 2), parse_parametric("sin(u2)", 2),
                   parse_parametric("u1*u2 + cos(u1)", 2)};
  support::Gen g(12);
  for (int k = 0; k < 10; ++k) {
    const std::vector<double> u = {g.uniform(-1, 1), g.uniform(-1, 1)};
    const auto n = hypersurface_normal(patch, u);
    double norm = 0.0;
    for (double c : n) norm += c * c;
    CHECK(norm == doctest::Approx(1.0));
    for (int j = 0; j < 2; ++j) {
      const double h = 1e-6;
      std::vector<double> up = u, um = u;
      up[static_cast<std::size_t>(j)] += h;
      um[static_cast<std::size_t>(j)] -= h;
      double dot = 0.0;
      for (std::size_t i = 0; i < 3; ++i)
        dot += n[i] * (eval_parametric(patch.surface[i], up) -
                       eval_parametric(patch.surface[i], um)) /
               (2 * h);
      CHECK(std::fabs(dot) < 1e-8);
    }
  }

  ShiftRun pinched;
  pinched.surface = {parse_parametric("u1^2", 1), parse_parametric("u1^3", 1)};
  CHECK_THROWS_AS(hypersurface_normal(pinched, {0.0}), DegenerateSurface);
}

TEST_CASE("geodesic shift of a line stays normal") {
  ShiftRun run;
  run.surface = {parse_parametric("u1", 1), parse_parametric("0.2", 1)};
  run.nu = parse_parametric("0.8", 1);
  run.u_min = {-1.0};
  run.u_max = {1.0};
  run.samples = 8;
  const ShiftTrace t = shift_integrate(make_flat_system(2), run);
  CHECK(t.times.size() == 11);
  for (double d : t.deviation) CHECK(d < 1e-8);
}

TEST_CASE("geodesic shift of the circle stays normal") {
  const ShiftTrace t = shift_integrate(make_flat_system(2), circle_run("-1"));
  CHECK(t.deviation.front() < 1e-10);
  for (double d : t.deviation) CHECK(d < 1e-6);
}

TEST_CASE("a non-normal system loses collinearity") {
  SystemDef s = make_flat_system(2);
  s.Phi = {parse("x2*v1^2", 2), parse("0.5*x1*v1*v2", 2)};
  const PhasePoint p({0.3, 0.6}, {0.9, 0.7}, Representation::P);
  double worst = 0.0;
  for (const Residual& r : normality_residuals(s, p))
    if (r.decisive) worst = std::max(worst, r.norm);
  REQUIRE(worst > 1e-3);
  const ShiftTrace t = shift_integrate(s, circle_run("-1 + 0.3*sin(u1)"));
  CHECK(t.deviation.front() < 1e-10);
  CHECK(t.deviation.back() > 1e-2);
}
