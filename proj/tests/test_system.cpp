#include <doctest.h>

#include <cmath>

#include "normlab/system.hpp"
#include "support.hpp"

using namespace nlab;

namespace {

// Root of v + 0.1 v³ = p by bisection.
double cubic_root(double p) {
  double lo = -20.0, hi = 20.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid + 0.1 * mid * mid * mid < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string message_of(const std::string& fixture) {
  try {
    support::load(fixture);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("flat system is the identity") {
  const SystemDef s = make_flat_system(3);
  const PhasePoint v({0.1, 0.2, 0.3}, {1.0, -2.0, 0.5}, Representation::V);
  const PhasePoint p = legendre_forward(s, v);
  CHECK(p.rep == Representation::P);
  CHECK(p.fiber == v.fiber);
  const MetricPair m = metric(s, v);
  CHECK(m.deviation == 0.0);
  CHECK((m.g_lower - Matrix::Identity(3, 3)).norm() == 0.0);
  CHECK(force_vector(s, v) == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("Newton inverse matches the bisection root of the cubic map") {
  const SystemFile f = support::load("cubic.sys");
  support::Gen g(3);
  for (int k = 0; k < 30; ++k) {
    const PhasePoint p = support::random_point(g, 3, Representation::P, -3.0, 3.0);
    const InverseResult inv = legendre_inverse(f.system, p);
    CHECK(inv.newton);
    for (int i = 0; i < 3; ++i)
      CHECK(inv.v_point.fiber[static_cast<std::size_t>(i)] ==
            doctest::Approx(cubic_root(p.fiber[static_cast<std::size_t>(i)])).epsilon(1e-12));
  }
}

TEST_CASE("closed-form inverse agrees with Newton") {
  const SystemFile f = support::load("closed_inverse.sys");
  support::Gen g(4);
  for (int k = 0; k < 20; ++k) {
    const PhasePoint p = support::random_point(g, 2, Representation::P, -2.0, 2.0);
    const InverseResult a = legendre_inverse(f.system, p);
    const InverseResult b = legendre_inverse_newton(f.system, p);
    CHECK_FALSE(a.newton);
    CHECK(a.iterations == 0);
    CHECK(support::rel_diff(a.v_point.fiber, b.v_point.fiber) < 1e-12);
    CHECK(support::rel_diff(a.y[2].gradient, b.y[2].gradient) < 1e-10);
    CHECK(support::rel_diff(a.y[3].hessian, b.y[3].hessian) < 1e-8);
  }
}

TEST_CASE("inverse jets reproduce finite differences of the inverse map") {
  const SystemFile f = support::load("fiber_gamma.sys");
  const PhasePoint p({0.2, -0.3, 0.4}, {0.9, 1.1, -0.7}, Representation::P);
  const InverseResult inv = legendre_inverse(f.system, p);
  const double h = 1e-6;
  for (int a = 0; a < 6; ++a) {
    const auto plus = legendre_inverse(f.system, support::shifted(p, a, h)).v_point.fiber;
    const auto minus = legendre_inverse(f.system, support::shifted(p, a, -h)).v_point.fiber;
    for (int q = 0; q < 3; ++q) {
      const double fd = (plus[static_cast<std::size_t>(q)] - minus[static_cast<std::size_t>(q)]) /
                        (2 * h);
      CHECK(inv.V[static_cast<std::size_t>(q)].gradient[static_cast<std::size_t>(a)] ==
            doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("Lagrangian Legendre map is the fiber gradient") {
  const SystemFile f = support::load("anisotropic.sys");
  REQUIRE(f.system.L.is_lagrangian());
  const Expression& lag = *f.system.L.lagrangian();
  support::Gen g(5);
  for (int k = 0; k < 10; ++k) {
    const PhasePoint v = support::random_point(g, 2, Representation::V, -1.5, 1.5);
    const std::vector<double> grad = support::fd_gradient(lag, v);
    const std::vector<double> L = f.system.L.values(v);
    CHECK(L[0] == doctest::Approx(grad[2]).epsilon(1e-8));
    CHECK(L[1] == doctest::Approx(grad[3]).epsilon(1e-8));
    const std::vector<double> H = support::fd_hessian(lag, v);
    const MetricPair m = metric(f.system, v);
    for (int q = 0; q < 2; ++q)
      for (int r = 0; r < 2; ++r)
        CHECK(m.g_lower(q, r) ==
              doctest::Approx(H[static_cast<std::size_t>((2 + q) * 4 + 2 + r)]).epsilon(1e-6));
    CHECK(m.deviation < 1e-12);
  }
}

TEST_CASE("Theta is the time derivative of L along the free flow") {
  const SystemFile f = support::load("fiber_gamma.sys");
  const SystemDef& s = f.system;
  const PhasePoint v({0.3, -0.5, 0.2}, {0.8, 1.2, -0.6}, Representation::V);
  const std::vector<double> theta = theta_from_phi(s, v);
  std::vector<double> phi;
  for (const Expression& e : s.Phi) phi.push_back(eval_scalar(e, v));
  const double h = 1e-6;
  auto moved = [&](double t) {
    PhasePoint q = v;
    for (std::size_t i = 0; i < 3; ++i) {
      q.x[i] += t * v.fiber[i];
      q.fiber[i] += t * phi[i];
    }
    return s.L.values(q);
  };
  const auto plus = moved(h), minus = moved(-h);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(theta[i] == doctest::Approx((plus[i] - minus[i]) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("force vector adds the quadratic connection term") {
  const SystemFile f = support::load("fiber_gamma.sys");
  const SystemDef& s = f.system;
  const PhasePoint v({0.3, -0.5, 0.2}, {0.8, 1.2, -0.6}, Representation::V);
  const double x1 = 0.3, x2 = -0.5, x3 = 0.2, v1 = 0.8, v2 = 1.2, v3 = -0.6;
  const std::vector<double> expect = {
      0.3 * x2 * v1 + 2.0 * (0.1 * x1 * v1) * v2 * v3,
      0.1 * v3 * v3 + 0.2 * v2 * x3 * v1 * v1,
      std::sin(x1) * v2 + (0.05 * x2 + 0.1 * v3) * v2 * v2};
  const std::vector<double> F = force_vector(s, v);
  for (std::size_t i = 0; i < 3; ++i) CHECK(F[i] == doctest::Approx(expect[i]));
}

TEST_CASE("validation names the failed invariant") {
  CHECK(message_of("asymmetric.sys").find("connection not symmetric") != std::string::npos);
  CHECK(message_of("bad_inverse.sys").find("V inconsistent with L") != std::string::npos);
  CHECK_NOTHROW(load_system_file(support::fixture("asymmetric.sys"), false));
}

TEST_CASE("validation rejects a Legendre map that does not vanish at v = 0") {
  SystemDef s = make_flat_system(2);
  s.L = LegendreMap::from_expressions({parse("v1 + 1", 2), parse("v2", 2)});
  CHECK_THROWS_AS(validate_system(s), ValidationError);
}

TEST_CASE("singular metric and failed Newton are reported") {
  SystemDef s = make_flat_system(2);
  s.L = LegendreMap::from_expressions({parse("v1 + v2", 2), parse("v1 + v2", 2)});
  const PhasePoint v({0.0, 0.0}, {1.0, 1.0}, Representation::V);
  CHECK_THROWS_AS(metric(s, v), SingularMetric);

  SystemDef t = make_flat_system(1);
  t.L = LegendreMap::from_expressions({parse("tanh(v1)", 1)});
  try {
    legendre_inverse(t, PhasePoint({0.0}, {2.0}, Representation::P));
    FAIL("momentum outside the image of tanh was accepted");
  } catch (const Error& e) {
    CHECK((e.code() == ErrorCode::kNonConvergence || e.code() == ErrorCode::kSingularMetric));
  }
  NewtonOptions once;
  once.max_iterations = 1;
  CHECK_THROWS_AS(legendre_inverse(t, PhasePoint({0.0}, {0.9}, Representation::P), once),
                  NonConvergence);
}

TEST_CASE("representation mismatches are rejected") {
  const SystemDef s = make_flat_system(2);
  const PhasePoint p({0.0, 0.0}, {1.0, 1.0}, Representation::P);
  CHECK_THROWS_AS(legendre_forward(s, p), InvalidArgument);
}
