#include <doctest.h>

#include <cmath>

#include "normlab/jet.hpp"
#include "support.hpp"

using namespace nlab;

TEST_CASE("closed-form jet of a polynomial") {
  const PhasePoint pt({0.5}, {2.0}, Representation::V);
  const Jet2 j = eval_jet(parse("x1^2*v1", 1), pt);
  CHECK(j.value == doctest::Approx(0.5));
  CHECK(j.gradient[0] == doctest::Approx(2.0 * 0.5 * 2.0));
  CHECK(j.gradient[1] == doctest::Approx(0.25));
  CHECK(j.hess(0, 0) == doctest::Approx(4.0));
  CHECK(j.hess(0, 1) == doctest::Approx(1.0));
  CHECK(j.hess(1, 0) == doctest::Approx(1.0));
  CHECK(j.hess(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("jets agree with finite differences on random expressions") {
  support::Gen g(11);
  for (int k = 0; k < 200; ++k) {
    const int n = g.pick(1, 3);
    const Expression e = parse(support::random_expression(g, n, 'v', 3), n);
    const PhasePoint pt = support::random_point(g, n, Representation::V, -1.0, 1.0);
    const Jet2 j = eval_jet(e, pt);
    CHECK(j.value == doctest::Approx(eval_scalar(e, pt)));
    CHECK(support::rel_diff(j.gradient, support::fd_gradient(e, pt)) < 1e-5);
    CHECK(support::rel_diff(j.hessian, support::fd_hessian(e, pt)) < 1e-4);
  }
}

TEST_CASE("Hessian is exactly symmetric") {
  const PhasePoint pt({0.3, -0.4}, {0.8, 1.2}, Representation::P);
  const Jet2 j = eval_jet(parse("sin(x1*p2)*exp(x2 - p1)/(2 + cos(p1*p2))", 2), pt);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) CHECK(j.hess(a, b) == j.hess(b, a));
}

TEST_CASE("composition follows the chain rule") {
  const PhasePoint z({0.3}, {0.7}, Representation::V);
  const std::vector<Jet2> y = {eval_jet(parse("x1 + v1^2", 1), z),
                               eval_jet(parse("sin(x1)", 1), z)};
  const PhasePoint ypt({y[0].value}, {y[1].value}, Representation::V);
  const Jet2 f = eval_jet(parse("x1*v1 + v1^2", 1), ypt);
  const Jet2 composed = compose(f, y);
  const Jet2 direct =
      eval_jet(parse("(x1 + v1^2)*sin(x1) + sin(x1)^2", 1), z);
  CHECK(composed.value == doctest::Approx(direct.value));
  CHECK(support::rel_diff(composed.gradient, direct.gradient) < 1e-13);
  CHECK(support::rel_diff(composed.hessian, direct.hessian) < 1e-13);
}

TEST_CASE("partial and demote") {
  const PhasePoint pt({1.0}, {2.0}, Representation::V);
  const Jet2 j = eval_jet(parse("x1^3*v1^2", 1), pt);
  const Jet1 d = partial(j, 1);
  CHECK(d.value == doctest::Approx(4.0));
  CHECK(d.gradient[0] == doctest::Approx(12.0));
  CHECK(d.gradient[1] == doctest::Approx(2.0));
  const Jet1 dm = demote(j);
  CHECK(dm.value == doctest::Approx(4.0));
  CHECK(dm.gradient[1] == doctest::Approx(4.0));
}

TEST_CASE("dual numbers carry one tangent") {
  const Dual a(2.0, 1.0);
  const Dual r = jetmath::sin(a * a) / a;
  const double expect = (std::cos(4.0) * 4.0 * 2.0 - std::sin(4.0)) / 4.0;
  CHECK(r.v == doctest::Approx(std::sin(4.0) / 2.0));
  CHECK(r.d == doctest::Approx(expect));
}

TEST_CASE("evaluation errors propagate through jets") {
  const PhasePoint pt({0.0}, {1.0}, Representation::V);
  CHECK_THROWS_AS(eval_jet(parse("ln(x1)", 1), pt), EvalError);
  CHECK_THROWS_AS(eval_jet(parse("v1/x1", 1), pt), EvalError);
}
