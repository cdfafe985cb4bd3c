#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "normlab/expr.hpp"
#include "normlab/phase.hpp"
#include "normlab/sysfile.hpp"

namespace support {

inline std::string fixture(const std::string& name) {
  return std::string(NLAB_FIXTURES) + "/" + name;
}

inline nlab::SystemFile load(const std::string& name) {
  return nlab::load_system_file(fixture(name));
}

inline const std::vector<std::string>& valid_fixtures() {
  static const std::vector<std::string> names = {
      "identity2.sys",  "identity3.sys",    "cubic.sys",       "anisotropic.sys",
      "fiber_gamma.sys", "closed_inverse.sys", "shear.sys",     "geodesic_circle.sys",
      "gauge_given.sys"};
  return names;
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng_);
  }
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
};

inline std::string number(Gen& g, double scale) {
  return "(" + std::to_string(g.uniform(-scale, scale)) + ")";
}

// Random expression tree over x1..xn and the given fiber letter, built from
// every operator and function of the grammar with arguments kept inside
// their domains.
inline std::string random_expression(Gen& g, int n, char fiber, int depth) {
  if (depth <= 0 || g.pick(0, 4) == 0) {
    switch (g.pick(0, 2)) {
      case 0: return number(g, 2.0);
      case 1: return "x" + std::to_string(g.pick(1, n));
      default: return std::string(1, fiber) + std::to_string(g.pick(1, n));
    }
  }
  const std::string a = random_expression(g, n, fiber, depth - 1);
  switch (g.pick(0, 13)) {
    case 0: return "(" + a + " + " + random_expression(g, n, fiber, depth - 1) + ")";
    case 1: return "(" + a + " - " + random_expression(g, n, fiber, depth - 1) + ")";
    case 2:
    case 3: return "(" + a + " * " + random_expression(g, n, fiber, depth - 1) + ")";
    case 4: return "(" + a + " / (1.5 + sin(" + random_expression(g, n, fiber, depth - 1) + ")))";
    case 5: return "sin(" + a + ")";
    case 6: return "cos(" + a + ")";
    case 7: return "exp(0.3*tanh(" + a + "))";
    case 8: return "ln(1 + (" + a + ")^2)";
    case 9: return "sqrt(2 + cos(" + a + "))";
    case 10: return "tanh(" + a + ")";
    case 11: return "(" + a + ")^" + std::to_string(g.pick(2, 3));
    case 12: return "(1 + (" + a + ")^2)^0.5";
    default: return "-(" + a + ")";
  }
}

inline nlab::PhasePoint random_point(Gen& g, int n, nlab::Representation rep, double fiber_lo,
                                     double fiber_hi) {
  std::vector<double> x(static_cast<std::size_t>(n)), f(static_cast<std::size_t>(n));
  for (double& c : x) c = g.uniform(-1.0, 1.0);
  for (double& c : f) c = g.uniform(fiber_lo, fiber_hi);
  return nlab::PhasePoint(x, f, rep);
}

inline nlab::PhasePoint shifted(const nlab::PhasePoint& pt, int a, double h) {
  nlab::PhasePoint q = pt;
  const int n = pt.dimension();
  if (a < n)
    q.x[static_cast<std::size_t>(a)] += h;
  else
    q.fiber[static_cast<std::size_t>(a - n)] += h;
  return q;
}

// Central differences of plain evaluations; independent of the jet code.
inline std::vector<double> fd_gradient(const nlab::Expression& e, const nlab::PhasePoint& pt,
                                       double h = 1e-6) {
  const int m = 2 * pt.dimension();
  std::vector<double> g(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a)
    g[static_cast<std::size_t>(a)] = (nlab::eval_scalar(e, shifted(pt, a, h)) -
                                      nlab::eval_scalar(e, shifted(pt, a, -h))) /
                                     (2.0 * h);
  return g;
}

inline std::vector<double> fd_hessian(const nlab::Expression& e, const nlab::PhasePoint& pt,
                                      double h = 1e-4) {
  const int m = 2 * pt.dimension();
  std::vector<double> H(static_cast<std::size_t>(m * m));
  const double f0 = nlab::eval_scalar(e, pt);
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      double v;
      if (a == b) {
        v = (nlab::eval_scalar(e, shifted(pt, a, h)) - 2.0 * f0 +
             nlab::eval_scalar(e, shifted(pt, a, -h))) /
            (h * h);
      } else {
        auto at = [&](double sa, double sb) {
          return nlab::eval_scalar(e, shifted(shifted(pt, a, sa * h), b, sb * h));
        };
        v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
      }
      H[static_cast<std::size_t>(a * m + b)] = v;
      H[static_cast<std::size_t>(b * m + a)] = v;
    }
  }
  return H;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

// ‖a − b‖∞ / max(1, ‖b‖∞)
inline double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m / std::max(1.0, max_abs(b));
}

}  // namespace support
