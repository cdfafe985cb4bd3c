#include "normlab/linalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace nlab {

double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const VectorX& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0) || !std::isfinite(smax))
    return std::numeric_limits<double>::infinity();
  return smax / smin;
}

Matrix invert_checked(const Matrix& m) {
  const double cond = condition_number(m);
  if (!(cond <= kSingularCondition)) {
    std::ostringstream msg;
    msg << "metric is singular (condition number " << cond << ")";
    throw SingularMetric(msg.str());
  }
  return m.fullPivLu().inverse();
}

Matrix values_of(const std::vector<Jet1>& m, int n) {
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = m[static_cast<std::size_t>(i * n + j)].value;
  return out;
}

std::vector<Jet1> invert_jet(const std::vector<Jet1>& g, int n) {
  const Matrix inv = invert_checked(values_of(g, n));
  const std::size_t vars = g.front().size();
  std::vector<Jet1> out(static_cast<std::size_t>(n * n), Jet1(vars));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i * n + j)].value = inv(i, j);
  Matrix dg(n, n);
  for (std::size_t a = 0; a < vars; ++a) {
    bool any = false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        dg(i, j) = g[static_cast<std::size_t>(i * n + j)].gradient[a];
        any = any || dg(i, j) != 0.0;
      }
    if (!any) continue;
    const Matrix d = -inv * dg * inv;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out[static_cast<std::size_t>(i * n + j)].gradient[a] = d(i, j);
  }
  return out;
}

}  // namespace nlab
