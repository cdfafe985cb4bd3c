#include "normlab/jet.hpp"

#include <string>

namespace nlab {

Jet1 partial(const Jet2& j, std::size_t a) {
  const std::size_t n = j.size();
  Jet1 r(n, j.gradient[a]);
  for (std::size_t b = 0; b < n; ++b) r.gradient[b] = j.hess(a, b);
  return r;
}

Jet1 demote(const Jet2& j) {
  Jet1 r(j.size(), j.value);
  r.gradient = j.gradient;
  return r;
}

Jet1 compose(const Jet1& f, std::span<const std::vector<double>> dy_dz) {
  const std::size_t nz = dy_dz.empty() ? 0 : dy_dz.front().size();
  Jet1 r(nz, f.value);
  for (std::size_t e = 0; e < f.size(); ++e) {
    const double fe = f.gradient[e];
    if (fe == 0.0) continue;
    const std::vector<double>& row = dy_dz[e];
    for (std::size_t b = 0; b < nz; ++b) r.gradient[b] += fe * row[b];
  }
  return r;
}

Jet2 compose(const Jet2& f, std::span<const Jet2> y) {
  const std::size_t ny = f.size();
  const std::size_t nz = y.empty() ? 0 : y.front().size();
  Jet2 r(nz, f.value);
  for (std::size_t e = 0; e < ny; ++e) {
    const double fe = f.gradient[e];
    if (fe == 0.0) continue;
    for (std::size_t b = 0; b < nz; ++b) r.gradient[b] += fe * y[e].gradient[b];
    for (std::size_t b = 0; b < nz; ++b)
      for (std::size_t c = b; c < nz; ++c) r.hess(b, c) += fe * y[e].hess(b, c);
  }
  for (std::size_t e = 0; e < ny; ++e) {
    for (std::size_t f2 = 0; f2 < ny; ++f2) {
      const double h = f.hess(e, f2);
      if (h == 0.0) continue;
      for (std::size_t b = 0; b < nz; ++b) {
        const double hb = h * y[e].gradient[b];
        if (hb == 0.0) continue;
        for (std::size_t c = b; c < nz; ++c)
          r.hess(b, c) += hb * y[f2].gradient[c];
      }
    }
  }
  for (std::size_t b = 0; b < nz; ++b)
    for (std::size_t c = b + 1; c < nz; ++c) r.hess(c, b) = r.hess(b, c);
  return r;
}

Jet2 eval_jet(const Expression& e, const PhasePoint& point) {
  if (e.fiber_rep() && *e.fiber_rep() != point.rep)
    throw InvalidArgument("expression uses " +
                          std::string(representation_name(*e.fiber_rep())) +
                          " variables but point is in " +
                          representation_name(point.rep) + "-representation");
  if (e.dimension() > point.dimension())
    throw DimensionError("point dimension smaller than expression dimension");
  const std::size_t n = point.x.size();
  const std::size_t vars = 2 * n;
  return evaluate<Jet2>(
      e.root(),
      [&](VarKind kind, int index) {
        const auto i = static_cast<std::size_t>(index);
        if (kind == VarKind::X) return Jet2::variable(vars, i, point.x[i]);
        return Jet2::variable(vars, n + i, point.fiber[i]);
      },
      [&](double c) { return Jet2::constant(vars, c); });
}

Jet2 jet_arithmetic(const Jet2& a, const Jet2& b, JetOp op) {
  if (a.size() != b.size())
    throw InvalidArgument("jets have different variable counts");
  switch (op) {
    case JetOp::Add: return a + b;
    case JetOp::Sub: return a - b;
    case JetOp::Mul: return a * b;
    case JetOp::Div: return a * reciprocal(b);
    case JetOp::Pow: return power(a, b);
  }
  return a;
}

}  // namespace nlab
