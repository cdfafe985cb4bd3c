#pragma once

#include <string>
#include <vector>

#include "normlab/expr.hpp"
#include "normlab/normality.hpp"
#include "normlab/system.hpp"

namespace nlab {

// Γ → Γ + T with Φ unchanged, so F shifts by T(v, v).
SystemDef apply_gauge(const SystemDef& s);
SystemDef apply_gauge(const SystemDef& s, const std::vector<Expression>& T);

// Γ ≡ 0, so F = Φ and the horizontal derivative reduces to ∂/∂x.
SystemDef connection_free_mode(const SystemDef& s);

enum class GaugeKind { Invariant, Rule, Residual };
const char* gauge_kind_name(GaugeKind kind) noexcept;

struct GaugeEntry {
  std::string quantity;  // e.g. "alpha", "rule-beta", "weak-eta"
  GaugeKind kind = GaugeKind::Invariant;
  double deviation = 0.0;
  // Residual entries whose invariance relies on other equations holding
  // are decisive only when those equations hold at the point.
  bool decisive = true;
};

struct GaugePointReport {
  PhasePoint point;
  std::vector<GaugeEntry> entries;
};

// |before − after| for each normality residual. Entries whose invariance
// depends on other equations are decisive only where those hold before.
std::vector<GaugeEntry> residual_invariance(const NormalityBundle& before,
                                           const NormalityBundle& after,
                                           double residual_tolerance = 1e-8);

// Compares the v-rep fields of `s` and of `apply_gauge(s)` at one point.
GaugePointReport gauge_point(const SystemDef& s, const SystemDef& gauged,
                             const PhasePoint& v_point, double residual_tolerance = 1e-8);

struct GaugeReport {
  std::vector<GaugePointReport> points;
  // Largest deviation per quantity over decisive entries, in entry order.
  std::vector<GaugeEntry> worst;
};

GaugeReport gauge_invariance_report(const SystemDef& s, const std::vector<PhasePoint>& points,
                                    double residual_tolerance = 1e-8);

struct ShiftRun {
  std::vector<Expression> surface;  // n components over u1..u(n-1)
  Expression nu;                    // over u1..u(n-1)
  std::vector<double> u_min;
  std::vector<double> u_max;
  int samples = 32;  // per parameter direction
  double t_end = 1.0;
  int steps = 10;  // output intervals
  double rtol = 1e-10;
  double atol = 1e-12;
};

// Unit covector annihilating the tangents ∂x/∂u_j, with
// det[τ_1, …, τ_{n−1}, n] > 0.
std::vector<double> hypersurface_normal(const ShiftRun& run, const std::vector<double>& u);

struct ShiftTrace {
  std::vector<double> times;
  std::vector<double> deviation;  // max collinearity deviation per time
};

ShiftTrace shift_integrate(const SystemDef& s, const ShiftRun& run);

}  // namespace nlab
