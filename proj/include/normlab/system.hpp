#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "normlab/expr.hpp"
#include "normlab/jet.hpp"
#include "normlab/linalg.hpp"
#include "normlab/phase.hpp"

namespace nlab {

// Components L_i(x, v) of the Legendre map, either given directly or as
// ∂Lag/∂v^i of a Lagrangian scalar.
class LegendreMap {
 public:
  LegendreMap() = default;
  static LegendreMap from_expressions(std::vector<Expression> components);
  static LegendreMap from_lagrangian(Expression lagrangian, int n);

  int dimension() const noexcept { return n_; }
  bool is_lagrangian() const noexcept { return lagrangian_.has_value(); }
  const std::vector<Expression>& expressions() const noexcept { return components_; }
  const std::optional<Expression>& lagrangian() const noexcept { return lagrangian_; }

  // Jets of all components in the variables (x, v).
  std::vector<Jet2> jets(const PhasePoint& v_point) const;
  std::vector<double> values(const PhasePoint& v_point) const;

 private:
  int n_ = 0;
  std::vector<Expression> components_;
  std::optional<Expression> lagrangian_;
};

LegendreMap lagrangian_to_legendre(const Expression& lagrangian, int n);

struct SystemDef {
  int n = 0;
  std::string name;
  LegendreMap L;
  std::vector<Expression> Phi;    // n components, in (x, v)
  std::vector<Expression> Gamma;  // n³, Γ^k_ij at (k*n + i)*n + j, in (x, v)
  std::optional<std::vector<Expression>> V;        // n components, in (x, p)
  std::optional<std::vector<Expression>> T;        // n³ gauge tensor, in (x, v)
  std::optional<std::vector<Expression>> V_guess;  // Newton start, in (x, p)

  std::size_t gamma_index(int k, int i, int j) const {
    return static_cast<std::size_t>((k * n + i) * n + j);
  }
};

// Identity Legendre map, zero force and zero connection.
SystemDef make_flat_system(int n);

// Primitive jets at a v-point, all in the variables (x, v).
struct VPrimitives {
  int n = 0;
  PhasePoint point;
  std::vector<Jet2> L;
  std::vector<Jet2> Phi;
  std::vector<Jet2> Gamma;
  std::vector<Jet2> T;  // empty unless requested and present

  const Jet2& gamma(int k, int i, int j) const {
    return Gamma[static_cast<std::size_t>((k * n + i) * n + j)];
  }
  const Jet2& gauge(int k, int i, int j) const {
    return T[static_cast<std::size_t>((k * n + i) * n + j)];
  }
};

VPrimitives evaluate_primitives(const SystemDef& s, const PhasePoint& v_point,
                                bool with_gauge = false);

struct NewtonOptions {
  int max_iterations = 50;
  double tolerance = 1e-12;  // scaled by max(1, ‖p‖∞)
};

// λ⁻¹ at a p-point together with the jets of the change of variables
// z = (x, p) → y = (x, V(x, p)).
struct InverseResult {
  PhasePoint v_point;
  std::vector<Jet2> V;                    // V^a as jets in z
  std::vector<Jet2> y;                    // y(z): x-variables then V
  std::vector<std::vector<double>> dy_dz;  // 2n × 2n Jacobian
  std::vector<Jet2> L;                    // L_i as jets in y at v_point
  Matrix g_lower;
  Matrix g_upper;
  int iterations = 0;  // 0 in mode A
  bool newton = false;
};

PhasePoint legendre_forward(const SystemDef& s, const PhasePoint& v_point);

// Mode A when s.V is present, Newton otherwise.
InverseResult legendre_inverse(const SystemDef& s, const PhasePoint& p_point,
                               const NewtonOptions& options = {});
InverseResult legendre_inverse_newton(const SystemDef& s,
                                      const PhasePoint& p_point,
                                      const NewtonOptions& options = {});

struct MetricPair {
  Matrix g_lower;  // g_qk = ∂L_q/∂v^k
  Matrix g_upper;  // g^qk
  double deviation = 0.0;  // max of ‖g⁻¹g − I‖∞ and ‖g g⁻¹ − I‖∞
};

MetricPair metric(const SystemDef& s, const PhasePoint& v_point);

std::vector<double> theta_from_phi(const SystemDef& s, const PhasePoint& v_point);
std::vector<double> force_vector(const SystemDef& s, const PhasePoint& v_point);
std::vector<double> force_covector(const SystemDef& s, const PhasePoint& p_point);

enum class DualKind { LRight, FLeft };
std::vector<double> duals(const SystemDef& s, const PhasePoint& v_point,
                          DualKind which);

// Θ_i∘λ as first-order jets in (x, v).
std::vector<Jet1> theta_jets(const VPrimitives& prim);
// F^i = Φ^i + Γ^i_jk v^j v^k as first-order jets in (x, v).
std::vector<Jet1> force_vector_jets(const VPrimitives& prim);

struct ValidationOptions {
  int samples = 20;
  std::uint64_t seed = 0x5eed;
  double symmetry_tolerance = 1e-12;
  double zero_tolerance = 1e-12;
  double inverse_tolerance = 1e-8;
};

// Symmetry of Γ and T, L(x, 0) = 0, and L(x, V(x, p)) = p when V is given.
// Throws ValidationError naming the failed invariant.
void validate_system(const SystemDef& s, const ValidationOptions& options = {});

}  // namespace nlab
