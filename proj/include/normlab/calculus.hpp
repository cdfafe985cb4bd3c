#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "normlab/jet.hpp"
#include "normlab/linalg.hpp"
#include "normlab/phase.hpp"
#include "normlab/system.hpp"
#include "normlab/tensor.hpp"

namespace nlab {

// Components of an extended tensor field of rank (upper, lower) at one
// point. Flat layout: upper indices first, then lower, last index fastest.
// C is Jet2, Jet1 (derivatives of one order available) or double.
template <class C>
struct FieldValue {
  int n = 0;
  int upper = 0;
  int lower = 0;
  Representation rep = Representation::V;
  PhasePoint point;
  std::vector<C> components;

  FieldValue() = default;
  FieldValue(int dim, int up, int low, Representation r, PhasePoint pt,
             std::vector<C> comps)
      : n(dim), upper(up), lower(low), rep(r), point(std::move(pt)),
        components(std::move(comps)) {}

  int rank() const noexcept { return upper + lower; }
  std::size_t count() const noexcept { return components.size(); }

  template <class... I>
  const C& operator()(I... idx) const {
    std::size_t o = 0;
    ((o = o * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx)), ...);
    return components[o];
  }
};

// Vertical derivative: ∂/∂v^k appended as a new lower index (v-rep), or
// ∂/∂p_k appended as a new last upper index (p-rep).
FieldValue<Jet1> vertical_derivative(const FieldValue<Jet2>& X);
FieldValue<double> vertical_derivative(const FieldValue<Jet1>& X);
FieldValue<double> vertical_derivative(const FieldValue<double>& X);  // MissingJets

// Horizontal covariant derivative with the connection `gamma` (rank (1,2),
// same representation and point). The derivative index is appended as the
// last lower index.
FieldValue<Jet1> horizontal_derivative(const FieldValue<Jet2>& X,
                                       const FieldValue<Jet1>& gamma);
FieldValue<double> horizontal_derivative(const FieldValue<Jet1>& X,
                                         const FieldValue<double>& gamma);
FieldValue<double> horizontal_derivative(const FieldValue<double>& X,
                                         const FieldValue<double>& gamma);

FieldValue<double> values_of(const FieldValue<Jet1>& X);
FieldValue<Jet1> demote(const FieldValue<Jet2>& X);

// Connection components as jets: at a v-point directly, at a p-point as
// Γ∘λ⁻¹ through the inverse map's Jacobian.
FieldValue<Jet1> connection_v(const VPrimitives& prim);
FieldValue<Jet1> connection_p(const VPrimitives& prim, const InverseResult& inv,
                              const PhasePoint& p_point);

// Dynamic curvature. v-rep: D[k][r][i][j] = −∂Γ^k_ir/∂v^j.
// p-rep: D[k][r][i][j] = D^{kr}_ij = −∂Γ^k_ij/∂p_r.
Tensor dynamic_curvature(const FieldValue<Jet1>& gamma);

// Curvature R[k][r][i][j] from the connection and its first derivatives,
// in the connection's representation.
Tensor curvature_R(const FieldValue<Jet1>& gamma);

// Convenience entry points; the representation follows the point.
Tensor dynamic_curvature(const SystemDef& s, const PhasePoint& point);
Tensor curvature_R(const SystemDef& s, const PhasePoint& point);

// Right-hand sides of the v-rep expressions for the p-rep curvatures
// pulled back by λ. `nabla_L` holds ∇_m L_q at [q][m].
Tensor dynamic_curvature_pullback(const Tensor& D_v, const Matrix& g_upper);
Tensor curvature_pullback(const Tensor& R_v, const Tensor& D_v,
                          const FieldValue<double>& nabla_L,
                          const Matrix& g_upper);

// Relative deviations of the four transport relations between the two
// representations for a rank-(upper, 0) field, upper ∈ {0, 1}. `field_v` is
// given in (x, v), `field_p` in (x, p); both sides of each relation are
// computed along independent differentiation paths.
struct TransportDeviations {
  double vertical_from_v = 0.0;    // ∂X/∂v^k = g_qk ∂(X∘λ⁻¹)/∂p_q ∘ λ
  double vertical_from_p = 0.0;    // ∂X/∂p_k = g^qk∘λ⁻¹ ∂(X∘λ)/∂v^q ∘ λ⁻¹
  double horizontal_from_p = 0.0;  // ∇X = ∇(X∘λ)∘λ⁻¹ + ∇V^q ∂(X∘λ)/∂v^q ∘ λ⁻¹
  double horizontal_from_v = 0.0;  // ∇X = ∇(X∘λ⁻¹)∘λ + ∇L_q ∂(X∘λ⁻¹)/∂p_q ∘ λ
  double max() const noexcept;
};

TransportDeviations transport_identities(const SystemDef& s, const PhasePoint& v_point,
                                         std::span<const Expression> field_v,
                                         std::span<const Expression> field_p, int upper);

}  // namespace nlab
