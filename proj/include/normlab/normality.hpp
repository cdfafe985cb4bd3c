#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "normlab/calculus.hpp"
#include "normlab/linalg.hpp"
#include "normlab/system.hpp"
#include "normlab/tensor.hpp"

namespace nlab {

enum class FieldId { W, Omega, P, U, Alpha, Beta, Eta, A, B, C };

inline constexpr FieldId kAllFields[] = {
    FieldId::W,    FieldId::Omega, FieldId::P,   FieldId::U, FieldId::Alpha,
    FieldId::Beta, FieldId::Eta,   FieldId::A,   FieldId::B, FieldId::C};

const char* field_name(FieldId id) noexcept;
std::optional<FieldId> field_from_name(std::string_view name);

// Every normality field at one phase point, in one representation.
struct NormalityBundle {
  Representation rep = Representation::P;
  int n = 0;
  std::vector<double> W;
  double Omega = 0.0;
  Matrix P;  // P(i, j) = P^i_j
  std::vector<double> U;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> eta;
  Matrix A;  // A(r, s) = A^{rs}
  Matrix B;  // B(r, s) = B^r_s
  Matrix C;  // C(r, s) = C_rs
  double lambda = 0.0;

  // Components flattened row-major.
  std::vector<double> field(FieldId id) const;
};

// Knobs for the closed-form v-representation path.
struct VFormOptions {
  // 1-based index of a β term whose sign is flipped (0: none). Only used to
  // confirm that the cross check detects a corrupted formula.
  int flip_beta_term = 0;
  // Use the C formula exactly as printed in its collapsed form. It differs
  // from the pulled-back p-rep C by a term symmetric in (r, s).
  bool c_collapsed = false;
};

// |Ω| below this is a degenerate point.
double omega_threshold(const std::vector<double>& p);

struct PRepFields {
  PhasePoint p_point;
  InverseResult inverse;
  NormalityBundle bundle;
  Tensor D;  // D[k][r][i][j] = D^{kr}_ij
  Tensor R;
  std::vector<double> Q;
  FieldValue<double> nabla_V;  // [s][i] = ∇_i V^s
};

// Primary path: primitives composed with λ⁻¹, derivatives through the
// implicit jets of the inverse map.
PRepFields prep_fields(const SystemDef& s, const PhasePoint& p_point);

struct VRepFields {
  PhasePoint v_point;
  VPrimitives prim;
  NormalityBundle bundle;
  std::vector<double> L;      // L_q
  std::vector<double> L_up;   // L^q
  std::vector<double> F_up;   // F^q
  std::vector<double> F_low;  // F_q
  Matrix g_lower;
  Matrix g_upper;
  FieldValue<double> gamma;       // Γ values
  FieldValue<double> nabla_L;     // [q][m] = ∇_m L_q
  FieldValue<double> dL_up;       // [k][q] = ∂L^k/∂v^q
  Tensor D;  // D[k][r][i][j] = D^k_rij
  Tensor R;
};

// Closed-form v-representation path.
VRepFields vrep_fields(const SystemDef& s, const PhasePoint& v_point,
                       const VFormOptions& options = {});

NormalityBundle normality_bundle(const SystemDef& s, const PhasePoint& point,
                                 const VFormOptions& options = {});

double lambda_scalar(const Matrix& B, const Matrix& P, int n);

enum class ResidualId { WeakAlpha, WeakEta, AddlA, AddlB, AddlC };
const char* residual_name(ResidualId id) noexcept;

struct Residual {
  ResidualId id = ResidualId::WeakAlpha;
  double norm = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool decisive = true;
};

// Five residual norms of the weak and additional normality equations. For
// n = 2 the additional ones are marked non-decisive.
std::vector<Residual> normality_residuals(const NormalityBundle& b,
                                          double tolerance = 1e-8);
std::vector<Residual> normality_residuals(const SystemDef& s, const PhasePoint& point,
                                          double tolerance = 1e-8);

struct ProjectorLaws {
  double idempotence = 0.0;  // ‖P² − P‖∞
  double trace = 0.0;        // |tr P − (n − 1)|
  double kills_W = 0.0;      // ‖Σ_r P^i_r W^r‖∞
  double kills_p = 0.0;      // ‖Σ_r p_r P^r_k‖∞
};
ProjectorLaws projector_laws(const NormalityBundle& b, const std::vector<double>& p);

struct CrossCheck {
  FieldId field = FieldId::W;
  double deviation = 0.0;  // ‖p-path − v-path‖∞ / max(1, ‖v-path‖∞)
};

// Dual-path deviations of all ten fields. `point` may be in either
// representation.
std::vector<CrossCheck> cross_check_all(const SystemDef& s, const PhasePoint& point,
                                        const VFormOptions& options = {});
double cross_check(const SystemDef& s, const PhasePoint& point, FieldId field,
                   const VFormOptions& options = {});

struct CurvatureRelations {
  double dynamic = 0.0;    // D (p-rep) ∘ λ against its g-contracted v-rep form
  double curvature = 0.0;  // R (p-rep) ∘ λ against its v-rep form
};
CurvatureRelations curvature_relations(const SystemDef& s, const PhasePoint& v_point);

}  // namespace nlab
