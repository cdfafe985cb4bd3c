#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "normlab/experiments.hpp"
#include "normlab/normality.hpp"
#include "normlab/system.hpp"

namespace nlab {

// Contents of a system file: the system itself plus the optional normal-shift
// setup and v-form knobs used by fixtures.
struct SystemFile {
  SystemDef system;
  std::optional<ShiftRun> shift;
  VFormOptions vform;
};

// Sectioned text format:
//   [system]     n = 2, name = "..."
//   [legendre]   L1 = "..." ... or lagrangian = "..."
//   [inverse]    V1 = "..." (closed-form λ⁻¹), guess1 = "..." (Newton start)
//   [force]      Phi1 = "..."
//   [connection] Gamma_1_12 = "..." (or Gamma_1_1_2), omitted entries are 0
//   [gauge]      T_1_12 = "..."
//   [surface]    x1 = "cos(u1)", u1_min, u1_max, samples, t_end, steps
//   [nu]         nu = "..."
//   [fixture]    flip_beta_term = 5, c_collapsed = true
// '#' starts a comment. Values may be quoted.
SystemFile parse_system_text(std::string_view text, bool validate = true);
SystemFile load_system_file(const std::string& path, bool validate = true);

}  // namespace nlab
