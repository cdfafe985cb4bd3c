#pragma once

#include <cstddef>
#include <vector>

namespace nlab {

// Which bundle a fiber coordinate lives in: velocities (tangent bundle) or
// momenta (cotangent bundle).
enum class Representation { V, P };

const char* representation_name(Representation rep) noexcept;

// A point of TM or T*M in one chart: base coordinates plus fiber coordinates.
struct PhasePoint {
  std::vector<double> x;
  std::vector<double> fiber;
  Representation rep = Representation::V;

  PhasePoint() = default;
  PhasePoint(std::vector<double> base, std::vector<double> fib,
             Representation r)
      : x(std::move(base)), fiber(std::move(fib)), rep(r) {}

  int dimension() const noexcept { return static_cast<int>(x.size()); }
  // Coordinate number `a` in the ordering x1..xn, fiber1..fibern.
  double coordinate(int a) const {
    const int n = dimension();
    return a < n ? x[static_cast<std::size_t>(a)]
                 : fiber[static_cast<std::size_t>(a - n)];
  }
};

}  // namespace nlab
