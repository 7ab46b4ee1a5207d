#pragma once

#include <array>
#include <string>

#include "cdg/types.hpp"

namespace cdg {

struct GasModel {
  double gamma = 1.4;
};

/// Conserved variables (rho, rho u, rho v, rho w, rho E).
struct ConservedState {
  double rho = 0.0;
  Vec3 mom{};
  double rhoE = 0.0;

  double& operator[](int i) {
    switch (i) {
      case 0: return rho;
      case 1: return mom.x;
      case 2: return mom.y;
      case 3: return mom.z;
      default: return rhoE;
    }
  }
  double operator[](int i) const {
    return const_cast<ConservedState&>(*this)[i];
  }
};

using Flux5 = std::array<double, 5>;

/// Perfect-gas pressure p = (gamma-1)(rho E - |m|^2 / (2 rho)).
double pressure(const ConservedState& u, const GasModel& gas);

/// True when rho > 0 and p > 0.
bool admissible(const ConservedState& u, const GasModel& gas);

/// Throws NumericsError when the state is inadmissible.
void require_admissible(const ConservedState& u, const GasModel& gas,
                        const char* where = "");

/// Full Euler flux tensor; column d holds F_d.
std::array<Flux5, 3> flux(const ConservedState& u, const GasModel& gas);

/// Directional flux F(u) . n.
Flux5 flux_dot_n(const ConservedState& u, const GasModel& gas, const Vec3& n);

/// |v.n| + c.
double max_wavespeed(const ConservedState& u, const GasModel& gas, const Vec3& n);

/// Local Lax-Friedrichs numerical flux.
Flux5 llf_flux(const ConservedState& um, const ConservedState& up, const Vec3& n,
               const GasModel& gas);

/// HLLC numerical flux with Einfeldt (Roe-average) wave-speed estimates.
/// Falls back to LLF on degenerate estimates; fallback_count (optional)
/// is incremented when that happens.
Flux5 hllc_flux(const ConservedState& um, const ConservedState& up, const Vec3& n,
                const GasModel& gas, long* fallback_count = nullptr);

enum class BcKind { SlipWall, Farfield, Symmetry };

BcKind bc_kind_from_string(const std::string& name);

/// Ghost state for the boundary Riemann problem: walls and symmetry planes
/// reflect the normal momentum; farfield imposes the freestream state.
ConservedState boundary_state(const ConservedState& interior, const Vec3& n,
                              BcKind kind, const ConservedState& freestream);

}  // namespace cdg
