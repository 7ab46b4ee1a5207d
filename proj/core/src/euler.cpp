#include "cdg/euler.hpp"

#include <cmath>

namespace cdg {

double pressure(const ConservedState& u, const GasModel& gas) {
  if (u.rho <= 0.0)
    throw NumericsError("pressure: non-positive density " + std::to_string(u.rho));
  return (gas.gamma - 1.0) * (u.rhoE - dot(u.mom, u.mom) / (2.0 * u.rho));
}

bool admissible(const ConservedState& u, const GasModel& gas) {
  if (u.rho <= 0.0) return false;
  return (u.rhoE - dot(u.mom, u.mom) / (2.0 * u.rho)) > 0.0 && gas.gamma > 1.0;
}

void require_admissible(const ConservedState& u, const GasModel& gas, const char* where) {
  if (!admissible(u, gas))
    throw NumericsError(std::string("inadmissible state") +
                        (*where ? std::string(" in ") + where : "") + ": rho=" +
                        std::to_string(u.rho) + " rhoE=" + std::to_string(u.rhoE));
}

std::array<Flux5, 3> flux(const ConservedState& u, const GasModel& gas) {
  require_admissible(u, gas, "flux");
  const double p = pressure(u, gas);
  const Vec3 v = u.mom / u.rho;
  std::array<Flux5, 3> f{};
  for (int d = 0; d < 3; ++d) {
    const double vd = v[d];
    f[d][0] = u.mom[d];
    f[d][1] = u.mom.x * vd;
    f[d][2] = u.mom.y * vd;
    f[d][3] = u.mom.z * vd;
    f[d][1 + d] += p;
    f[d][4] = vd * (u.rhoE + p);
  }
  return f;
}

Flux5 flux_dot_n(const ConservedState& u, const GasModel& gas, const Vec3& n) {
  const double p = pressure(u, gas);
  const double vn = dot(u.mom, n) / u.rho;
  return {u.rho * vn,
          u.mom.x * vn + p * n.x,
          u.mom.y * vn + p * n.y,
          u.mom.z * vn + p * n.z,
          vn * (u.rhoE + p)};
}

double max_wavespeed(const ConservedState& u, const GasModel& gas, const Vec3& n) {
  require_admissible(u, gas, "max_wavespeed");
  const double p = pressure(u, gas);
  const double c = std::sqrt(gas.gamma * p / u.rho);
  return std::abs(dot(u.mom, n) / u.rho) + c;
}

Flux5 llf_flux(const ConservedState& um, const ConservedState& up, const Vec3& n,
               const GasModel& gas) {
  const double lambda = std::max(max_wavespeed(um, gas, n), max_wavespeed(up, gas, n));
  const Flux5 fm = flux_dot_n(um, gas, n);
  const Flux5 fp = flux_dot_n(up, gas, n);
  Flux5 out;
  for (int c = 0; c < 5; ++c)
    out[c] = 0.5 * (fm[c] + fp[c]) - 0.5 * lambda * (up[c] - um[c]);
  return out;
}

Flux5 hllc_flux(const ConservedState& um, const ConservedState& up, const Vec3& n,
                const GasModel& gas, long* fallback_count) {
  require_admissible(um, gas, "hllc");
  require_admissible(up, gas, "hllc");
  const double g = gas.gamma;

  const double pl = pressure(um, gas), pr = pressure(up, gas);
  const Vec3 vl = um.mom / um.rho, vr = up.mom / up.rho;
  const double unl = dot(vl, n), unr = dot(vr, n);
  const double cl = std::sqrt(g * pl / um.rho), cr = std::sqrt(g * pr / up.rho);

  // Roe averages for the Einfeldt wave-speed bounds.
  const double sl_ = std::sqrt(um.rho), sr_ = std::sqrt(up.rho);
  const Vec3 v_roe = (sl_ * vl + sr_ * vr) / (sl_ + sr_);
  const double hl = (um.rhoE + pl) / um.rho, hr = (up.rhoE + pr) / up.rho;
  const double h_roe = (sl_ * hl + sr_ * hr) / (sl_ + sr_);
  const double c2_roe = (g - 1.0) * (h_roe - 0.5 * dot(v_roe, v_roe));
  const double un_roe = dot(v_roe, n);

  double s_left, s_right;
  if (c2_roe <= 0.0) {
    s_left = std::min(unl - cl, unr - cr);
    s_right = std::max(unl + cl, unr + cr);
  } else {
    const double c_roe = std::sqrt(c2_roe);
    s_left = std::min(unl - cl, un_roe - c_roe);
    s_right = std::max(unr + cr, un_roe + c_roe);
  }

  if (!(s_left < s_right)) {
    if (fallback_count) ++(*fallback_count);
    return llf_flux(um, up, n, gas);
  }

  const double s_star =
      (pr - pl + um.rho * unl * (s_left - unl) - up.rho * unr * (s_right - unr)) /
      (um.rho * (s_left - unl) - up.rho * (s_right - unr));
  if (!std::isfinite(s_star)) {
    if (fallback_count) ++(*fallback_count);
    return llf_flux(um, up, n, gas);
  }

  if (0.0 <= s_left) return flux_dot_n(um, gas, n);
  if (0.0 >= s_right) return flux_dot_n(up, gas, n);

  auto star_state = [&](const ConservedState& u, double un_k, double p_k, double s_k) {
    const double factor = u.rho * (s_k - un_k) / (s_k - s_star);
    ConservedState star;
    star.rho = factor;
    const Vec3 v = u.mom / u.rho;
    star.mom = factor * (v + (s_star - un_k) * n);
    star.rhoE = factor * (u.rhoE / u.rho +
                          (s_star - un_k) * (s_star + p_k / (u.rho * (s_k - un_k))));
    return star;
  };

  if (0.0 <= s_star) {
    const ConservedState star = star_state(um, unl, pl, s_left);
    const Flux5 f = flux_dot_n(um, gas, n);
    Flux5 out;
    for (int c = 0; c < 5; ++c) out[c] = f[c] + s_left * (star[c] - um[c]);
    return out;
  }
  const ConservedState star = star_state(up, unr, pr, s_right);
  const Flux5 f = flux_dot_n(up, gas, n);
  Flux5 out;
  for (int c = 0; c < 5; ++c) out[c] = f[c] + s_right * (star[c] - up[c]);
  return out;
}

BcKind bc_kind_from_string(const std::string& name) {
  if (name == "slip_wall" || name == "wall") return BcKind::SlipWall;
  if (name == "farfield") return BcKind::Farfield;
  if (name == "symmetry") return BcKind::Symmetry;
  throw ConfigError("unknown boundary condition kind '" + name + "'");
}

ConservedState boundary_state(const ConservedState& interior, const Vec3& n, BcKind kind,
                              const ConservedState& freestream) {
  switch (kind) {
    case BcKind::SlipWall:
    case BcKind::Symmetry: {
      ConservedState ghost = interior;
      const double mn = dot(interior.mom, n);
      ghost.mom = interior.mom - 2.0 * mn * n;
      return ghost;
    }
    case BcKind::Farfield:
      return freestream;
  }
  throw ConfigError("boundary_state: unknown kind");
}

}  // namespace cdg
