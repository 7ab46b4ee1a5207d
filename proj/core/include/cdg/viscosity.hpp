#pragma once

#include <Eigen/Dense>
#include <optional>

#include "cdg/refelem.hpp"

namespace cdg {

/// Artificial-viscosity parameters. s0 = log10(1/p^4) + s0_offset.
struct ViscosityModel {
  bool enabled = false;
  double eps0 = 0.3;
  double kappa = 4.0;
  double s0_offset = 0.0;
  int indicator_component = 0;    // conserved-variable index, density by default
  bool jacobian_weighted = false; // physical-space integrals instead of Parseval

  double s0(int p) const;
};

/// Modal-decay smoothness indicator S_k: energy fraction of the top-degree
/// modes. Computed on the reference element via Parseval by default; the
/// Jacobian-weighted variant integrates in physical space with the cubature
/// (jac_at_cub = J at each cubature node).
double smoothness_indicator(const Eigen::VectorXd& nodal, const ReferenceElement& re,
                            const std::vector<double>* jac_at_cub = nullptr);

/// Viscosity ramp: 0 below s0-kappa, eps0 above s0+kappa, sine blend between.
/// S_k = 0 maps to zero viscosity (smooth limit).
double viscosity_amount(double s_k, int p, const ViscosityModel& model);

}  // namespace cdg
