#pragma once

#include <memory>
#include <vector>

#include "cdg/padded.hpp"
#include "cdg/refelem.hpp"
#include "cdg/types.hpp"

namespace cdg {

/// Per-element geometric data of the isoparametric map, evaluated at the
/// cubature and face quadrature nodes.
struct ElementGeometry {
  std::vector<Vec3> phys_nodes;  // N_p physical collocation coordinates

  // Cubature nodes: inverse-map derivatives dr_m/dx_i and the integration
  // Jacobian jac = det(dx/dr) > 0. The paper states its map the other way
  // around; inv_map_jacobian() exposes det(dr/dx) = 1/jac.
  std::vector<std::array<double, 9>> cub_dr;  // r_x r_y r_z s_x ... t_z
  std::vector<double> cub_jac;

  // Face quadrature nodes (4*N_g, face-major): outward unit normal, surface
  // Jacobian (physical area measure per unit 2D rule weight), inverse-map
  // derivatives and jac.
  std::vector<Vec3> face_normal;
  std::vector<double> face_sjac;
  std::vector<std::array<double, 9>> face_dr;
  std::vector<double> face_jac;
  std::vector<Vec3> face_phys;  // physical positions of face quadrature nodes

  double volume = 0.0;
  double surface_area = 0.0;

  /// Inscribed-sphere diameter 6V/A, the length scale used for time steps.
  double h() const { return 6.0 * volume / surface_area; }

  double inv_map_jacobian(int cub_node) const { return 1.0 / cub_jac[cub_node]; }
};

/// The local DG matrices of one element, stored padded column-major.
/// I_cub and I_g are reference-level (shared across elements).
struct ElementOperators {
  PaddedMatrix s[3];        // S_x,S_y,S_z: N_p x N_cub
  PaddedMatrix face_mass;   // M_dOmega: N_p x 4N_g
  std::vector<double> mass;       // M, dense column-major N_p x N_p
  std::vector<double> mass_chol;  // lower Cholesky factor, column-major
  std::shared_ptr<const PaddedMatrix> interp_cub;   // N_cub x N_p
  std::shared_ptr<const PaddedMatrix> interp_face;  // 4N_g x N_p

  int n_basis = 0, n_cub = 0, n_face = 0;  // n_face = 4*N_g

  /// x := M^-1 b via the stored Cholesky factor.
  void mass_solve(const double* b, double* x) const;
};

/// Shared padded copies of the reference interpolation operators.
struct SharedOperators {
  std::shared_ptr<const PaddedMatrix> interp_cub;
  std::shared_ptr<const PaddedMatrix> interp_face;
};
SharedOperators make_shared_operators(const ReferenceElement& re, bool padded = true);

/// Isoparametric mapping data from the element's physical collocation nodes.
/// Throws NumericsError naming the element when the map degenerates.
ElementGeometry compute_mapping(const std::vector<Vec3>& phys_nodes,
                                const ReferenceElement& re, int element_id = -1);

/// Assembles S_x/S_y/S_z, M (factorized), M_dOmega for one element.
ElementOperators build_operators(const ElementGeometry& geom, const ReferenceElement& re,
                                 const SharedOperators& shared, bool padded = true);

/// Discrete divergence of a constant field: || M^-1 (sum_m S_m (c_m 1) -
/// M_dOmega (c . n)) ||_inf maximized over the unit directions c. Vanishes on
/// affine elements; the element-quality gate after curving.
double discrete_divergence_check(const ElementGeometry& geom,
                                 const ElementOperators& ops,
                                 const ReferenceElement& re);

}  // namespace cdg
