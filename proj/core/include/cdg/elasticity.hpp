#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <memory>

#include "cdg/curved_mesh.hpp"
#include "cdg/mesh.hpp"
#include "cdg/refelem.hpp"

namespace cdg {

/// Linear-elastic material; Lame parameters derived from (E, nu) and stored.
struct ElasticMaterial {
  double youngs_modulus = 1.0;
  double poisson_ratio = 0.3;
  double lame_lambda = 0.0;
  double lame_mu = 0.0;

  static ElasticMaterial from_E_nu(double e, double nu);
};

/// Solved displacement field on the sub-mesh: continuous vector-valued
/// Lagrange FEM, queryable at arbitrary points. Immutable after the solve;
/// safe for concurrent queries.
class DeformationField {
 public:
  int fem_degree() const { return p_fem_; }
  int n_nodes() const { return static_cast<int>(node_coords_.size()); }

  /// Displacement at x. Points outside the sub-mesh return zero and set
  /// *inside = false (they are undeformed by construction).
  Vec3 displacement(const Vec3& x, bool* inside = nullptr) const;

  /// Global FEM node positions and solved values (for tests).
  const std::vector<Vec3>& node_coords() const { return node_coords_; }
  const std::vector<Vec3>& node_values() const { return node_values_; }

 private:
  friend DeformationField solve_elasticity(const SubMesh&, const ElasticMaterial&,
                                           const std::function<Vec3(const Vec3&)>&,
                                           int, struct ElasticityDebug*);
  int p_fem_ = 1;
  std::shared_ptr<const ReferenceElement> re_;
  std::vector<std::array<Vec3, 4>> elem_verts_;
  std::vector<std::vector<int>> elem_nodes_;  // global node ids per element
  std::vector<Vec3> node_coords_;
  std::vector<Vec3> node_values_;

  // uniform-grid point location over the sub-mesh bounding box
  Vec3 grid_min_{}, grid_max_{};
  int grid_n_[3] = {1, 1, 1};
  std::vector<std::vector<int>> grid_cells_;

  void build_grid();
  int locate(const Vec3& x, double* bary_out) const;
};

/// Assembly internals exposed for property tests (energy minimization).
struct ElasticityDebug {
  Eigen::SparseMatrix<double> stiffness;  // full (unconstrained) K
  Eigen::VectorXd solution;               // full DOF vector (3 per node)
  std::vector<bool> constrained;          // per DOF
};

/// Continuous vector Lagrange FEM of degree p_fem for div(sigma) = 0 on the
/// sub-mesh: u = g on the surface set, u = 0 on the box set, sliding (zero
/// normal displacement) on axis-aligned symmetry walls. SPD system after
/// constraint elimination, solved by preconditioned CG to relative residual
/// 1e-10 (direct Cholesky for small systems).
DeformationField solve_elasticity(const SubMesh& sub, const ElasticMaterial& material,
                                  const std::function<Vec3(const Vec3&)>& dirichlet_g,
                                  int p_fem, ElasticityDebug* debug = nullptr);

/// Applies the deformation field: every sub-mesh element gets curved
/// collocation coordinates (straight image + queried displacement); elements
/// outside stay affine. Validates the curved mapping Jacobians and throws
/// NumericsError listing offending elements on failure.
CurvedMesh curve_mesh(const Mesh& mesh, const SubMesh& sub, const DeformationField& field,
                      const ReferenceElement& re);

}  // namespace cdg
