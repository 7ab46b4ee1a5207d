#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>
#include <vector>

#include "cdg/quadrature.hpp"
#include "cdg/types.hpp"

namespace cdg {

/// Number of polynomial basis functions of total degree <= p in 3D.
inline int basis_count(int p) { return (p + 1) * (p + 2) * (p + 3) / 6; }

/// Orthonormal, hierarchical modal basis on the reference tetrahedron
/// T = { -1 <= r,s,t ; r+s+t <= -1 }, evaluated at the given points.
/// Column j of the result holds psi_j; basis functions are ordered by total
/// degree, so the first basis_count(p-1) columns equal the degree-(p-1) basis.
/// Points more than `tol` outside the closed tetrahedron raise DomainError.
Eigen::MatrixXd modal_basis_eval(int p, const std::vector<Vec3>& points,
                                 double tol = 1e-12);

/// Gradients of the modal basis: three matrices (d/dr, d/ds, d/dt).
void modal_basis_grad(int p, const std::vector<Vec3>& points,
                      Eigen::MatrixXd& vr, Eigen::MatrixXd& vs, Eigen::MatrixXd& vt);

/// Warp & blend interpolation nodes for degree 1 <= p <= 9.
std::vector<Vec3> build_colloc_nodes(int p);

/// All degree-dependent reference-tetrahedron data used by the solver.
class ReferenceElement {
 public:
  /// Builds tables for degree p (1..9). The overrides replace the default
  /// volume rule strength 2p+1 and face rule strength 2p when positive;
  /// curved-element runs raise them so the isoparametric metric terms stay
  /// exactly integrated.
  explicit ReferenceElement(int p, int cubature_strength_override = 0,
                            int face_strength_override = 0);

  int degree() const { return degree_; }
  int n_basis() const { return n_basis_; }
  int n_cub() const { return static_cast<int>(cub_nodes_.size()); }
  int n_face_quad() const { return n_face_quad_; }  // per face

  const std::vector<Vec3>& colloc_nodes() const { return colloc_nodes_; }
  const std::vector<Vec3>& cub_nodes() const { return cub_nodes_; }
  const std::vector<double>& cub_weights() const { return cub_weights_; }
  /// Face quadrature nodes embedded in the reference tet, face-major:
  /// 4 * n_face_quad() points, face f occupying [f*n_face_quad, (f+1)*n_face_quad).
  const std::vector<Vec3>& face_nodes() const { return face_nodes_; }
  /// Weights of the underlying 2D triangle rule (sum to 2, the area of the
  /// reference face triangle); shared by all four faces.
  const std::vector<double>& face_weights() const { return face_weights_; }

  const Eigen::MatrixXd& vandermonde() const { return vandermonde_; }
  const Eigen::MatrixXd& vandermonde_inv() const { return vandermonde_inv_; }
  /// Gradient Vandermonde matrices at the cubature nodes.
  const Eigen::MatrixXd& grad_vandermonde_r() const { return vr_; }
  const Eigen::MatrixXd& grad_vandermonde_s() const { return vs_; }
  const Eigen::MatrixXd& grad_vandermonde_t() const { return vt_; }
  /// Modal basis at all 4*n_face_quad face quadrature nodes.
  const Eigen::MatrixXd& face_vandermonde() const { return face_vandermonde_; }

  /// Nodal interpolation operators I_cub = V_cub V^-1 and I_g = V_g V^-1.
  const Eigen::MatrixXd& interp_cub() const { return interp_cub_; }
  const Eigen::MatrixXd& interp_face() const { return interp_face_; }
  /// Nodal derivative operators D = V_x V^-1 evaluated at cubature nodes.
  const Eigen::MatrixXd& deriv_r() const { return dr_; }
  const Eigen::MatrixXd& deriv_s() const { return ds_; }
  const Eigen::MatrixXd& deriv_t() const { return dt_; }
  /// Same derivative operators evaluated at the face quadrature nodes.
  const Eigen::MatrixXd& face_deriv_r() const { return fdr_; }
  const Eigen::MatrixXd& face_deriv_s() const { return fds_; }
  const Eigen::MatrixXd& face_deriv_t() const { return fdt_; }

  double vandermonde_condition() const { return v_cond_; }

  /// Local face number (0..3) -> the 3 vertex ids (0..3) of that face of the
  /// reference tet, ordered so the right-handed tangent cross product points
  /// outward. Vertex order: (-1,-1,-1),(1,-1,-1),(-1,1,-1),(-1,-1,1).
  static const std::array<std::array<int, 3>, 4>& face_vertices();
  static const std::array<Vec3, 4>& vertices();

  /// Nodal Lagrange basis values at arbitrary reference points:
  /// row i = point, column j = l_j(point).
  Eigen::MatrixXd lagrange_eval(const std::vector<Vec3>& points) const;

  /// Versioned plain-text dump of every table, for cross-language golden tests.
  void dump_tables(std::ostream& os) const;

 private:
  int degree_ = 0;
  int n_basis_ = 0;
  int n_face_quad_ = 0;
  std::vector<Vec3> colloc_nodes_;
  std::vector<Vec3> cub_nodes_;
  std::vector<double> cub_weights_;
  std::vector<Vec3> face_nodes_;
  std::vector<double> face_weights_;
  Eigen::MatrixXd vandermonde_, vandermonde_inv_;
  Eigen::MatrixXd vr_, vs_, vt_;
  Eigen::MatrixXd face_vandermonde_;
  Eigen::MatrixXd interp_cub_, interp_face_;
  Eigen::MatrixXd dr_, ds_, dt_;
  Eigen::MatrixXd fdr_, fds_, fdt_;
  double v_cond_ = 0.0;
};

/// Shared, immutable reference elements cached per (degree, strengths).
std::shared_ptr<const ReferenceElement> get_reference_element(
    int p, int cubature_strength_override = 0, int face_strength_override = 0);

/// Quadrature strengths that keep the DG metric terms of a degree-p
/// isoparametric map exactly integrated: volume 3p-3, face 3p-2 (the
/// defaults 2p+1 / 2p already cover straight and mildly curved cases up to
/// the stated degrees).
inline int curved_volume_strength(int p) { return std::max(2 * p + 1, 3 * p - 3); }
inline int curved_face_strength(int p) { return std::max(2 * p, 3 * p - 2); }

}  // namespace cdg
