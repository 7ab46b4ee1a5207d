#include "cdg/operators.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace cdg {

void ElementOperators::mass_solve(const double* b, double* x) const {
  // forward substitution L y = b, then back substitution L^T x = y
  const int n = n_basis;
  const double* l = mass_chol.data();
  for (int i = 0; i < n; ++i) {
    double sum = b[i];
    for (int j = 0; j < i; ++j) sum -= l[j * n + i] * x[j];
    x[i] = sum / l[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double sum = x[i];
    for (int j = i + 1; j < n; ++j) sum -= l[i * n + j] * x[j];
    x[i] = sum / l[i * n + i];
  }
}

SharedOperators make_shared_operators(const ReferenceElement& re, bool padded) {
  SharedOperators out;
  out.interp_cub = std::make_shared<PaddedMatrix>(PaddedMatrix::from(re.interp_cub(), padded));
  out.interp_face =
      std::make_shared<PaddedMatrix>(PaddedMatrix::from(re.interp_face(), padded));
  return out;
}

ElementGeometry compute_mapping(const std::vector<Vec3>& phys_nodes,
                                const ReferenceElement& re, int element_id) {
  const int np = re.n_basis();
  if (static_cast<int>(phys_nodes.size()) != np)
    throw ConfigError("compute_mapping: expected " + std::to_string(np) +
                      " physical nodes");

  ElementGeometry geom;
  geom.phys_nodes = phys_nodes;

  Eigen::MatrixXd x(np, 3);
  for (int i = 0; i < np; ++i) {
    x(i, 0) = phys_nodes[i].x;
    x(i, 1) = phys_nodes[i].y;
    x(i, 2) = phys_nodes[i].z;
  }

  auto fill = [&](const Eigen::MatrixXd& dxr, const Eigen::MatrixXd& dxs,
                  const Eigen::MatrixXd& dxt, int q, std::array<double, 9>& drdx,
                  double& jac, Eigen::Matrix3d* fwd_out) {
    Eigen::Matrix3d f;  // f(i,m) = dx_i/dr_m
    for (int i = 0; i < 3; ++i) {
      f(i, 0) = dxr(q, i);
      f(i, 1) = dxs(q, i);
      f(i, 2) = dxt(q, i);
    }
    const double det = f.determinant();
    if (det <= 1e-14)
      throw NumericsError("inverted element" +
                          (element_id >= 0 ? " " + std::to_string(element_id) : "") +
                          ": mapping Jacobian " + std::to_string(det) +
                          " at quadrature node " + std::to_string(q));
    jac = det;
    const Eigen::Matrix3d inv = f.inverse();  // inv(m,i) = dr_m/dx_i
    for (int m = 0; m < 3; ++m)
      for (int i = 0; i < 3; ++i) drdx[m * 3 + i] = inv(m, i);
    if (fwd_out) *fwd_out = f;
  };

  // Cubature nodes.
  const Eigen::MatrixXd cxr = re.deriv_r() * x;
  const Eigen::MatrixXd cxs = re.deriv_s() * x;
  const Eigen::MatrixXd cxt = re.deriv_t() * x;
  const int ncub = re.n_cub();
  geom.cub_dr.resize(ncub);
  geom.cub_jac.resize(ncub);
  for (int q = 0; q < ncub; ++q)
    fill(cxr, cxs, cxt, q, geom.cub_dr[q], geom.cub_jac[q], nullptr);

  geom.volume = 0.0;
  for (int q = 0; q < ncub; ++q) geom.volume += re.cub_weights()[q] * geom.cub_jac[q];

  // Face quadrature nodes: tangents of the face chart give normal and sjac.
  const Eigen::MatrixXd fxr = re.face_deriv_r() * x;
  const Eigen::MatrixXd fxs = re.face_deriv_s() * x;
  const Eigen::MatrixXd fxt = re.face_deriv_t() * x;
  const Eigen::MatrixXd fphys = re.interp_face() * x;
  const int ng = re.n_face_quad();
  const int nf = 4 * ng;
  geom.face_normal.resize(nf);
  geom.face_sjac.resize(nf);
  geom.face_dr.resize(nf);
  geom.face_jac.resize(nf);
  geom.face_phys.resize(nf);
  geom.surface_area = 0.0;

  for (int f = 0; f < 4; ++f) {
    const auto& fv = ReferenceElement::face_vertices()[f];
    const auto& verts = ReferenceElement::vertices();
    const Vec3 ra = 0.5 * (verts[fv[1]] - verts[fv[0]]);  // dr/da of the chart
    const Vec3 rb = 0.5 * (verts[fv[2]] - verts[fv[0]]);  // dr/db
    for (int g = 0; g < ng; ++g) {
      const int q = f * ng + g;
      Eigen::Matrix3d fwd;
      fill(fxr, fxs, fxt, q, geom.face_dr[q], geom.face_jac[q], &fwd);
      const Eigen::Vector3d era(ra.x, ra.y, ra.z), erb(rb.x, rb.y, rb.z);
      const Eigen::Vector3d xa = fwd * era, xb = fwd * erb;
      const Eigen::Vector3d nraw = xa.cross(xb);
      const double sjac = nraw.norm();
      if (sjac <= 1e-14)
        throw NumericsError("degenerate face mapping on element " +
                            std::to_string(element_id));
      geom.face_sjac[q] = sjac;
      geom.face_normal[q] = Vec3{nraw(0), nraw(1), nraw(2)} / sjac;
      geom.face_phys[q] = {fphys(q, 0), fphys(q, 1), fphys(q, 2)};
      geom.surface_area += re.face_weights()[g] * sjac;
    }
  }
  return geom;
}

ElementOperators build_operators(const ElementGeometry& geom, const ReferenceElement& re,
                                 const SharedOperators& shared, bool padded) {
  ElementOperators ops;
  const int np = re.n_basis();
  const int ncub = re.n_cub();
  const int nf = 4 * re.n_face_quad();
  ops.n_basis = np;
  ops.n_cub = ncub;
  ops.n_face = nf;
  ops.interp_cub = shared.interp_cub;
  ops.interp_face = shared.interp_face;

  // Stiffness: S_x = (D_r^T diag(r_x) + D_s^T diag(s_x) + D_t^T diag(t_x)) diag(J W)
  Eigen::VectorXd jw(ncub);
  for (int q = 0; q < ncub; ++q) jw(q) = geom.cub_jac[q] * re.cub_weights()[q];

  for (int dim = 0; dim < 3; ++dim) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(np, ncub);
    const Eigen::MatrixXd* d[3] = {&re.deriv_r(), &re.deriv_s(), &re.deriv_t()};
    for (int m = 0; m < 3; ++m) {
      Eigen::VectorXd metric(ncub);
      for (int q = 0; q < ncub; ++q) metric(q) = geom.cub_dr[q][m * 3 + dim];
      s += d[m]->transpose() * metric.asDiagonal();
    }
    s = s * jw.asDiagonal();
    ops.s[dim] = PaddedMatrix::from(s, padded);
  }

  // Mass and its Cholesky factor.
  const Eigen::MatrixXd m = re.interp_cub().transpose() * jw.asDiagonal() * re.interp_cub();
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericsError("build_operators: mass matrix factorization failed");
  ops.mass.assign(m.data(), m.data() + np * np);
  const Eigen::MatrixXd l = llt.matrixL();
  ops.mass_chol.assign(l.data(), l.data() + np * np);

  // Face mass: M_dOmega = I_g^T diag(sjac * w2d)
  Eigen::VectorXd sjw(nf);
  const int ng = re.n_face_quad();
  for (int q = 0; q < nf; ++q) sjw(q) = geom.face_sjac[q] * re.face_weights()[q % ng];
  const Eigen::MatrixXd fm = re.interp_face().transpose() * sjw.asDiagonal();
  ops.face_mass = PaddedMatrix::from(fm, padded);
  return ops;
}

double discrete_divergence_check(const ElementGeometry& geom,
                                 const ElementOperators& ops,
                                 const ReferenceElement& re) {
  const int np = ops.n_basis;
  const int ncub = ops.n_cub;
  const int nf = ops.n_face;
  std::vector<double> ones(ncub, 1.0);
  std::vector<double> vol(np), fstar(nf), surf(np), resid(np);
  double worst = 0.0;
  for (int dim = 0; dim < 3; ++dim) {
    for (int i = 0; i < np; ++i) vol[i] = 0.0;
    gemv_acc(ops.s[dim], ones.data(), vol.data());
    for (int q = 0; q < nf; ++q) fstar[q] = geom.face_normal[q][dim];
    gemv(ops.face_mass, fstar.data(), surf.data());
    for (int i = 0; i < np; ++i) vol[i] -= surf[i];
    ops.mass_solve(vol.data(), resid.data());
    for (int i = 0; i < np; ++i) worst = std::max(worst, std::abs(resid[i]));
  }
  (void)re;
  return worst;
}

}  // namespace cdg
