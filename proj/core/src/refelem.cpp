#include "cdg/refelem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>

#include "cdg/jacobi.hpp"

namespace cdg {

namespace {

// Collapsed coordinates (a,b,c) of a reference-tet point, with the standard
// limit values on the singular lines (the basis prefactors vanish there).
void rst_to_abc(const Vec3& p, double& a, double& b, double& c) {
  const double r = p.x, s = p.y, t = p.z;
  a = (std::abs(s + t) > 1e-14) ? 2.0 * (1.0 + r) / (-s - t) - 1.0 : -1.0;
  b = (std::abs(1.0 - t) > 1e-14) ? 2.0 * (1.0 + s) / (1.0 - t) - 1.0 : -1.0;
  c = t;
}

// Degree-graded ordering of modal indices (i,j,k), total degree ascending.
// The grading makes the basis hierarchical across degrees.
std::vector<std::array<int, 3>> modal_index_order(int p) {
  std::vector<std::array<int, 3>> order;
  order.reserve(basis_count(p));
  for (int total = 0; total <= p; ++total)
    for (int i = 0; i <= total; ++i)
      for (int j = 0; j <= total - i; ++j) order.push_back({i, j, total - i - j});
  return order;
}

double simplex_basis(double a, double b, double c, int i, int j, int k) {
  const double h1 = jacobi_p(a, 0.0, 0.0, i);
  const double h2 = jacobi_p(b, 2.0 * i + 1.0, 0.0, j);
  const double h3 = jacobi_p(c, 2.0 * (i + j) + 2.0, 0.0, k);
  return 2.0 * std::sqrt(2.0) * h1 * h2 * std::pow(1.0 - b, i) * h3 *
         std::pow(1.0 - c, i + j);
}

// Gradient of the modal basis function (i,j,k) with respect to (r,s,t).
void simplex_basis_grad(double a, double b, double c, int id, int jd, int kd,
                        double& dr, double& ds, double& dt) {
  const double fa = jacobi_p(a, 0.0, 0.0, id);
  const double dfa = grad_jacobi_p(a, 0.0, 0.0, id);
  const double gb = jacobi_p(b, 2.0 * id + 1.0, 0.0, jd);
  const double dgb = grad_jacobi_p(b, 2.0 * id + 1.0, 0.0, jd);
  const double hc = jacobi_p(c, 2.0 * (id + jd) + 2.0, 0.0, kd);
  const double dhc = grad_jacobi_p(c, 2.0 * (id + jd) + 2.0, 0.0, kd);

  double vr = dfa * gb * hc;
  if (id > 0) vr *= std::pow(0.5 * (1.0 - b), id - 1);
  if (id + jd > 0) vr *= std::pow(0.5 * (1.0 - c), id + jd - 1);

  double vs = 0.5 * (1.0 + a) * vr;
  double tmp = dgb * std::pow(0.5 * (1.0 - b), id);
  if (id > 0) tmp += (-0.5 * id) * gb * std::pow(0.5 * (1.0 - b), id - 1);
  if (id + jd > 0) tmp *= std::pow(0.5 * (1.0 - c), id + jd - 1);
  tmp = fa * tmp * hc;
  vs += tmp;

  double vt = 0.5 * (1.0 + a) * vr + 0.5 * (1.0 + b) * tmp;
  double tmp2 = dhc * std::pow(0.5 * (1.0 - c), id + jd);
  if (id + jd > 0) tmp2 -= 0.5 * (id + jd) * hc * std::pow(0.5 * (1.0 - c), id + jd - 1);
  tmp2 = fa * gb * tmp2 * std::pow(0.5 * (1.0 - b), id);
  vt += tmp2;

  const double scale = std::pow(2.0, 2.0 * id + jd + 1.5);
  dr = vr * scale;
  ds = vs * scale;
  dt = vt * scale;
}

void check_inside_tet(const std::vector<Vec3>& points, double tol) {
  for (const auto& p : points) {
    if (p.x < -1.0 - tol || p.y < -1.0 - tol || p.z < -1.0 - tol ||
        p.x + p.y + p.z > -1.0 + tol) {
      throw DomainError("point (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                        "," + std::to_string(p.z) + ") outside reference tetrahedron");
    }
  }
}

// --- Warp & blend node construction (Warburton's explicit tet nodes) ---

// 1D edge warp: pulls equispaced edge nodes toward the Gauss-Lobatto points.
std::vector<double> eval_warp(int p, const std::vector<double>& xnodes,
                              const std::vector<double>& xout) {
  std::vector<double> warp(xout.size(), 0.0);
  std::vector<double> xeq(p + 1);
  for (int i = 0; i <= p; ++i) xeq[i] = -1.0 + 2.0 * (p - i) / static_cast<double>(p);

  for (int i = 0; i <= p; ++i) {
    std::vector<double> d(xout.size(), xnodes[i] - xeq[i]);
    for (int j = 1; j < p; ++j) {
      if (i != j) {
        for (size_t q = 0; q < xout.size(); ++q)
          d[q] *= (xout[q] - xeq[j]) / (xeq[i] - xeq[j]);
      }
    }
    if (i != 0)
      for (auto& v : d) v = -v / (xeq[i] - xeq[0]);
    if (i != p)
      for (auto& v : d) v = v / (xeq[i] - xeq[p]);
    for (size_t q = 0; q < xout.size(); ++q) warp[q] += d[q];
  }
  return warp;
}

// Tangential warp on one face of the equilateral tet, from the three edge warps.
void eval_shift(int p, double pval, const std::vector<double>& l1,
                const std::vector<double>& l2, const std::vector<double>& l3,
                std::vector<double>& dx, std::vector<double>& dy) {
  std::vector<double> gauss_x = gauss_lobatto(p);
  for (auto& g : gauss_x) g = -g;

  const size_t n = l1.size();
  std::vector<double> arg(n);

  auto warp_edge = [&](const std::vector<double>& la, const std::vector<double>& lb) {
    for (size_t q = 0; q < n; ++q) arg[q] = la[q] - lb[q];
    auto w = eval_warp(p, gauss_x, arg);
    for (auto& v : w) v *= 4.0;
    return w;
  };

  auto warp1 = warp_edge(l3, l2);
  auto warp2 = warp_edge(l1, l3);
  auto warp3 = warp_edge(l2, l1);

  dx.assign(n, 0.0);
  dy.assign(n, 0.0);
  const double c1 = std::cos(2.0 * M_PI / 3.0), s1 = std::sin(2.0 * M_PI / 3.0);
  const double c2 = std::cos(4.0 * M_PI / 3.0), s2 = std::sin(4.0 * M_PI / 3.0);
  for (size_t q = 0; q < n; ++q) {
    const double b1 = l2[q] * l3[q] * warp1[q] * (1.0 + std::pow(pval * l1[q], 2));
    const double b2 = l1[q] * l3[q] * warp2[q] * (1.0 + std::pow(pval * l2[q], 2));
    const double b3 = l1[q] * l2[q] * warp3[q] * (1.0 + std::pow(pval * l3[q], 2));
    dx[q] = 1.0 * b1 + c1 * b2 + c2 * b3;
    dy[q] = 0.0 * b1 + s1 * b2 + s2 * b3;
  }
}

}  // namespace

Eigen::MatrixXd modal_basis_eval(int p, const std::vector<Vec3>& points, double tol) {
  if (p < 0) throw ConfigError("modal_basis_eval: degree must be >= 0");
  check_inside_tet(points, tol);
  const auto order = modal_index_order(p);
  Eigen::MatrixXd v(points.size(), order.size());
  for (size_t q = 0; q < points.size(); ++q) {
    double a, b, c;
    rst_to_abc(points[q], a, b, c);
    for (size_t col = 0; col < order.size(); ++col)
      v(q, col) = simplex_basis(a, b, c, order[col][0], order[col][1], order[col][2]);
  }
  return v;
}

void modal_basis_grad(int p, const std::vector<Vec3>& points,
                      Eigen::MatrixXd& vr, Eigen::MatrixXd& vs, Eigen::MatrixXd& vt) {
  const auto order = modal_index_order(p);
  vr.resize(points.size(), order.size());
  vs.resize(points.size(), order.size());
  vt.resize(points.size(), order.size());
  for (size_t q = 0; q < points.size(); ++q) {
    double a, b, c;
    rst_to_abc(points[q], a, b, c);
    for (size_t col = 0; col < order.size(); ++col) {
      double dr, ds, dt;
      simplex_basis_grad(a, b, c, order[col][0], order[col][1], order[col][2], dr, ds, dt);
      vr(q, col) = dr;
      vs(q, col) = ds;
      vt(q, col) = dt;
    }
  }
}

std::vector<Vec3> build_colloc_nodes(int p) {
  if (p < 1 || p > 9) {
    throw ConfigError("build_colloc_nodes: supported degrees are 1..9, got " +
                      std::to_string(p));
  }

  // Published blend parameters per degree.
  static const double alpha_store[15] = {0.0,    0.0,    0.0,    0.1002, 1.1332,
                                         1.5608, 1.3413, 1.2577, 1.1603, 1.10153,
                                         0.6080, 0.4523, 0.8856, 0.8717, 0.9655};
  const double alpha = alpha_store[p - 1];

  const int np = basis_count(p);
  const double tol = 1e-10;

  // Equidistributed barycentric lattice on the reference tet.
  std::vector<double> r, s, t;
  r.reserve(np);
  s.reserve(np);
  t.reserve(np);
  for (int n = 0; n <= p; ++n)
    for (int m = 0; m <= p - n; ++m)
      for (int q = 0; q <= p - n - m; ++q) {
        r.push_back(-1.0 + 2.0 * q / p);
        s.push_back(-1.0 + 2.0 * m / p);
        t.push_back(-1.0 + 2.0 * n / p);
      }

  std::vector<double> l1(np), l2(np), l3(np), l4(np);
  for (int i = 0; i < np; ++i) {
    l1[i] = (1.0 + t[i]) / 2.0;
    l2[i] = (1.0 + s[i]) / 2.0;
    l3[i] = -(1.0 + r[i] + s[i] + t[i]) / 2.0;
    l4[i] = (1.0 + r[i]) / 2.0;
  }

  // Equilateral tetrahedron vertices and per-face orthogonal tangent frames.
  const Vec3 v1{-1.0, -1.0 / std::sqrt(3.0), -1.0 / std::sqrt(6.0)};
  const Vec3 v2{1.0, -1.0 / std::sqrt(3.0), -1.0 / std::sqrt(6.0)};
  const Vec3 v3{0.0, 2.0 / std::sqrt(3.0), -1.0 / std::sqrt(6.0)};
  const Vec3 v4{0.0, 0.0, 3.0 / std::sqrt(6.0)};

  std::array<Vec3, 4> t1 = {v2 - v1, v2 - v1, v3 - v2, v3 - v1};
  std::array<Vec3, 4> t2 = {v3 - (v1 + v2) * 0.5, v4 - (v1 + v2) * 0.5,
                            v4 - (v2 + v3) * 0.5, v4 - (v1 + v3) * 0.5};
  for (int f = 0; f < 4; ++f) {
    t1[f] = t1[f] / norm(t1[f]);
    t2[f] = t2[f] / norm(t2[f]);
  }

  std::vector<Vec3> xyz(np);
  for (int i = 0; i < np; ++i)
    xyz[i] = l3[i] * v1 + l4[i] * v2 + l2[i] * v3 + l1[i] * v4;

  std::vector<Vec3> shift(np, Vec3{0, 0, 0});
  for (int face = 0; face < 4; ++face) {
    const std::vector<double>*la, *lb, *lc, *ld;
    switch (face) {
      case 0: la = &l1; lb = &l2; lc = &l3; ld = &l4; break;
      case 1: la = &l2; lb = &l1; lc = &l3; ld = &l4; break;
      case 2: la = &l3; lb = &l1; lc = &l4; ld = &l2; break;
      default: la = &l4; lb = &l1; lc = &l3; ld = &l2; break;
    }

    std::vector<double> warp1, warp2;
    eval_shift(p, alpha, *lb, *lc, *ld, warp1, warp2);

    for (int i = 0; i < np; ++i) {
      double blend = (*lb)[i] * (*lc)[i] * (*ld)[i];
      const double denom = ((*lb)[i] + 0.5 * (*la)[i]) * ((*lc)[i] + 0.5 * (*la)[i]) *
                           ((*ld)[i] + 0.5 * (*la)[i]);
      if (denom > tol)
        blend = (1.0 + std::pow(alpha * (*la)[i], 2)) * blend / denom;

      shift[i] += (blend * warp1[i]) * t1[face] + (blend * warp2[i]) * t2[face];

      // Points on this face get the pure surface warp.
      const bool on_face = (*la)[i] < tol;
      const int interior_count = ((*lb)[i] > tol) + ((*lc)[i] > tol) + ((*ld)[i] > tol);
      if (on_face && interior_count < 3)
        shift[i] = warp1[i] * t1[face] + warp2[i] * t2[face];
    }
  }
  for (int i = 0; i < np; ++i) xyz[i] += shift[i];

  // Map back from the equilateral tet to the reference tet.
  // XYZ = l3 v1 + l4 v2 + l2 v3 + l1 v4 with l's affine in (r,s,t), so invert
  // the 3x3 system [v2-v1 | v3-v1 | v4-v1] * ((r,s,t)+1)/2 = XYZ - v1 ... using
  // barycentric relations: r = l4*2-1 etc. recovered via least squares below.
  Eigen::Matrix3d a;
  const Vec3 c1 = 0.5 * (v2 - v1), c2 = 0.5 * (v3 - v1), c3 = 0.5 * (v4 - v1);
  a << c1.x, c2.x, c3.x, c1.y, c2.y, c3.y, c1.z, c2.z, c3.z;
  const Eigen::Matrix3d ainv = a.inverse();
  std::vector<Vec3> nodes(np);
  for (int i = 0; i < np; ++i) {
    // XYZ = v1 + c1 (r+1) + c2 (s+1) + c3 (t+1)
    const Vec3 rel = xyz[i] - v1;
    Eigen::Vector3d rhs(rel.x, rel.y, rel.z);
    Eigen::Vector3d rst = ainv * rhs;
    nodes[i] = Vec3{rst(0) - 1.0, rst(1) - 1.0, rst(2) - 1.0};
  }
  return nodes;
}

const std::array<Vec3, 4>& ReferenceElement::vertices() {
  static const std::array<Vec3, 4> v = {Vec3{-1, -1, -1}, Vec3{1, -1, -1},
                                        Vec3{-1, 1, -1}, Vec3{-1, -1, 1}};
  return v;
}

const std::array<std::array<int, 3>, 4>& ReferenceElement::face_vertices() {
  // Faces: t=-1, s=-1, r+s+t=-1, r=-1; ordered so tangent1 x tangent2 points out.
  static const std::array<std::array<int, 3>, 4> f = {
      std::array<int, 3>{0, 2, 1},   // t = -1, outward normal (0,0,-1)
      std::array<int, 3>{0, 1, 3},   // s = -1, outward normal (0,-1,0)
      std::array<int, 3>{1, 2, 3},   // r+s+t = -1, outward normal (1,1,1)/sqrt(3)
      std::array<int, 3>{0, 3, 2}};  // r = -1, outward normal (-1,0,0)
  return f;
}

ReferenceElement::ReferenceElement(int p, int cubature_strength_override,
                                   int face_strength_override) {
  if (p < 1 || p > 9)
    throw ConfigError("ReferenceElement: supported degrees are 1..9, got " +
                      std::to_string(p));
  degree_ = p;
  n_basis_ = basis_count(p);

  colloc_nodes_ = build_colloc_nodes(p);

  const int cub_strength =
      cubature_strength_override > 0 ? cubature_strength_override : 2 * p + 1;
  TetCubature cub = tet_cubature(cub_strength);
  cub_nodes_ = std::move(cub.nodes);
  cub_weights_ = std::move(cub.weights);

  const int face_strength = face_strength_override > 0 ? face_strength_override : 2 * p;
  TriQuadrature tri = tri_quadrature(face_strength);
  n_face_quad_ = static_cast<int>(tri.a.size());
  face_weights_ = tri.weights;

  // Embed the 2D rule in each reference face via its vertex chart:
  // x(a,b) = A + (a+1)/2 (B-A) + (b+1)/2 (C-A).
  face_nodes_.reserve(4 * n_face_quad_);
  for (int f = 0; f < 4; ++f) {
    const auto& fv = face_vertices()[f];
    const Vec3 a = vertices()[fv[0]], b = vertices()[fv[1]], c = vertices()[fv[2]];
    for (int q = 0; q < n_face_quad_; ++q) {
      const double u = (tri.a[q] + 1.0) / 2.0, v = (tri.b[q] + 1.0) / 2.0;
      face_nodes_.push_back(a + u * (b - a) + v * (c - a));
    }
  }

  vandermonde_ = modal_basis_eval(p, colloc_nodes_);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(vandermonde_);
  if (!lu.isInvertible())
    throw NumericsError("ReferenceElement: singular Vandermonde matrix at p=" +
                        std::to_string(p));
  vandermonde_inv_ = lu.inverse();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(vandermonde_);
  v_cond_ = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);

  modal_basis_grad(p, cub_nodes_, vr_, vs_, vt_);
  face_vandermonde_ = modal_basis_eval(p, face_nodes_);

  interp_cub_ = modal_basis_eval(p, cub_nodes_) * vandermonde_inv_;
  interp_face_ = face_vandermonde_ * vandermonde_inv_;
  dr_ = vr_ * vandermonde_inv_;
  ds_ = vs_ * vandermonde_inv_;
  dt_ = vt_ * vandermonde_inv_;

  Eigen::MatrixXd fvr, fvs, fvt;
  modal_basis_grad(p, face_nodes_, fvr, fvs, fvt);
  fdr_ = fvr * vandermonde_inv_;
  fds_ = fvs * vandermonde_inv_;
  fdt_ = fvt * vandermonde_inv_;
}

Eigen::MatrixXd ReferenceElement::lagrange_eval(const std::vector<Vec3>& points) const {
  return modal_basis_eval(degree_, points, 1e-9) * vandermonde_inv_;
}

void ReferenceElement::dump_tables(std::ostream& os) const {
  os.precision(17);
  os << "REFELEM-TABLES v1\n";
  os << "degree " << degree_ << "\n";
  auto dump_points = [&os](const char* name, const std::vector<Vec3>& pts) {
    os << name << " " << pts.size() << " 3\n";
    for (const auto& p : pts) os << p.x << " " << p.y << " " << p.z << "\n";
  };
  auto dump_vector = [&os](const char* name, const std::vector<double>& v) {
    os << name << " " << v.size() << " 1\n";
    for (double x : v) os << x << "\n";
  };
  auto dump_matrix = [&os](const char* name, const Eigen::MatrixXd& m) {
    os << name << " " << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        os << m(i, j) << (j + 1 < m.cols() ? " " : "");
      os << "\n";
    }
  };
  dump_points("colloc_nodes", colloc_nodes_);
  dump_points("cub_nodes", cub_nodes_);
  dump_vector("cub_weights", cub_weights_);
  dump_points("face_nodes", face_nodes_);
  dump_vector("face_weights", face_weights_);
  dump_matrix("vandermonde", vandermonde_);
  dump_matrix("grad_vandermonde_r", vr_);
  dump_matrix("grad_vandermonde_s", vs_);
  dump_matrix("grad_vandermonde_t", vt_);
  dump_matrix("face_vandermonde", face_vandermonde_);
  dump_matrix("interp_cub", interp_cub_);
  dump_matrix("interp_face", interp_face_);
  dump_matrix("deriv_r", dr_);
  dump_matrix("deriv_s", ds_);
  dump_matrix("deriv_t", dt_);
}

std::shared_ptr<const ReferenceElement> get_reference_element(
    int p, int cubature_strength_override, int face_strength_override) {
  static std::mutex mutex;
  static std::map<std::array<int, 3>, std::shared_ptr<const ReferenceElement>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  const std::array<int, 3> key = {p, cubature_strength_override, face_strength_override};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto elem = std::make_shared<const ReferenceElement>(p, cubature_strength_override,
                                                       face_strength_override);
  cache.emplace(key, elem);
  return elem;
}

}  // namespace cdg
