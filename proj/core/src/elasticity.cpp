#include "cdg/elasticity.hpp"

#include "cdg/operators.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace cdg {

ElasticMaterial ElasticMaterial::from_E_nu(double e, double nu) {
  if (e <= 0.0) throw ConfigError("ElasticMaterial: Young's modulus must be positive");
  if (nu <= -1.0 || nu >= 0.5)
    throw ConfigError("ElasticMaterial: Poisson ratio must lie in (-1, 0.5)");
  ElasticMaterial m;
  m.youngs_modulus = e;
  m.poisson_ratio = nu;
  m.lame_lambda = nu * e / ((1.0 + nu) * (1.0 - 2.0 * nu));
  m.lame_mu = e / (2.0 * (1.0 + nu));
  return m;
}

namespace {

// Merges geometrically coincident points: grid hash with neighbor-cell probe.
class PointMerger {
 public:
  explicit PointMerger(double tol) : tol_(tol), inv_cell_(1.0 / (4.0 * tol)) {}

  int insert(const Vec3& p, std::vector<Vec3>& coords) {
    const long long cx = cell(p.x), cy = cell(p.y), cz = cell(p.z);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy)
        for (long long dz = -1; dz <= 1; ++dz) {
          auto it = cells_.find(key(cx + dx, cy + dy, cz + dz));
          if (it == cells_.end()) continue;
          for (int idx : it->second)
            if (norm(coords[idx] - p) < tol_) return idx;
        }
    const int idx = static_cast<int>(coords.size());
    coords.push_back(p);
    cells_[key(cx, cy, cz)].push_back(idx);
    return idx;
  }

 private:
  long long cell(double v) const { return static_cast<long long>(std::floor(v * inv_cell_)); }
  static size_t key(long long x, long long y, long long z) {
    size_t h = std::hash<long long>{}(x);
    h ^= std::hash<long long>{}(y) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<long long>{}(z) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
  double tol_;
  double inv_cell_;
  std::unordered_map<size_t, std::vector<int>> cells_;
};

// Reference collocation nodes lying on each local face.
std::array<std::vector<int>, 4> face_node_sets(const ReferenceElement& re) {
  std::array<std::vector<int>, 4> sets;
  const double tol = 1e-9;
  for (int i = 0; i < re.n_basis(); ++i) {
    const Vec3& r = re.colloc_nodes()[i];
    if (std::abs(r.z + 1.0) < tol) sets[0].push_back(i);
    if (std::abs(r.y + 1.0) < tol) sets[1].push_back(i);
    if (std::abs(r.x + r.y + r.z + 1.0) < tol) sets[2].push_back(i);
    if (std::abs(r.x + 1.0) < tol) sets[3].push_back(i);
  }
  return sets;
}

// Axis of an axis-aligned face (all vertices share a coordinate), or -1.
int face_axis(const std::array<Vec3, 4>& verts, const std::array<int, 3>& fv,
              double scale) {
  for (int axis = 0; axis < 3; ++axis) {
    const double v0 = verts[fv[0]][axis];
    if (std::abs(verts[fv[1]][axis] - v0) < 1e-9 * scale &&
        std::abs(verts[fv[2]][axis] - v0) < 1e-9 * scale)
      return axis;
  }
  return -1;
}

}  // namespace

void DeformationField::build_grid() {
  grid_min_ = {1e300, 1e300, 1e300};
  grid_max_ = {-1e300, -1e300, -1e300};
  for (const auto& ev : elem_verts_) {
    for (const auto& v : ev) {
      for (int a = 0; a < 3; ++a) {
        grid_min_[a] = std::min(grid_min_[a], v[a]);
        grid_max_[a] = std::max(grid_max_[a], v[a]);
      }
    }
  }
  const int ne = static_cast<int>(elem_verts_.size());
  const int target = std::max(1, static_cast<int>(std::cbrt(ne / 4.0)));
  for (int a = 0; a < 3; ++a) grid_n_[a] = target;
  grid_cells_.assign(static_cast<size_t>(grid_n_[0]) * grid_n_[1] * grid_n_[2], {});

  auto clamp_cell = [&](double frac, int n) {
    return std::clamp(static_cast<int>(frac * n), 0, n - 1);
  };
  for (int e = 0; e < ne; ++e) {
    Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (const auto& v : elem_verts_[e])
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], v[a]);
        hi[a] = std::max(hi[a], v[a]);
      }
    int c0[3], c1[3];
    for (int a = 0; a < 3; ++a) {
      const double span = std::max(grid_max_[a] - grid_min_[a], 1e-300);
      c0[a] = clamp_cell((lo[a] - grid_min_[a]) / span - 1e-12, grid_n_[a]);
      c1[a] = clamp_cell((hi[a] - grid_min_[a]) / span + 1e-12, grid_n_[a]);
    }
    for (int i = c0[0]; i <= c1[0]; ++i)
      for (int j = c0[1]; j <= c1[1]; ++j)
        for (int k = c0[2]; k <= c1[2]; ++k)
          grid_cells_[(static_cast<size_t>(k) * grid_n_[1] + j) * grid_n_[0] + i]
              .push_back(e);
  }
}

int DeformationField::locate(const Vec3& x, double* bary_out) const {
  int ci[3];
  for (int a = 0; a < 3; ++a) {
    const double span = std::max(grid_max_[a] - grid_min_[a], 1e-300);
    const double frac = (x[a] - grid_min_[a]) / span;
    if (frac < -1e-9 || frac > 1.0 + 1e-9) return -1;
    ci[a] = std::clamp(static_cast<int>(frac * grid_n_[a]), 0, grid_n_[a] - 1);
  }
  const auto& cands =
      grid_cells_[(static_cast<size_t>(ci[2]) * grid_n_[1] + ci[1]) * grid_n_[0] + ci[0]];

  auto try_element = [&](int e) -> bool {
    const auto& v = elem_verts_[e];
    // barycentric coordinates from the affine map
    Eigen::Matrix3d a;
    const Vec3 d1 = v[1] - v[0], d2 = v[2] - v[0], d3 = v[3] - v[0];
    a << d1.x, d2.x, d3.x, d1.y, d2.y, d3.y, d1.z, d2.z, d3.z;
    const Vec3 rel = x - v[0];
    const Eigen::Vector3d lam = a.partialPivLu().solve(Eigen::Vector3d(rel.x, rel.y, rel.z));
    const double l2 = lam(0), l3 = lam(1), l4 = lam(2), l1 = 1.0 - l2 - l3 - l4;
    const double tol = -1e-8;
    if (l1 < tol || l2 < tol || l3 < tol || l4 < tol) return false;
    bary_out[0] = l1;
    bary_out[1] = l2;
    bary_out[2] = l3;
    bary_out[3] = l4;
    return true;
  };

  for (int e : cands)
    if (try_element(e)) return e;
  // fallback scan (points marginally outside every candidate cell)
  for (int e = 0; e < static_cast<int>(elem_verts_.size()); ++e)
    if (try_element(e)) return e;
  return -1;
}

Vec3 DeformationField::displacement(const Vec3& x, bool* inside) const {
  double bary[4];
  const int e = locate(x, bary);
  if (e < 0) {
    if (inside) *inside = false;
    return {0, 0, 0};
  }
  if (inside) *inside = true;
  // reference coordinates from barycentric
  const Vec3 r{2.0 * bary[1] - 1.0, 2.0 * bary[2] - 1.0, 2.0 * bary[3] - 1.0};
  const Eigen::MatrixXd lag = re_->lagrange_eval({r});
  Vec3 u{0, 0, 0};
  const auto& ids = elem_nodes_[e];
  for (int j = 0; j < re_->n_basis(); ++j) u += lag(0, j) * node_values_[ids[j]];
  return u;
}

DeformationField solve_elasticity(const SubMesh& sub, const ElasticMaterial& material,
                                  const std::function<Vec3(const Vec3&)>& dirichlet_g,
                                  int p_fem, ElasticityDebug* debug) {
  if (p_fem < 1) throw ConfigError("solve_elasticity: p_fem must be >= 1");
  if (sub.n_elements() == 0) throw ConfigError("solve_elasticity: empty sub-mesh");
  const Mesh& mesh = *sub.parent;

  DeformationField field;
  field.p_fem_ = p_fem;
  // FEM assembly integrates products of gradients: strength 2 p_fem suffices
  field.re_ = get_reference_element(p_fem, std::max(2 * p_fem, 2));
  const ReferenceElement& re = *field.re_;
  const int np = re.n_basis();
  const int ne = sub.n_elements();

  // Global scale for merge tolerance.
  double scale = 0.0;
  for (int se = 0; se < ne; ++se) {
    const auto v = mesh.tet_vertices(sub.elements[se]);
    for (int i = 1; i < 4; ++i) scale = std::max(scale, norm(v[i] - v[0]));
  }

  // Global node numbering by geometric merge of per-element Lagrange nodes.
  PointMerger merger(1e-8 * scale);
  field.elem_verts_.resize(ne);
  field.elem_nodes_.assign(ne, std::vector<int>(np));
  for (int se = 0; se < ne; ++se) {
    const int e = sub.elements[se];
    field.elem_verts_[se] = mesh.tet_vertices(e);
    const auto nodes = CurvedMesh::straight_nodes(mesh, e, re);
    for (int i = 0; i < np; ++i)
      field.elem_nodes_[se][i] = merger.insert(nodes[i], field.node_coords_);
  }
  const int n_nodes = static_cast<int>(field.node_coords_.size());
  const int n_dofs = 3 * n_nodes;

  // Constraints: value-fixed DOFs. Order of application: symmetry (sliding),
  // then box Dirichlet, then surface Dirichlet (strongest wins on overlap).
  std::vector<char> fixed(n_dofs, 0);
  std::vector<double> fixed_value(n_dofs, 0.0);
  const auto fsets = face_node_sets(re);

  auto apply = [&](SubBoundaryKind kind) {
    for (const auto& bf : sub.boundary) {
      if (bf.kind != kind) continue;
      const int se = bf.sub_element;
      if (kind == SubBoundaryKind::Symmetry) {
        const auto& fv = ReferenceElement::face_vertices()[bf.local_face];
        const int axis = face_axis(field.elem_verts_[se], fv, scale);
        if (axis < 0)
          throw ConfigError(
              "solve_elasticity: symmetry wall is not axis-aligned (unsupported)");
        for (int i : fsets[bf.local_face]) {
          const int node = field.elem_nodes_[se][i];
          fixed[3 * node + axis] = 1;
          fixed_value[3 * node + axis] = 0.0;
        }
      } else {
        for (int i : fsets[bf.local_face]) {
          const int node = field.elem_nodes_[se][i];
          const Vec3 g = (kind == SubBoundaryKind::SurfaceDirichlet)
                             ? dirichlet_g(field.node_coords_[node])
                             : Vec3{0, 0, 0};
          for (int a = 0; a < 3; ++a) {
            fixed[3 * node + a] = 1;
            fixed_value[3 * node + a] = g[a];
          }
        }
      }
    }
  };
  apply(SubBoundaryKind::Symmetry);
  apply(SubBoundaryKind::BoxDirichlet);
  apply(SubBoundaryKind::SurfaceDirichlet);

  // sliding walls alone leave in-plane rigid motions unconstrained
  bool has_dirichlet = false;
  for (const auto& bf : sub.boundary)
    has_dirichlet = has_dirichlet || bf.kind != SubBoundaryKind::Symmetry;
  if (!has_dirichlet)
    throw ConfigError("solve_elasticity: no Dirichlet faces; system is singular");

  // Free-DOF numbering.
  std::vector<int> free_id(n_dofs, -1);
  int n_free = 0;
  for (int d = 0; d < n_dofs; ++d)
    if (!fixed[d]) free_id[d] = n_free++;

  // Element stiffness on the affine elements, assembled to triplets.
  const double lambda = material.lame_lambda;
  const double mu = material.lame_mu;
  const int ncub = re.n_cub();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(ne) * 9 * np * np);
  std::vector<Eigen::Triplet<double>> trips_full;
  if (debug) trips_full.reserve(trips.capacity());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);

  // grad(x) l_j at cubature nodes: constant inverse map per element
  for (int se = 0; se < ne; ++se) {
    const auto& v = field.elem_verts_[se];
    Eigen::Matrix3d fwd;  // dx/dr
    const Vec3 d1 = 0.5 * (v[1] - v[0]), d2 = 0.5 * (v[2] - v[0]), d3 = 0.5 * (v[3] - v[0]);
    fwd << d1.x, d2.x, d3.x, d1.y, d2.y, d3.y, d1.z, d2.z, d3.z;
    const double jac = fwd.determinant();
    if (jac <= 0.0)
      throw NumericsError("solve_elasticity: inverted element in sub-mesh");
    const Eigen::Matrix3d inv = fwd.inverse();  // dr/dx

    // physical gradients: G[a](q, j) = d l_j / d x_a at cubature node q
    Eigen::MatrixXd g[3];
    for (int a = 0; a < 3; ++a)
      g[a] = inv(0, a) * re.deriv_r() + inv(1, a) * re.deriv_s() + inv(2, a) * re.deriv_t();

    Eigen::VectorXd jw(ncub);
    for (int q = 0; q < ncub; ++q) jw(q) = jac * re.cub_weights()[q];

    // precontract: W[a][b] = G[a]^T diag(jw) G[b]  (np x np)
    Eigen::MatrixXd w[3][3];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) w[a][b] = g[a].transpose() * jw.asDiagonal() * g[b];

    for (int i = 0; i < np; ++i) {
      const int gi = field.elem_nodes_[se][i];
      for (int j = 0; j < np; ++j) {
        const int gj = field.elem_nodes_[se][j];
        const double lap = w[0][0](i, j) + w[1][1](i, j) + w[2][2](i, j);
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) {
            // lambda d_a li d_b lj + mu d_b li d_a lj + mu delta_ab grad.grad
            double val = lambda * w[a][b](i, j) + mu * w[b][a](i, j);
            if (a == b) val += mu * lap;
            const int di = 3 * gi + a, dj = 3 * gj + b;
            if (debug) trips_full.emplace_back(di, dj, val);
            if (!fixed[di]) {
              if (!fixed[dj]) {
                trips.emplace_back(free_id[di], free_id[dj], val);
              } else {
                rhs(free_id[di]) -= val * fixed_value[dj];
              }
            }
          }
        }
      }
    }
  }

  Eigen::SparseMatrix<double> k(n_free, n_free);
  k.setFromTriplets(trips.begin(), trips.end());

  Eigen::VectorXd u_free(n_free);
  if (n_free == 0) {
    // fully constrained
  } else if (n_free <= 30000) {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> solver(k);
    if (solver.info() != Eigen::Success)
      throw NumericsError("solve_elasticity: Cholesky factorization failed");
    u_free = solver.solve(rhs);
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper>
        solver;
    solver.setTolerance(1e-10);
    solver.setMaxIterations(20000);
    solver.compute(k);
    u_free = solver.solve(rhs);
    if (solver.info() != Eigen::Success)
      throw NumericsError("solve_elasticity: CG failed to reach tolerance (residual " +
                          std::to_string(solver.error()) + ")");
  }

  field.node_values_.assign(n_nodes, Vec3{0, 0, 0});
  for (int node = 0; node < n_nodes; ++node)
    for (int a = 0; a < 3; ++a) {
      const int d = 3 * node + a;
      field.node_values_[node][a] = fixed[d] ? fixed_value[d] : u_free(free_id[d]);
    }

  if (debug) {
    debug->stiffness.resize(n_dofs, n_dofs);
    debug->stiffness.setFromTriplets(trips_full.begin(), trips_full.end());
    debug->solution.resize(n_dofs);
    debug->constrained.assign(n_dofs, false);
    for (int node = 0; node < n_nodes; ++node)
      for (int a = 0; a < 3; ++a) {
        debug->solution(3 * node + a) = field.node_values_[node][a];
        debug->constrained[3 * node + a] = fixed[3 * node + a] != 0;
      }
  }

  field.build_grid();
  return field;
}

CurvedMesh curve_mesh(const Mesh& mesh, const SubMesh& sub, const DeformationField& field,
                      const ReferenceElement& re) {
  CurvedMesh cmesh(mesh, re.degree());
  std::vector<int> offenders;

  for (int se = 0; se < sub.n_elements(); ++se) {
    const int e = sub.elements[se];
    auto nodes = CurvedMesh::straight_nodes(mesh, e, re);
    for (auto& x : nodes) x += field.displacement(x);
    // validate the curved map before accepting it
    try {
      (void)compute_mapping(nodes, re, e);
    } catch (const NumericsError&) {
      offenders.push_back(e);
    }
    cmesh.set_curved(e, std::move(nodes));
  }
  if (!offenders.empty()) {
    std::string msg = "curve_mesh: non-positive mapping Jacobian in elements";
    for (int e : offenders) msg += " " + std::to_string(e);
    throw NumericsError(msg);
  }
  return cmesh;
}

}  // namespace cdg
