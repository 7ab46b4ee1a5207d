#include "cdg/curved_mesh.hpp"

namespace cdg {

std::vector<Vec3> CurvedMesh::straight_nodes(const Mesh& mesh, int e,
                                             const ReferenceElement& re) {
  const auto v = mesh.tet_vertices(e);
  std::vector<Vec3> nodes;
  nodes.reserve(re.n_basis());
  for (const auto& r : re.colloc_nodes()) {
    // barycentric form of the affine map
    const double l2 = (1.0 + r.x) / 2.0, l3 = (1.0 + r.y) / 2.0, l4 = (1.0 + r.z) / 2.0;
    const double l1 = 1.0 - l2 - l3 - l4;
    nodes.push_back(l1 * v[0] + l2 * v[1] + l3 * v[2] + l4 * v[3]);
  }
  return nodes;
}

std::vector<Vec3> CurvedMesh::element_nodes(int e, const ReferenceElement& re) const {
  if (is_curved(e)) return *curved_nodes_[e];
  return straight_nodes(*mesh_, e, re);
}

std::vector<Vec3> CurvedMesh::element_nodes_for_degree(
    int e, const ReferenceElement& re_target, const ReferenceElement& re_stored) const {
  if (!is_curved(e)) return straight_nodes(*mesh_, e, re_target);
  if (re_target.degree() == degree_) return *curved_nodes_[e];

  // Evaluate the stored-degree isoparametric map at the target collocation
  // points: exact polynomial evaluation of the same geometry representation.
  const auto& stored = *curved_nodes_[e];
  const Eigen::MatrixXd lag = re_stored.lagrange_eval(re_target.colloc_nodes());
  std::vector<Vec3> nodes(re_target.n_basis());
  for (int i = 0; i < re_target.n_basis(); ++i) {
    Vec3 x{0, 0, 0};
    for (int j = 0; j < re_stored.n_basis(); ++j) x += lag(i, j) * stored[j];
    nodes[i] = x;
  }
  return nodes;
}

}  // namespace cdg
