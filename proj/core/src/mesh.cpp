#include "cdg/mesh.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cdg/refelem.hpp"

namespace cdg {

std::array<int, 3> Mesh::face_vertex_ids(int e, int f) const {
  const auto& fv = ReferenceElement::face_vertices()[f];
  return {tets[e][fv[0]], tets[e][fv[1]], tets[e][fv[2]]};
}

std::array<Vec3, 4> Mesh::tet_vertices(int e) const {
  return {vertices[tets[e][0]], vertices[tets[e][1]], vertices[tets[e][2]],
          vertices[tets[e][3]]};
}

double Mesh::signed_volume(int e) const {
  const auto v = tet_vertices(e);
  return dot(cross(v[1] - v[0], v[2] - v[0]), v[3] - v[0]) / 6.0;
}

void build_connectivity(Mesh& mesh) {
  const int ne = mesh.n_elements();
  mesh.links.assign(ne, {});
  mesh.boundary_index.assign(ne, {-1, -1, -1, -1});

  std::map<std::array<int, 3>, std::vector<FaceRef>> by_key;
  for (int e = 0; e < ne; ++e) {
    for (int f = 0; f < 4; ++f) {
      auto ids = mesh.face_vertex_ids(e, f);
      std::array<int, 3> key = ids;
      std::sort(key.begin(), key.end());
      by_key[key].push_back({e, f});
    }
  }

  for (const auto& [key, refs] : by_key) {
    if (refs.size() > 2) {
      throw NumericsError("nonconforming mesh: face shared by " +
                          std::to_string(refs.size()) + " tets");
    }
    if (refs.size() == 2) {
      const auto a = refs[0], b = refs[1];
      const auto ids_a = mesh.face_vertex_ids(a.element, a.local_face);
      const auto ids_b = mesh.face_vertex_ids(b.element, b.local_face);
      FaceLink la, lb;
      la.self = a;
      la.other = b;
      lb.self = b;
      lb.other = a;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          if (ids_b[j] == ids_a[i]) la.perm[i] = j;
          if (ids_a[j] == ids_b[i]) lb.perm[i] = j;
        }
      }
      mesh.links[a.element][a.local_face] = la;
      mesh.links[b.element][b.local_face] = lb;
    }
  }

  // Attach boundary faces to their owning element faces.
  std::map<std::array<int, 3>, int> boundary_by_key;
  for (size_t i = 0; i < mesh.boundary_faces.size(); ++i) {
    auto& bf = mesh.boundary_faces[i];
    if (bf.element >= 0) {
      mesh.boundary_index[bf.element][bf.local_face] = static_cast<int>(i);
    }
  }

  // Every unlinked face must be a boundary face.
  for (int e = 0; e < ne; ++e) {
    for (int f = 0; f < 4; ++f) {
      if (!mesh.links[e][f] && mesh.boundary_index[e][f] < 0) {
        throw NumericsError("element " + std::to_string(e) + " face " +
                            std::to_string(f) + " has no neighbor and no boundary tag");
      }
    }
  }
}

void validate_mesh(const Mesh& mesh) {
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double vol = mesh.signed_volume(e);
    if (vol <= 0.0) {
      throw NumericsError("element " + std::to_string(e) +
                          " has non-positive volume " + std::to_string(vol));
    }
    for (int v : mesh.tets[e]) {
      if (v < 0 || v >= static_cast<int>(mesh.vertices.size()))
        throw ParseError("element " + std::to_string(e) + " references vertex " +
                         std::to_string(v) + " out of range");
    }
  }
}

SubMesh extract_submesh(const Mesh& mesh, const Box& box, const std::string& surface_tag,
                        const std::vector<std::string>& symmetry_tags) {
  if (mesh.links.empty() && mesh.n_elements() > 0)
    throw ConfigError("extract_submesh: connectivity not built");

  bool tag_found = false;
  for (const auto& bf : mesh.boundary_faces) {
    if (bf.tag == surface_tag) { tag_found = true; break; }
  }
  if (!tag_found)
    throw ConfigError("extract_submesh: surface tag '" + surface_tag +
                      "' not present in mesh");

  SubMesh sub;
  sub.parent = &mesh;
  sub.sub_of_parent.assign(mesh.n_elements(), -1);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    bool include = false;
    for (int v : mesh.tets[e]) {
      if (box.contains(mesh.vertices[v])) { include = true; break; }
    }
    if (include) {
      sub.sub_of_parent[e] = static_cast<int>(sub.elements.size());
      sub.elements.push_back(e);
    }
  }
  sub.parent_of_sub = sub.elements;
  if (sub.elements.empty())
    throw ConfigError("extract_submesh: bounding box selects no elements");

  const std::set<std::string> sym(symmetry_tags.begin(), symmetry_tags.end());
  for (int se = 0; se < sub.n_elements(); ++se) {
    const int e = sub.elements[se];
    for (int f = 0; f < 4; ++f) {
      if (mesh.links[e][f]) {
        const int nb = mesh.links[e][f]->other.element;
        if (sub.sub_of_parent[nb] >= 0) continue;  // interior to the sub-mesh
        sub.boundary.push_back({se, f, SubBoundaryKind::BoxDirichlet});
      } else {
        const auto& bf = mesh.boundary_faces[mesh.boundary_index[e][f]];
        SubBoundaryKind kind = SubBoundaryKind::BoxDirichlet;
        if (bf.tag == surface_tag) kind = SubBoundaryKind::SurfaceDirichlet;
        else if (sym.count(bf.tag)) kind = SubBoundaryKind::Symmetry;
        sub.boundary.push_back({se, f, kind});
      }
    }
  }
  return sub;
}

}  // namespace cdg
