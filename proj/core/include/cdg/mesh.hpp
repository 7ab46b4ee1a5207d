#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdg/types.hpp"

namespace cdg {

/// One side of an interior face.
struct FaceRef {
  int element = -1;
  int local_face = -1;  // 0..3
  bool operator==(const FaceRef&) const = default;
};

/// Interior face link between two elements, with the permutation mapping
/// this side's face-vertex triple onto the other side's.
struct FaceLink {
  FaceRef self, other;
  // other_face_vertex[perm[i]] == self_face_vertex[i]
  std::array<int, 3> perm = {0, 1, 2};
};

struct BoundaryFace {
  int element = -1;
  int local_face = -1;
  std::string tag;
};

/// Straight-sided conforming tetrahedral mesh.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tets;
  std::vector<BoundaryFace> boundary_faces;

  // links[e][f]: interior link for local face f of element e, or nullopt
  // when (e,f) lies on the boundary. Built by build_connectivity.
  std::vector<std::array<std::optional<FaceLink>, 4>> links;
  // boundary_index[e][f]: index into boundary_faces, or -1.
  std::vector<std::array<int, 4>> boundary_index;

  int n_elements() const { return static_cast<int>(tets.size()); }

  /// Vertex ids (global) of local face f of element e, using the reference
  /// face ordering.
  std::array<int, 3> face_vertex_ids(int e, int f) const;

  /// Signed volume of element e (positive for correctly oriented tets).
  double signed_volume(int e) const;

  std::array<Vec3, 4> tet_vertices(int e) const;
};

/// Builds face links (and per-face boundary indices) by matching sorted
/// vertex triples. Throws NumericsError for nonconforming meshes.
void build_connectivity(Mesh& mesh);

/// Validates orientation and conformity; throws on failure.
void validate_mesh(const Mesh& mesh);

/// Axis-aligned box.
struct Box {
  Vec3 min, max;
  bool contains(const Vec3& p) const {
    return p.x > min.x && p.x < max.x && p.y > min.y && p.y < max.y && p.z > min.z &&
           p.z < max.z;
  }
};

/// Boundary classification of a sub-mesh face.
enum class SubBoundaryKind { SurfaceDirichlet, BoxDirichlet, Symmetry };

struct SubBoundaryFace {
  int sub_element = -1;
  int local_face = -1;
  SubBoundaryKind kind = SubBoundaryKind::BoxDirichlet;
};

/// Sub-mesh induced by a bounding box, used for the elasticity solve.
struct SubMesh {
  const Mesh* parent = nullptr;
  std::vector<int> elements;          // parent element ids, ascending
  std::vector<int> parent_of_sub;     // == elements
  std::vector<int> sub_of_parent;     // parent element -> sub id or -1
  std::vector<SubBoundaryFace> boundary;

  int n_elements() const { return static_cast<int>(elements.size()); }
};

/// Extracts the sub-mesh of all tets with any vertex strictly inside `box`.
/// Faces of included tets are classified: tagged `surface_tag` faces become
/// the surface Dirichlet set, `symmetry_tags` faces the sliding set, and all
/// other exterior faces (cuts and remaining boundary) the box Dirichlet set.
SubMesh extract_submesh(const Mesh& mesh, const Box& box, const std::string& surface_tag,
                        const std::vector<std::string>& symmetry_tags);

}  // namespace cdg
