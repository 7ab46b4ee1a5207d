#pragma once

#include <optional>
#include <vector>

#include "cdg/mesh.hpp"
#include "cdg/refelem.hpp"

namespace cdg {

/// Tetrahedral mesh plus per-element physical collocation coordinates for the
/// curved subset. Elements outside the curved layer stay affine and store no
/// extra data.
class CurvedMesh {
 public:
  CurvedMesh() = default;
  CurvedMesh(const Mesh& mesh, int degree)
      : mesh_(&mesh), degree_(degree), curved_nodes_(mesh.n_elements()) {}

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }

  bool is_curved(int e) const { return curved_nodes_[e].has_value(); }
  int n_curved() const {
    int n = 0;
    for (const auto& c : curved_nodes_) n += c.has_value();
    return n;
  }

  void set_curved(int e, std::vector<Vec3> nodes) { curved_nodes_[e] = std::move(nodes); }
  const std::vector<Vec3>& curved_nodes(int e) const { return *curved_nodes_[e]; }

  /// Physical collocation coordinates of element e at the stored degree:
  /// curved data when present, otherwise the affine images of the reference
  /// collocation nodes.
  std::vector<Vec3> element_nodes(int e, const ReferenceElement& re) const;

  /// Physical collocation coordinates for a (possibly different) degree:
  /// evaluates the stored isoparametric map at the target collocation points.
  std::vector<Vec3> element_nodes_for_degree(int e, const ReferenceElement& re_target,
                                             const ReferenceElement& re_stored) const;

  /// Affine node placement helper for straight elements.
  static std::vector<Vec3> straight_nodes(const Mesh& mesh, int e,
                                          const ReferenceElement& re);

 private:
  const Mesh* mesh_ = nullptr;
  int degree_ = 0;
  std::vector<std::optional<std::vector<Vec3>>> curved_nodes_;
};

}  // namespace cdg
