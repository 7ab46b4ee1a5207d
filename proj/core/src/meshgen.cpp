#include "cdg/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace cdg {

namespace {

// Kuhn subdivision of a unit cell: 6 tets around the main diagonal, all
// sharing edges consistently with neighboring cells in a structured grid.
constexpr int kKuhnTets[6][4] = {{0, 1, 3, 7}, {0, 3, 2, 7}, {0, 2, 6, 7},
                                 {0, 6, 4, 7}, {0, 4, 5, 7}, {0, 5, 1, 7}};

void add_boundary_triangles(Mesh& mesh, const std::string& tag,
                            const std::function<std::string(const Vec3&)>& side_tag) {
  // Collect faces appearing exactly once (boundary) and tag them.
  std::map<std::array<int, 3>, std::pair<int, int>> once;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int f = 0; f < 4; ++f) {
      auto key = mesh.face_vertex_ids(e, f);
      std::sort(key.begin(), key.end());
      auto it = once.find(key);
      if (it == once.end()) once[key] = {e, f};
      else once.erase(it);
    }
  }
  for (const auto& [key, ef] : once) {
    Vec3 centroid{0, 0, 0};
    for (int v : key) centroid += mesh.vertices[v];
    centroid = centroid / 3.0;
    mesh.boundary_faces.push_back(
        {ef.first, ef.second, side_tag ? side_tag(centroid) : tag});
  }
}

}  // namespace

Mesh make_cube_mesh(int n, const std::string& tag, bool per_side) {
  Mesh mesh;
  const auto vid = [n](int i, int j, int k) {
    return (k * (n + 1) + j) * (n + 1) + i;
  };
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i)
        mesh.vertices.push_back({static_cast<double>(i) / n,
                                 static_cast<double>(j) / n,
                                 static_cast<double>(k) / n});

  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        // cell corners in (x,y,z)-bit order: bit0 = x, bit1 = y, bit2 = z
        int c[8];
        for (int b = 0; b < 8; ++b)
          c[b] = vid(i + (b & 1), j + ((b >> 1) & 1), k + ((b >> 2) & 1));
        for (const auto& t : kKuhnTets) {
          std::array<int, 4> tet = {c[t[0]], c[t[1]], c[t[2]], c[t[3]]};
          mesh.tets.push_back(tet);
        }
      }
    }
  }

  // Ensure positive orientation.
  for (int e = 0; e < mesh.n_elements(); ++e)
    if (mesh.signed_volume(e) < 0.0) std::swap(mesh.tets[e][0], mesh.tets[e][1]);

  std::function<std::string(const Vec3&)> side_tag;
  if (per_side) {
    side_tag = [](const Vec3& c) -> std::string {
      const double eps = 1e-9;
      if (c.x < eps) return "xmin";
      if (c.x > 1.0 - eps) return "xmax";
      if (c.y < eps) return "ymin";
      if (c.y > 1.0 - eps) return "ymax";
      if (c.z < eps) return "zmin";
      return "zmax";
    };
  }
  add_boundary_triangles(mesh, tag, side_tag);
  validate_mesh(mesh);
  build_connectivity(mesh);
  return mesh;
}

Mesh make_single_tet(const std::string& tag) {
  Mesh mesh;
  mesh.vertices = {{-1, -1, -1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  mesh.tets = {{0, 1, 2, 3}};
  add_boundary_triangles(mesh, tag, nullptr);
  validate_mesh(mesh);
  build_connectivity(mesh);
  return mesh;
}

Mesh make_two_tets(const std::string& tag) {
  Mesh mesh;
  mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
  mesh.tets = {{0, 1, 2, 3}, {1, 2, 3, 4}};
  for (int e = 0; e < 2; ++e)
    if (mesh.signed_volume(e) < 0.0) std::swap(mesh.tets[e][0], mesh.tets[e][1]);
  add_boundary_triangles(mesh, tag, nullptr);
  validate_mesh(mesh);
  build_connectivity(mesh);
  return mesh;
}

namespace {

struct IcoSurface {
  std::vector<Vec3> verts;  // unit vectors
  std::vector<std::array<int, 3>> tris;
};

IcoSurface make_icosphere(int subdivisions) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  IcoSurface s;
  const double pts[12][3] = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                             {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                             {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (const auto& p : pts) {
    Vec3 v{p[0], p[1], p[2]};
    s.verts.push_back(v / norm(v));
  }
  s.tris = {{0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
            {1, 5, 9},   {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
            {3, 9, 4},   {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
            {4, 9, 5},   {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int pass = 0; pass < subdivisions; ++pass) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec3 m = s.verts[a] + s.verts[b];
      m = m / norm(m);
      const int idx = static_cast<int>(s.verts.size());
      s.verts.push_back(m);
      midpoint[key] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& t : s.tris) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    s.tris = std::move(next);
  }
  return s;
}

}  // namespace

Mesh make_sphere_shell_mesh(double r_inner, double r_outer, int subdivisions,
                            int layers, const std::string& inner_tag,
                            const std::string& outer_tag) {
  if (r_outer <= r_inner || layers < 1)
    throw ConfigError("make_sphere_shell_mesh: invalid shell parameters");
  const IcoSurface surf = make_icosphere(subdivisions);
  const int nv = static_cast<int>(surf.verts.size());

  // Geometrically graded radii.
  const double growth = std::pow(r_outer / r_inner, 1.0 / layers);
  std::vector<double> radii(layers + 1);
  for (int l = 0; l <= layers; ++l) radii[l] = r_inner * std::pow(growth, l);
  radii.back() = r_outer;

  Mesh mesh;
  for (int l = 0; l <= layers; ++l)
    for (const auto& u : surf.verts) mesh.vertices.push_back(u * radii[l]);

  // Split each prism (triangle x layer) into 3 tets; quad-face diagonals run
  // from the smallest global vertex id so neighboring prisms agree.
  for (int l = 0; l < layers; ++l) {
    for (const auto& t : surf.tris) {
      const std::array<int, 3> bot = {l * nv + t[0], l * nv + t[1], l * nv + t[2]};
      const std::array<int, 3> top = {bot[0] + nv, bot[1] + nv, bot[2] + nv};
      // Each vertical quad face (bot_i, bot_j, top_j, top_i) is split along
      // the diagonal emanating from min(bot_i, bot_j), so the side-neighbor
      // prism picks the same diagonal. diag_from gives the source corner.
      auto diag_from = [&](int i, int j) { return bot[i] < bot[j] ? i : j; };

      // The corner with the globally smallest bottom id is the source of both
      // its adjacent diagonals; split the prism around it.
      int a = 0;
      if (bot[1] < bot[a]) a = 1;
      if (bot[2] < bot[a]) a = 2;
      const int b = (a + 1) % 3, c = (a + 2) % 3;

      auto add = [&](int v0, int v1, int v2, int v3) {
        mesh.tets.push_back({v0, v1, v2, v3});
      };
      if (diag_from(b, c) == b) {
        // diagonals: bot_a-top_b, bot_a-top_c, bot_b-top_c
        add(bot[a], bot[b], bot[c], top[c]);
        add(bot[a], bot[b], top[c], top[b]);
        add(bot[a], top[b], top[c], top[a]);
      } else {
        // diagonals: bot_a-top_b, bot_a-top_c, bot_c-top_b
        add(bot[a], bot[b], bot[c], top[b]);
        add(bot[a], bot[c], top[b], top[c]);
        add(bot[a], top[b], top[c], top[a]);
      }
    }
  }

  for (int e = 0; e < mesh.n_elements(); ++e)
    if (mesh.signed_volume(e) < 0.0) std::swap(mesh.tets[e][0], mesh.tets[e][1]);

  const double r_mid = std::sqrt(r_inner * r_outer);
  add_boundary_triangles(mesh, inner_tag, [&](const Vec3& c) {
    return norm(c) < r_mid ? inner_tag : outer_tag;
  });
  validate_mesh(mesh);
  build_connectivity(mesh);
  return mesh;
}

}  // namespace cdg
