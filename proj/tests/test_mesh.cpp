#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cdg/curved_mesh.hpp>
#include <cdg/gmsh_io.hpp>
#include <cdg/meshgen.hpp>
#include <cdg/operators.hpp>

#include <random>
#include <sstream>

using namespace cdg;

namespace {

const char* kSingleTetMsh = R"($MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
1
2 7 "wall"
$EndPhysicalNames
$Nodes
4
1 -1 -1 -1
2 1 -1 -1
3 -1 1 -1
4 -1 -1 1
$EndNodes
$Elements
5
1 2 2 7 7 1 3 2
2 2 2 7 7 1 2 4
3 2 2 7 7 2 3 4
4 2 2 7 7 1 4 3
5 4 2 0 0 1 2 3 4
$EndElements
)";

Mesh parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_gmsh(in);
}

// Physical coordinates of face quadrature nodes for straight elements.
std::vector<Vec3> face_quad_points(const Mesh& mesh, int e, int f,
                                   const ReferenceElement& re) {
  const auto nodes = CurvedMesh::straight_nodes(mesh, e, re);
  const ElementGeometry geom = compute_mapping(nodes, re, e);
  const int ng = re.n_face_quad();
  std::vector<Vec3> pts(ng);
  for (int g = 0; g < ng; ++g) pts[g] = geom.face_phys[f * ng + g];
  return pts;
}

}  // namespace

TEST_CASE("gmsh: single reference tet") {
  const Mesh mesh = parse_text(kSingleTetMsh);
  CHECK(mesh.n_elements() == 1);
  CHECK(mesh.vertices.size() == 4);
  CHECK(mesh.boundary_faces.size() == 4);
  for (const auto& bf : mesh.boundary_faces) CHECK(bf.tag == "wall");
  // no interior links
  for (int f = 0; f < 4; ++f) CHECK(!mesh.links[0][f].has_value());
  CHECK(mesh.signed_volume(0) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("gmsh: malformed input raises ParseError with line info") {
  CHECK_THROWS_AS(parse_text("$MeshFormat\n4.1 0 8\n$EndMeshFormat\n"), ParseError);
  CHECK_THROWS_AS(parse_text("not a mesh at all\n"), ParseError);
  // dangling vertex index
  std::string bad = kSingleTetMsh;
  bad.replace(bad.find("5 4 2 0 0 1 2 3 4"), 17, "5 4 2 0 0 1 2 3 9");
  CHECK_THROWS_AS(parse_text(bad), ParseError);
  // non-tet volume element (hexahedron, type 5)
  std::string hexa = kSingleTetMsh;
  hexa.replace(hexa.find("5 4 2 0 0 1 2 3 4"), 17, "5 5 2 0 0 1 2 3 4");
  CHECK_THROWS_AS(parse_text(hexa), ParseError);
}

TEST_CASE("two tets share one interior face") {
  const Mesh mesh = make_two_tets();
  CHECK(mesh.n_elements() == 2);
  CHECK(mesh.boundary_faces.size() == 6);
  int n_links = 0;
  for (int e = 0; e < 2; ++e)
    for (int f = 0; f < 4; ++f)
      if (mesh.links[e][f]) ++n_links;
  CHECK(n_links == 2);  // one face, seen from both sides
}

TEST_CASE("cube fixture: Euler counts") {
  const Mesh mesh = make_cube_mesh(1, "wall");
  CHECK(mesh.vertices.size() == 8);
  CHECK(mesh.n_elements() == 6);
  CHECK(mesh.boundary_faces.size() == 12);

  // brute-force face counting oracle: every face is shared by 1 or 2 tets
  std::map<std::array<int, 3>, int> count;
  for (int e = 0; e < mesh.n_elements(); ++e)
    for (int f = 0; f < 4; ++f) {
      auto key = mesh.face_vertex_ids(e, f);
      std::sort(key.begin(), key.end());
      count[key]++;
    }
  int boundary = 0;
  for (const auto& [k, c] : count) {
    CHECK(c <= 2);
    if (c == 1) ++boundary;
  }
  CHECK(boundary == 12);
}

TEST_CASE("connectivity symmetry and orientation permutation round-trip") {
  const Mesh mesh = make_cube_mesh(2, "wall");
  const auto re = get_reference_element(3);

  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int f = 0; f < 4; ++f) {
      if (!mesh.links[e][f]) continue;
      const auto& link = *mesh.links[e][f];
      // symmetry
      const auto& back = mesh.links[link.other.element][link.other.local_face];
      REQUIRE(back.has_value());
      CHECK(back->other.element == e);
      CHECK(back->other.local_face == f);
      // vertex permutation maps the triple exactly
      const auto mine = mesh.face_vertex_ids(e, f);
      const auto theirs = mesh.face_vertex_ids(link.other.element, link.other.local_face);
      for (int i = 0; i < 3; ++i) CHECK(theirs[link.perm[i]] == mine[i]);
    }
  }

  // quadrature nodes pair up to identical physical points (both sides
  // generate the same point set; compare as sets)
  int checked = 0;
  for (int e = 0; e < mesh.n_elements() && checked < 6; ++e) {
    for (int f = 0; f < 4 && checked < 6; ++f) {
      if (!mesh.links[e][f]) continue;
      const auto& link = *mesh.links[e][f];
      const auto mine = face_quad_points(mesh, e, f, *re);
      const auto theirs =
          face_quad_points(mesh, link.other.element, link.other.local_face, *re);
      for (const auto& p : mine) {
        double best = 1e300;
        for (const auto& q : theirs) best = std::min(best, norm(p - q));
        CHECK(best < 1e-12);
      }
      ++checked;
    }
  }
}

TEST_CASE("random vertex relabeling keeps the physical pairing") {
  // permute the vertex order inside each tet; connectivity must still pair
  // the same physical quadrature points
  Mesh mesh = make_cube_mesh(1, "wall");
  std::mt19937 gen(3);
  for (auto& tet : mesh.tets) {
    std::shuffle(tet.begin(), tet.end(), gen);
  }
  for (int e = 0; e < mesh.n_elements(); ++e)
    if (mesh.signed_volume(e) < 0) std::swap(mesh.tets[e][0], mesh.tets[e][1]);
  // boundary faces were tied to (element, local face); rebuild them from keys
  Mesh rebuilt;
  rebuilt.vertices = mesh.vertices;
  rebuilt.tets = mesh.tets;
  std::map<std::array<int, 3>, int> once;
  for (int e = 0; e < rebuilt.n_elements(); ++e)
    for (int f = 0; f < 4; ++f) {
      auto key = rebuilt.face_vertex_ids(e, f);
      std::sort(key.begin(), key.end());
      once[key]++;
    }
  for (int e = 0; e < rebuilt.n_elements(); ++e)
    for (int f = 0; f < 4; ++f) {
      auto key = rebuilt.face_vertex_ids(e, f);
      std::sort(key.begin(), key.end());
      if (once[key] == 1) rebuilt.boundary_faces.push_back({e, f, "wall"});
    }
  validate_mesh(rebuilt);
  build_connectivity(rebuilt);

  const auto re = get_reference_element(2);
  for (int e = 0; e < rebuilt.n_elements(); ++e) {
    for (int f = 0; f < 4; ++f) {
      if (!rebuilt.links[e][f]) continue;
      const auto& link = *rebuilt.links[e][f];
      const auto mine = face_quad_points(rebuilt, e, f, *re);
      const auto theirs =
          face_quad_points(rebuilt, link.other.element, link.other.local_face, *re);
      for (const auto& p : mine) {
        double best = 1e300;
        for (const auto& q : theirs) best = std::min(best, norm(p - q));
        CHECK(best < 1e-12);
      }
    }
  }
}

TEST_CASE("nonconforming mesh detected") {
  Mesh mesh;
  mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}, {-1, -1, 1}};
  // three tets sharing the face (0,1,2)
  mesh.tets = {{0, 1, 2, 3}, {0, 1, 2, 4}, {0, 1, 2, 5}};
  CHECK_THROWS_AS(build_connectivity(mesh), NumericsError);
}

TEST_CASE("mesh volumes: cube sums to 1, sphere shell approximates") {
  const Mesh cube = make_cube_mesh(3, "wall");
  double vol = 0.0;
  for (int e = 0; e < cube.n_elements(); ++e) vol += cube.signed_volume(e);
  CHECK(vol == doctest::Approx(1.0).epsilon(1e-10));

  const Mesh shell = make_sphere_shell_mesh(1.0, 4.0, 1, 5);
  double svol = 0.0;
  for (int e = 0; e < shell.n_elements(); ++e) {
    CHECK(shell.signed_volume(e) > 0.0);
    svol += shell.signed_volume(e);
  }
  // chordal icosphere underestimates the exact shell volume by a few percent
  const double exact = 4.0 / 3.0 * M_PI * (64.0 - 1.0);
  CHECK(svol > 0.85 * exact);
  CHECK(svol < exact);
}

TEST_CASE("submesh extraction") {
  const Mesh shell = make_sphere_shell_mesh(1.0, 8.0, 1, 6);

  SUBCASE("box around everything selects the whole mesh") {
    const Box box{{-10, -10, -10}, {10, 10, 10}};
    const SubMesh sub = extract_submesh(shell, box, "sphere", {});
    CHECK(sub.n_elements() == shell.n_elements());
    int d1 = 0, d2 = 0;
    for (const auto& bf : sub.boundary) {
      if (bf.kind == SubBoundaryKind::SurfaceDirichlet) ++d1;
      else if (bf.kind == SubBoundaryKind::BoxDirichlet) ++d2;
    }
    CHECK(d1 > 0);
    CHECK(d2 > 0);
    CHECK(d1 + d2 == static_cast<int>(sub.boundary.size()));
  }

  SUBCASE("box missing the mesh raises") {
    const Box box{{100, 100, 100}, {101, 101, 101}};
    CHECK_THROWS_AS(extract_submesh(shell, box, "sphere", {}), ConfigError);
  }

  SUBCASE("unknown surface tag raises") {
    const Box box{{-2, -2, -2}, {2, 2, 2}};
    CHECK_THROWS_AS(extract_submesh(shell, box, "nope", {}), ConfigError);
  }

  SUBCASE("included elements equal the brute-force vertex scan") {
    const Box box{{-2, -2, -2}, {2, 2, 2}};
    const SubMesh sub = extract_submesh(shell, box, "sphere", {});
    int expected = 0;
    for (int e = 0; e < shell.n_elements(); ++e) {
      bool any = false;
      for (int v : shell.tets[e]) any = any || box.contains(shell.vertices[v]);
      expected += any;
    }
    CHECK(sub.n_elements() == expected);
    CHECK(sub.n_elements() > 0);
    CHECK(sub.n_elements() < shell.n_elements());

    // every cut face is BoxDirichlet; the inner sphere faces are Surface
    for (const auto& bf : sub.boundary) {
      const int e = sub.elements[bf.sub_element];
      if (shell.links[e][bf.local_face])
        CHECK(bf.kind == SubBoundaryKind::BoxDirichlet);
    }
  }
}

TEST_CASE("write_gmsh -> parse_gmsh reproduces connectivity") {
  const Mesh mesh = make_sphere_shell_mesh(1.0, 3.0, 0, 3);
  std::ostringstream out;
  write_gmsh(mesh, out);
  const Mesh back = parse_text(out.str());
  REQUIRE(back.n_elements() == mesh.n_elements());
  REQUIRE(back.vertices.size() == mesh.vertices.size());
  REQUIRE(back.boundary_faces.size() == mesh.boundary_faces.size());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int f = 0; f < 4; ++f) {
      CHECK(mesh.links[e][f].has_value() == back.links[e][f].has_value());
      if (mesh.links[e][f]) {
        CHECK(mesh.links[e][f]->other.element == back.links[e][f]->other.element);
        CHECK(mesh.links[e][f]->other.local_face == back.links[e][f]->other.local_face);
      }
    }
  }
  // the writer normalizes vertex order on the first pass; after that the
  // write -> parse -> write cycle is byte-stable
  std::ostringstream out2;
  write_gmsh(back, out2);
  std::istringstream in3(out2.str());
  const Mesh third = parse_gmsh(in3);
  std::ostringstream out3;
  write_gmsh(third, out3);
  CHECK(out2.str() == out3.str());
}
