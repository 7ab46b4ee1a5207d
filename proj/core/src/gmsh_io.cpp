#include "cdg/gmsh_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cdg {

namespace {

struct LineReader {
  explicit LineReader(std::istream& s) : in(s) {}
  std::istream& in;
  int line_no = 0;
  std::string line;

  bool next() {
    while (std::getline(in, line)) {
      ++line_no;
      // strip trailing CR from files written on Windows
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("gmsh parse error at line " + std::to_string(line_no) + ": " + msg);
  }
};

}  // namespace

Mesh parse_gmsh(std::istream& in) {
  LineReader r(in);
  std::map<long long, Vec3> nodes_by_id;
  std::map<int, std::string> physical_names;

  struct RawTri { std::array<long long, 3> v; int tag; };
  struct RawTet { std::array<long long, 4> v; };
  std::vector<RawTri> tris;
  std::vector<RawTet> tets;
  std::set<int> used_tags;

  bool saw_format = false;
  while (r.next()) {
    if (r.line == "$MeshFormat") {
      if (!r.next()) r.fail("unexpected EOF in $MeshFormat");
      std::istringstream is(r.line);
      std::string version;
      is >> version;
      if (version.rfind("2.", 0) != 0)
        r.fail("unsupported MSH version '" + version + "', need 2.x ASCII");
      if (!r.next() || r.line != "$EndMeshFormat") r.fail("missing $EndMeshFormat");
      saw_format = true;
    } else if (r.line == "$PhysicalNames") {
      if (!r.next()) r.fail("unexpected EOF in $PhysicalNames");
      int count = 0;
      try { count = std::stoi(r.line); } catch (...) { r.fail("bad count"); }
      for (int i = 0; i < count; ++i) {
        if (!r.next()) r.fail("unexpected EOF in $PhysicalNames");
        std::istringstream is(r.line);
        int dim, id;
        std::string name;
        is >> dim >> id;
        std::getline(is, name);
        const auto a = name.find('"');
        const auto b = name.rfind('"');
        if (a == std::string::npos || b == a) r.fail("physical name must be quoted");
        physical_names[id] = name.substr(a + 1, b - a - 1);
      }
      if (!r.next() || r.line != "$EndPhysicalNames") r.fail("missing $EndPhysicalNames");
    } else if (r.line == "$Nodes") {
      if (!r.next()) r.fail("unexpected EOF in $Nodes");
      long long count = 0;
      try { count = std::stoll(r.line); } catch (...) { r.fail("bad node count"); }
      for (long long i = 0; i < count; ++i) {
        if (!r.next()) r.fail("unexpected EOF in $Nodes");
        std::istringstream is(r.line);
        long long id;
        double x, y, z;
        if (!(is >> id >> x >> y >> z)) r.fail("malformed node line");
        nodes_by_id[id] = {x, y, z};
      }
      if (!r.next() || r.line != "$EndNodes") r.fail("missing $EndNodes");
    } else if (r.line == "$Elements") {
      if (!r.next()) r.fail("unexpected EOF in $Elements");
      long long count = 0;
      try { count = std::stoll(r.line); } catch (...) { r.fail("bad element count"); }
      for (long long i = 0; i < count; ++i) {
        if (!r.next()) r.fail("unexpected EOF in $Elements");
        std::istringstream is(r.line);
        long long id;
        int type, ntags;
        if (!(is >> id >> type >> ntags)) r.fail("malformed element line");
        std::vector<int> tags(ntags);
        for (int t = 0; t < ntags; ++t)
          if (!(is >> tags[t])) r.fail("malformed element tags");
        if (type == 2) {
          RawTri tri{};
          if (!(is >> tri.v[0] >> tri.v[1] >> tri.v[2])) r.fail("malformed triangle");
          tri.tag = ntags > 0 ? tags[0] : 0;
          used_tags.insert(tri.tag);
          tris.push_back(tri);
        } else if (type == 4) {
          RawTet tet{};
          if (!(is >> tet.v[0] >> tet.v[1] >> tet.v[2] >> tet.v[3]))
            r.fail("malformed tetrahedron");
          tets.push_back(tet);
        } else if (type == 15 || type == 1) {
          // points and lines are irrelevant here; skip
        } else {
          r.fail("unsupported element type " + std::to_string(type) +
                 " (only tets and boundary triangles)");
        }
      }
      if (!r.next() || r.line != "$EndElements") r.fail("missing $EndElements");
    }
    // unknown sections are skipped silently until their $End marker
    else if (!r.line.empty() && r.line[0] == '$' && r.line.rfind("$End", 0) != 0) {
      const std::string end = "$End" + r.line.substr(1);
      while (r.next() && r.line != end) {}
    }
  }
  if (!saw_format) throw ParseError("gmsh parse error: missing $MeshFormat section");
  if (tets.empty()) throw ParseError("gmsh parse error: mesh contains no tetrahedra");

  // Keep only vertices referenced by tets; renumber densely.
  std::map<long long, int> renumber;
  Mesh mesh;
  auto vertex_index = [&](long long id) {
    auto it = renumber.find(id);
    if (it != renumber.end()) return it->second;
    auto nit = nodes_by_id.find(id);
    if (nit == nodes_by_id.end())
      throw ParseError("gmsh parse error: dangling node id " + std::to_string(id));
    const int idx = static_cast<int>(mesh.vertices.size());
    renumber[id] = idx;
    mesh.vertices.push_back(nit->second);
    return idx;
  };

  for (const auto& t : tets) {
    std::array<int, 4> conn{};
    for (int i = 0; i < 4; ++i) conn[i] = vertex_index(t.v[i]);
    mesh.tets.push_back(conn);
  }

  // Fix orientation: gmsh does not guarantee positive tets.
  for (int e = 0; e < mesh.n_elements(); ++e) {
    if (mesh.signed_volume(e) < 0.0) std::swap(mesh.tets[e][0], mesh.tets[e][1]);
  }
  validate_mesh(mesh);

  // Match boundary triangles to owning tets by sorted vertex triple.
  std::map<std::array<int, 3>, FaceRef> face_of;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int f = 0; f < 4; ++f) {
      auto key = mesh.face_vertex_ids(e, f);
      std::sort(key.begin(), key.end());
      // interior faces appear twice; the boundary ones exactly once
      if (face_of.count(key)) face_of.erase(key);
      else face_of[key] = {e, f};
    }
  }

  auto tag_name = [&](int tag) {
    auto it = physical_names.find(tag);
    return it != physical_names.end() ? it->second : "tag" + std::to_string(tag);
  };

  for (const auto& tri : tris) {
    std::array<int, 3> key{};
    for (int i = 0; i < 3; ++i) {
      auto it = renumber.find(tri.v[i]);
      if (it == renumber.end())
        throw ParseError("gmsh parse error: boundary triangle references node " +
                         std::to_string(tri.v[i]) + " not used by any tet");
      key[i] = it->second;
    }
    std::sort(key.begin(), key.end());
    auto it = face_of.find(key);
    if (it == face_of.end())
      throw ParseError("gmsh parse error: boundary triangle is not a face of exactly one tet");
    mesh.boundary_faces.push_back({it->second.element, it->second.local_face,
                                   tag_name(tri.tag)});
  }

  build_connectivity(mesh);
  return mesh;
}

Mesh read_gmsh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file '" + path + "'");
  return parse_gmsh(in);
}

void write_gmsh(const Mesh& mesh, std::ostream& out) {
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";

  // Stable tag numbering from sorted tag names.
  std::map<std::string, int> tag_ids;
  for (const auto& bf : mesh.boundary_faces) tag_ids.emplace(bf.tag, 0);
  int next = 1;
  for (auto& [name, id] : tag_ids) id = next++;

  out << "$PhysicalNames\n" << tag_ids.size() << "\n";
  for (const auto& [name, id] : tag_ids) out << "2 " << id << " \"" << name << "\"\n";
  out << "$EndPhysicalNames\n";

  out.precision(17);
  out << "$Nodes\n" << mesh.vertices.size() << "\n";
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto& v = mesh.vertices[i];
    out << (i + 1) << " " << v.x << " " << v.y << " " << v.z << "\n";
  }
  out << "$EndNodes\n";

  out << "$Elements\n" << mesh.boundary_faces.size() + mesh.tets.size() << "\n";
  long long id = 1;
  for (const auto& bf : mesh.boundary_faces) {
    const auto ids = mesh.face_vertex_ids(bf.element, bf.local_face);
    out << id++ << " 2 2 " << tag_ids[bf.tag] << " " << tag_ids[bf.tag] << " "
        << ids[0] + 1 << " " << ids[1] + 1 << " " << ids[2] + 1 << "\n";
  }
  for (const auto& t : mesh.tets) {
    out << id++ << " 4 2 0 0 " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << " "
        << t[3] + 1 << "\n";
  }
  out << "$EndElements\n";
}

void write_gmsh_file(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_gmsh(mesh, out);
}

}  // namespace cdg
