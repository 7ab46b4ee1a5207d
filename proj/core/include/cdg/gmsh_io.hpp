#pragma once

#include <iosfwd>
#include <string>

#include "cdg/mesh.hpp"

namespace cdg {

/// Reads a Gmsh MSH 2.2 ASCII mesh: tetrahedra (type 4) as volume elements,
/// tagged triangles (type 2) as boundary faces. Physical names resolve tags;
/// integer-only files get synthesized names "tag<N>". Unreferenced vertices
/// are dropped and connectivity is built before returning.
Mesh parse_gmsh(std::istream& in);
Mesh read_gmsh_file(const std::string& path);

/// Writes the mesh back out in MSH 2.2 ASCII.
void write_gmsh(const Mesh& mesh, std::ostream& out);
void write_gmsh_file(const Mesh& mesh, const std::string& path);

}  // namespace cdg
