#pragma once

#include <string>

#include "cdg/mesh.hpp"

namespace cdg {

/// Structured [0,1]^3 cube, n^3 cells split into 6 tets each (Kuhn
/// subdivision, conforming). Boundary faces tagged by `tag` (all sides) or,
/// when per_side is true, "xmin","xmax","ymin","ymax","zmin","zmax".
Mesh make_cube_mesh(int n, const std::string& tag = "wall", bool per_side = false);

/// Single reference tetrahedron with all faces tagged `tag`.
Mesh make_single_tet(const std::string& tag = "wall");

/// Two tets sharing one face, outer boundary tagged `tag`.
Mesh make_two_tets(const std::string& tag = "wall");

/// Spherical shell around a sphere of radius r_inner centered at the origin:
/// an icosphere surface (20*4^subdivisions triangles) extruded radially in
/// `layers` geometrically graded layers out to r_outer, prisms split into
/// tets with globally consistent diagonals. Inner boundary tagged
/// `inner_tag`, outer tagged `outer_tag`. Surface vertices lie on the sphere;
/// faces are straight (chordal) until curved.
Mesh make_sphere_shell_mesh(double r_inner, double r_outer, int subdivisions,
                            int layers, const std::string& inner_tag = "sphere",
                            const std::string& outer_tag = "farfield");

}  // namespace cdg
