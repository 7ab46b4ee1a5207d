#pragma once

#include <vector>

#include "cdg/types.hpp"

namespace cdg {

/// Volume cubature rule on the reference tetrahedron
/// T = { -1 <= r,s,t ; r+s+t <= -1 }, weights summing to its volume 4/3.
struct TetCubature {
  int strength = 0;  // exact for total degree <= strength
  std::vector<Vec3> nodes;
  std::vector<double> weights;
};

/// Quadrature rule on the reference triangle
/// T2 = { -1 <= a,b ; a+b <= 0 }, weights summing to its area 2.
struct TriQuadrature {
  int strength = 0;
  std::vector<double> a, b;
  std::vector<double> weights;
};

/// Grundmann-Moller simplex cubature of odd strength 2s+1 on the reference
/// tetrahedron. Point count is C(s+4,4); points are strictly interior.
/// Weights alternate in sign for s >= 1 (inherent to the family).
TetCubature grundmann_moller_tet(int s);

/// Tet cubature of at least the requested strength (Grundmann-Moller family,
/// rounded up to the next odd strength).
TetCubature tet_cubature(int strength);

/// Symmetric triangle rule of at least the requested strength. Tabulated
/// fully-symmetric rules for strengths <= 8 (3/6/12/16 points at 2/4/6/8);
/// Grundmann-Moller triangle rules beyond. All rules are invariant under
/// the triangle's symmetry group, which face-trace pairing relies on.
TriQuadrature tri_quadrature(int strength);

/// Grundmann-Moller rule on the reference triangle, strength 2s+1.
TriQuadrature grundmann_moller_tri(int s);

}  // namespace cdg
