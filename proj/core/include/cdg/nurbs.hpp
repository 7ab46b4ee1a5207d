#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cdg/types.hpp"

namespace cdg {

/// Rational tensor-product B-spline surface over the parameter domain [0,1]^2.
struct NurbsSurface {
  int degree_u = 0, degree_v = 0;
  std::vector<double> knots_u, knots_v;  // clamped, nondecreasing, in [0,1]
  int n_u = 0, n_v = 0;                  // control net dimensions
  std::vector<Vec3> control;             // row-major: index = j*n_u + i
  std::vector<double> weights;           // same layout, all > 0

  void validate() const;
};

/// Point evaluation. Parameters outside [0,1]^2 raise DomainError.
Vec3 eval_surface(const NurbsSurface& s, double u, double v);

/// Point plus exact first partials of the rational map.
void eval_surface_derivs(const NurbsSurface& s, double u, double v, Vec3& point,
                         Vec3& du, Vec3& dv);

struct ClosestPointResult {
  double u = 0.0, v = 0.0;
  Vec3 point{};
  double distance = 0.0;
  double stationarity = 0.0;  // projected-gradient norm at the returned iterate
  int iterations = 0;
  bool converged = false;
};

/// Projected Gauss-Newton minimization of 0.5 |x - S(u,v)|^2 over the unit
/// box. Seeds from a coarse 9x9 grid scan unless an initial guess is given;
/// retries from a 5x5 multi-start on non-convergence and throws NumericsError
/// if the stationarity still exceeds 1e-6.
ClosestPointResult closest_point(const NurbsSurface& s, const Vec3& x,
                                 const double* initial_uv = nullptr);

/// g(x) = S(u*,v*) - x for surface-adjacent points.
Vec3 boundary_displacement(const NurbsSurface& s, const Vec3& x);

/// Analytic sphere projection displacement g(x) = x0 + r (x-x0)/|x-x0| - x.
/// Degenerate inputs (|x-x0| < 1e-14) raise DomainError.
Vec3 sphere_displacement(const Vec3& center, double radius, const Vec3& x);

/// Exact unit-octant sphere patch (x,y,z >= 0 for the unit sphere scaled to
/// `radius` around `center`): rational quadratic Bezier net.
NurbsSurface make_sphere_octant(const Vec3& center, double radius);

/// Flat bilinear patch spanning the quad (c00, c10, c01, c11).
NurbsSurface make_bilinear_patch(const Vec3& c00, const Vec3& c10, const Vec3& c01,
                                 const Vec3& c11);

/// Quarter cylinder of given radius around the z-axis segment [z0,z1],
/// spanning the angular range [0, pi/2] from the +x axis.
NurbsSurface make_cylinder_quarter(const Vec3& base, double radius, double z0, double z1);

/// Plain-text surface format: degrees, knot vectors, control net with
/// weights (row-major). See docs/FORMATS.md.
NurbsSurface read_nurbs(std::istream& in);
NurbsSurface read_nurbs_file(const std::string& path);
void write_nurbs(const NurbsSurface& s, std::ostream& out);

}  // namespace cdg
