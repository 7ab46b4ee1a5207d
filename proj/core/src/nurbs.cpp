#include "cdg/nurbs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cdg {

namespace {

// Knot span index such that knots[span] <= u < knots[span+1], clamped to the
// last nondegenerate span at u = 1.
int find_span(const std::vector<double>& knots, int degree, int n_ctrl, double u) {
  if (u >= knots[n_ctrl]) return n_ctrl - 1;
  int lo = degree, hi = n_ctrl;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (u < knots[mid] ? hi : lo) = mid;
  }
  return lo;
}

// Nonzero basis functions and first derivatives at u (Cox-de Boor).
void basis_funs(const std::vector<double>& knots, int degree, int span, double u,
                std::vector<double>& n, std::vector<double>& dn) {
  std::vector<double> left(degree + 1), right(degree + 1);
  std::vector<std::vector<double>> ndu(degree + 1, std::vector<double>(degree + 1));
  ndu[0][0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = u - knots[span + 1 - j];
    right[j] = knots[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  n.resize(degree + 1);
  for (int j = 0; j <= degree; ++j) n[j] = ndu[j][degree];

  // first derivatives from the degree-(p-1) row
  dn.assign(degree + 1, 0.0);
  for (int r = 0; r <= degree; ++r) {
    double d = 0.0;
    if (r >= 1) d += ndu[r - 1][degree - 1] / ndu[degree][r - 1];
    if (r <= degree - 1) d -= ndu[r][degree - 1] / ndu[degree][r];
    dn[r] = degree * d;
  }
}

void check_domain(double u, double v) {
  const double tol = 1e-12;
  if (u < -tol || u > 1.0 + tol || v < -tol || v > 1.0 + tol)
    throw DomainError("surface parameters (" + std::to_string(u) + "," +
                      std::to_string(v) + ") outside [0,1]^2");
}

}  // namespace

void NurbsSurface::validate() const {
  if (degree_u < 1 || degree_v < 1) throw ConfigError("nurbs: degrees must be >= 1");
  if (n_u < degree_u + 1 || n_v < degree_v + 1)
    throw ConfigError("nurbs: control net too small for the degrees");
  if (static_cast<int>(knots_u.size()) != n_u + degree_u + 1 ||
      static_cast<int>(knots_v.size()) != n_v + degree_v + 1)
    throw ConfigError("nurbs: knot vector lengths inconsistent with net size");
  if (static_cast<int>(control.size()) != n_u * n_v ||
      control.size() != weights.size())
    throw ConfigError("nurbs: control/weight array size mismatch");
  auto check_knots = [](const std::vector<double>& k, int degree, const char* name) {
    for (size_t i = 1; i < k.size(); ++i)
      if (k[i] < k[i - 1])
        throw ConfigError(std::string("nurbs: decreasing knot vector ") + name);
    for (int i = 0; i <= degree; ++i) {
      if (std::abs(k[i]) > 1e-14 || std::abs(k[k.size() - 1 - i] - 1.0) > 1e-14)
        throw ConfigError(std::string("nurbs: knot vector ") + name +
                          " must be clamped to [0,1]");
    }
    // interior multiplicities <= degree+1 hold by clamping and monotonicity;
    // a fully collapsed interior span is still rejected
    for (size_t i = degree + 1; i + degree + 1 < k.size(); ++i) {
      size_t j = i;
      while (j + 1 < k.size() && k[j + 1] == k[i]) ++j;
      if (static_cast<int>(j - i + 1) > degree + 1)
        throw ConfigError(std::string("nurbs: knot multiplicity exceeds degree+1 in ") +
                          name);
    }
  };
  check_knots(knots_u, degree_u, "U");
  check_knots(knots_v, degree_v, "V");
  for (double w : weights)
    if (w <= 0.0) throw ConfigError("nurbs: weights must be positive");
}

void eval_surface_derivs(const NurbsSurface& s, double u, double v, Vec3& point,
                         Vec3& du, Vec3& dv) {
  check_domain(u, v);
  u = std::clamp(u, 0.0, 1.0);
  v = std::clamp(v, 0.0, 1.0);

  const int su = find_span(s.knots_u, s.degree_u, s.n_u, u);
  const int sv = find_span(s.knots_v, s.degree_v, s.n_v, v);
  std::vector<double> nu, dnu, nv, dnv;
  basis_funs(s.knots_u, s.degree_u, su, u, nu, dnu);
  basis_funs(s.knots_v, s.degree_v, sv, v, nv, dnv);

  // homogeneous accumulation: A = sum w P B, W = sum w B, plus u/v partials
  Vec3 a{}, a_u{}, a_v{};
  double w = 0.0, w_u = 0.0, w_v = 0.0;
  for (int j = 0; j <= s.degree_v; ++j) {
    const int cj = sv - s.degree_v + j;
    for (int i = 0; i <= s.degree_u; ++i) {
      const int ci = su - s.degree_u + i;
      const int idx = cj * s.n_u + ci;
      const double wgt = s.weights[idx];
      const Vec3 pw = s.control[idx] * wgt;
      const double b = nu[i] * nv[j];
      const double bu = dnu[i] * nv[j];
      const double bv = nu[i] * dnv[j];
      a += pw * b;
      a_u += pw * bu;
      a_v += pw * bv;
      w += wgt * b;
      w_u += wgt * bu;
      w_v += wgt * bv;
    }
  }
  point = a / w;
  du = (a_u - point * w_u) / w;
  dv = (a_v - point * w_v) / w;
}

Vec3 eval_surface(const NurbsSurface& s, double u, double v) {
  Vec3 p, du, dv;
  eval_surface_derivs(s, u, v, p, du, dv);
  return p;
}

namespace {

struct GnState {
  double u, v;
  Vec3 point;
  double f;  // 0.5 |x - S|^2
};

// One projected Gauss-Newton solve from a given seed.
ClosestPointResult gauss_newton(const NurbsSurface& s, const Vec3& x, double u0,
                                double v0) {
  const int max_iters = 100;
  const double step_tol = 1e-12;
  const double grad_tol = 1e-10;

  double u = std::clamp(u0, 0.0, 1.0), v = std::clamp(v0, 0.0, 1.0);
  ClosestPointResult best;
  best.stationarity = 1e300;

  for (int it = 0; it < max_iters; ++it) {
    Vec3 p, su, sv;
    eval_surface_derivs(s, u, v, p, su, sv);
    const Vec3 r = x - p;

    // gradient of 0.5|x-S|^2: (-su.r, -sv.r)
    const double gu = -dot(su, r), gv = -dot(sv, r);
    // projected gradient: zero out components pushing outside the active box
    double pgu = gu, pgv = gv;
    if ((u <= 0.0 && gu > 0.0) || (u >= 1.0 && gu < 0.0)) pgu = 0.0;
    if ((v <= 0.0 && gv > 0.0) || (v >= 1.0 && gv < 0.0)) pgv = 0.0;
    const double pg = std::sqrt(pgu * pgu + pgv * pgv);

    if (pg < best.stationarity) {
      best.u = u;
      best.v = v;
      best.point = p;
      best.distance = norm(r);
      best.stationarity = pg;
      best.iterations = it;
    }
    if (pg < grad_tol) {
      best.converged = true;
      return best;
    }

    // Gauss-Newton system (J^T J) d = -grad with Levenberg guard
    double h11 = dot(su, su), h12 = dot(su, sv), h22 = dot(sv, sv);
    const double trace = h11 + h22;
    double det = h11 * h22 - h12 * h12;
    if (det < 1e-12 * trace * trace || trace <= 0.0) {
      const double damp = std::max(1e-10, 1e-8 * trace);
      h11 += damp;
      h22 += damp;
      det = h11 * h22 - h12 * h12;
    }
    double du = (-gu * h22 + gv * h12) / det;
    double dv = (-gv * h11 + gu * h12) / det;

    // backtracking: the plain step can overshoot on strongly curved patches
    const double f_cur = 0.5 * dot(r, r);
    double nu = u, nv = v;
    for (int half = 0; half < 30; ++half) {
      nu = std::clamp(u + du, 0.0, 1.0);
      nv = std::clamp(v + dv, 0.0, 1.0);
      const Vec3 trial = x - eval_surface(s, nu, nv);
      if (0.5 * dot(trial, trial) <= f_cur * (1.0 + 1e-12) ||
          std::hypot(nu - u, nv - v) < 1e-14)
        break;
      du *= 0.5;
      dv *= 0.5;
    }
    const double step = std::hypot(nu - u, nv - v);
    u = nu;
    v = nv;
    if (step < step_tol) {
      // re-evaluate stationarity at the final iterate
      Vec3 p2, su2, sv2;
      eval_surface_derivs(s, u, v, p2, su2, sv2);
      const Vec3 r2 = x - p2;
      double g2u = -dot(su2, r2), g2v = -dot(sv2, r2);
      if ((u <= 0.0 && g2u > 0.0) || (u >= 1.0 && g2u < 0.0)) g2u = 0.0;
      if ((v <= 0.0 && g2v > 0.0) || (v >= 1.0 && g2v < 0.0)) g2v = 0.0;
      const double pg2 = std::sqrt(g2u * g2u + g2v * g2v);
      if (pg2 < best.stationarity) {
        best.u = u;
        best.v = v;
        best.point = p2;
        best.distance = norm(r2);
        best.stationarity = pg2;
      }
      best.converged = best.stationarity < 1e-6;
      best.iterations = it + 1;
      return best;
    }
  }
  best.converged = best.stationarity < grad_tol;
  return best;
}

}  // namespace

ClosestPointResult closest_point(const NurbsSurface& s, const Vec3& x,
                                 const double* initial_uv) {
  double u0, v0;
  if (initial_uv) {
    u0 = initial_uv[0];
    v0 = initial_uv[1];
  } else {
    // coarse 9x9 scan
    double best = 1e300;
    u0 = v0 = 0.5;
    for (int i = 0; i < 9; ++i) {
      for (int j = 0; j < 9; ++j) {
        const double uu = i / 8.0, vv = j / 8.0;
        const double d = dot(x - eval_surface(s, uu, vv), x - eval_surface(s, uu, vv));
        if (d < best) {
          best = d;
          u0 = uu;
          v0 = vv;
        }
      }
    }
  }

  ClosestPointResult res = gauss_newton(s, x, u0, v0);
  if (res.converged || res.stationarity < 1e-10) {
    res.converged = true;
    return res;
  }

  // multi-start fallback over a 5x5 grid
  ClosestPointResult best = res;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      ClosestPointResult trial = gauss_newton(s, x, i / 4.0, j / 4.0);
      const bool closer = trial.distance < best.distance - 1e-14;
      const bool cleaner = std::abs(trial.distance - best.distance) <= 1e-14 &&
                           trial.stationarity < best.stationarity;
      if (closer || cleaner) best = trial;
    }
  }
  if (best.stationarity > 1e-6)
    throw NumericsError("closest_point: Gauss-Newton failed to converge (stationarity " +
                        std::to_string(best.stationarity) + ")");
  best.converged = true;
  return best;
}

Vec3 boundary_displacement(const NurbsSurface& s, const Vec3& x) {
  const ClosestPointResult r = closest_point(s, x);
  return r.point - x;
}

Vec3 sphere_displacement(const Vec3& center, double radius, const Vec3& x) {
  const Vec3 d = x - center;
  const double len = norm(d);
  if (len < 1e-14)
    throw DomainError("sphere_displacement: point coincides with the sphere center");
  return center + d * (radius / len) - x;
}

NurbsSurface make_sphere_octant(const Vec3& center, double radius) {
  // Tensor product of two rational quadratic quarter arcs: exact octant.
  const double w = 1.0 / std::sqrt(2.0);
  // arc 1 (equator): (1,0) -> (1,1)*w -> (0,1) in (x,y)
  const double ax[3] = {1, 1, 0}, ay[3] = {0, 1, 1}, aw[3] = {1, w, 1};
  // arc 2 (meridian): (1,0) -> (1,1)*w -> (0,1) in (cos,z)
  const double bc[3] = {1, 1, 0}, bz[3] = {0, 1, 1}, bw[3] = {1, w, 1};

  NurbsSurface s;
  s.degree_u = s.degree_v = 2;
  s.knots_u = s.knots_v = {0, 0, 0, 1, 1, 1};
  s.n_u = s.n_v = 3;
  s.control.resize(9);
  s.weights.resize(9);
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      const int idx = j * 3 + i;
      s.control[idx] = center + radius * Vec3{ax[i] * bc[j], ay[i] * bc[j], bz[j]};
      s.weights[idx] = aw[i] * bw[j];
    }
  }
  s.validate();
  return s;
}

NurbsSurface make_bilinear_patch(const Vec3& c00, const Vec3& c10, const Vec3& c01,
                                 const Vec3& c11) {
  NurbsSurface s;
  s.degree_u = s.degree_v = 1;
  s.knots_u = s.knots_v = {0, 0, 1, 1};
  s.n_u = s.n_v = 2;
  s.control = {c00, c10, c01, c11};
  s.weights = {1, 1, 1, 1};
  s.validate();
  return s;
}

NurbsSurface make_cylinder_quarter(const Vec3& base, double radius, double z0, double z1) {
  const double w = 1.0 / std::sqrt(2.0);
  NurbsSurface s;
  s.degree_u = 2;
  s.degree_v = 1;
  s.knots_u = {0, 0, 0, 1, 1, 1};
  s.knots_v = {0, 0, 1, 1};
  s.n_u = 3;
  s.n_v = 2;
  const double ax[3] = {1, 1, 0}, ay[3] = {0, 1, 1}, aw[3] = {1, w, 1};
  s.control.resize(6);
  s.weights.resize(6);
  for (int j = 0; j < 2; ++j) {
    const double z = j == 0 ? z0 : z1;
    for (int i = 0; i < 3; ++i) {
      s.control[j * 3 + i] = base + Vec3{radius * ax[i], radius * ay[i], z};
      s.weights[j * 3 + i] = aw[i];
    }
  }
  s.validate();
  return s;
}

NurbsSurface read_nurbs(std::istream& in) {
  std::string header;
  in >> header;
  if (header != "NURBS1") throw ParseError("nurbs: expected header 'NURBS1'");
  NurbsSurface s;
  in >> s.degree_u >> s.degree_v >> s.n_u >> s.n_v;
  if (!in) throw ParseError("nurbs: malformed header line");
  s.knots_u.resize(s.n_u + s.degree_u + 1);
  s.knots_v.resize(s.n_v + s.degree_v + 1);
  for (auto& k : s.knots_u) in >> k;
  for (auto& k : s.knots_v) in >> k;
  s.control.resize(static_cast<size_t>(s.n_u) * s.n_v);
  s.weights.resize(s.control.size());
  for (size_t i = 0; i < s.control.size(); ++i)
    in >> s.control[i].x >> s.control[i].y >> s.control[i].z >> s.weights[i];
  if (!in) throw ParseError("nurbs: truncated control net");
  s.validate();
  return s;
}

NurbsSurface read_nurbs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open NURBS file '" + path + "'");
  return read_nurbs(in);
}

void write_nurbs(const NurbsSurface& s, std::ostream& out) {
  out.precision(17);
  out << "NURBS1\n" << s.degree_u << " " << s.degree_v << " " << s.n_u << " " << s.n_v
      << "\n";
  for (size_t i = 0; i < s.knots_u.size(); ++i)
    out << s.knots_u[i] << (i + 1 < s.knots_u.size() ? ' ' : '\n');
  for (size_t i = 0; i < s.knots_v.size(); ++i)
    out << s.knots_v[i] << (i + 1 < s.knots_v.size() ? ' ' : '\n');
  for (size_t i = 0; i < s.control.size(); ++i)
    out << s.control[i].x << " " << s.control[i].y << " " << s.control[i].z << " "
        << s.weights[i] << "\n";
}

}  // namespace cdg
