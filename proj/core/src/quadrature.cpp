#include "cdg/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace cdg {

namespace {

// Reference tet/triangle vertices, in the order used for barycentric coordinates.
constexpr double kTetVerts[4][3] = {
    {-1.0, -1.0, -1.0}, {1.0, -1.0, -1.0}, {-1.0, 1.0, -1.0}, {-1.0, -1.0, 1.0}};
constexpr double kTriVerts[3][2] = {{-1.0, -1.0}, {1.0, -1.0}, {-1.0, 1.0}};

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binom(int n, int k) {
  return factorial(n) / (factorial(k) * factorial(n - k));
}

// Enumerate nonnegative integer tuples of length `len` summing to `total`.
void enumerate_compositions(int total, int len, std::vector<int>& cur,
                            std::vector<std::vector<int>>& out) {
  if (len == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= total; ++v) {
    cur.push_back(v);
    enumerate_compositions(total - v, len - 1, cur, out);
    cur.pop_back();
  }
}

// Grundmann-Moller weights/barycentric points for the d-simplex, strength 2s+1.
// Weights are produced for the unit simplex (volume 1/d!) and must be scaled
// by the target simplex volume ratio.
void grundmann_moller(int s, int d, std::vector<std::vector<double>>& bary,
                      std::vector<double>& weights) {
  bary.clear();
  weights.clear();
  const int deg = 2 * s + 1;
  for (int i = 0; i <= s; ++i) {
    const double denom = d + deg - 2.0 * i;  // d + 2s - 2i + 1
    const double w = (i % 2 == 0 ? 1.0 : -1.0) * std::pow(2.0, -2.0 * s) *
                     std::pow(denom, deg) / (factorial(i) * factorial(d + deg - i));
    std::vector<std::vector<int>> ks;
    std::vector<int> cur;
    enumerate_compositions(s - i, d + 1, cur, ks);
    for (const auto& k : ks) {
      std::vector<double> lambda(d + 1);
      for (int j = 0; j <= d; ++j) lambda[j] = (2.0 * k[j] + 1.0) / denom;
      bary.push_back(std::move(lambda));
      weights.push_back(w);
    }
  }
}

// Exact integral of a^p b^q over the reference triangle {-1<=a,b; a+b<=0}.
// Substituting a=2x-1, b=2y-1 with (x,y) in the unit simplex and using
// int x^i y^j = i! j! / (i+j+2)!.
double tri_monomial_integral(int p, int q) {
  double sum = 0.0;
  for (int i = 0; i <= p; ++i) {
    for (int j = 0; j <= q; ++j) {
      const double sign = ((p - i) + (q - j)) % 2 == 0 ? 1.0 : -1.0;
      sum += sign * binom(p, i) * binom(q, j) * std::pow(2.0, i + j) *
             factorial(i) * factorial(j) / factorial(i + j + 2);
    }
  }
  return 4.0 * sum;
}

struct TriOrbit {
  int kind;      // 1 (centroid), 3 ((a,b,b) perms) or 6 ((a,b,c) perms)
  double a, b;   // kind 3: b duplicated, a = 1-2b; kind 6: a, b distinct
};

void orbit_points(const TriOrbit& o, std::vector<std::array<double, 3>>& pts) {
  auto push = [&](double l1, double l2, double l3) {
    pts.push_back({l1, l2, l3});
  };
  if (o.kind == 1) {
    push(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
  } else if (o.kind == 3) {
    const double c = 1.0 - 2.0 * o.b;
    push(c, o.b, o.b);
    push(o.b, c, o.b);
    push(o.b, o.b, c);
  } else {
    const double c = 1.0 - o.a - o.b;
    push(o.a, o.b, c);
    push(o.a, c, o.b);
    push(o.b, o.a, c);
    push(o.b, c, o.a);
    push(c, o.a, o.b);
    push(c, o.b, o.a);
  }
}

// Dunavant fully-symmetric positive triangle rules. Orbit positions from the
// published tables; orbit weights recomputed here from the moment equations
// so the rules are exact to machine precision.
bool tabulated_tri_orbits(int strength, std::vector<TriOrbit>& orbits) {
  switch (strength) {
    case 0:
    case 1:
      orbits = {{1, 0, 0}};
      return true;
    case 2:
      orbits = {{3, 2.0 / 3.0, 1.0 / 6.0}};
      return true;
    case 3:
    case 4:
      orbits = {{3, 0.108103018168070, 0.445948490915965},
                {3, 0.816847572980459, 0.091576213509771}};
      return true;
    case 5:
      orbits = {{1, 0, 0},
                {3, 0.059715871789770, 0.470142064105115},
                {3, 0.797426985353087, 0.101286507323456}};
      return true;
    case 6:
      orbits = {{3, 0.501426509658179, 0.249286745170910},
                {3, 0.873821971016996, 0.063089014491502},
                {6, 0.053145049844816, 0.310352451033785}};
      return true;
    case 7:
    case 8:
      orbits = {{1, 0, 0},
                {3, 0.081414823414554, 0.459292588292723},
                {3, 0.658861384496480, 0.170569307751760},
                {3, 0.898905543365938, 0.050547228317031},
                {6, 0.008394777409958, 0.263112829634638}};
      return true;
    default:
      return false;
  }
}

}  // namespace

TetCubature grundmann_moller_tet(int s) {
  std::vector<std::vector<double>> bary;
  std::vector<double> w;
  grundmann_moller(s, 3, bary, w);
  TetCubature rule;
  rule.strength = 2 * s + 1;
  const double scale = (4.0 / 3.0) * factorial(3);  // unit simplex -> reference tet
  for (size_t q = 0; q < bary.size(); ++q) {
    Vec3 p{0, 0, 0};
    for (int v = 0; v < 4; ++v)
      for (int c = 0; c < 3; ++c) p[c] += bary[q][v] * kTetVerts[v][c];
    rule.nodes.push_back(p);
    rule.weights.push_back(w[q] * scale);
  }
  return rule;
}

TetCubature tet_cubature(int strength) {
  // smallest s with 2s+1 >= strength
  return grundmann_moller_tet(std::max(0, strength / 2));
}

TriQuadrature grundmann_moller_tri(int s) {
  std::vector<std::vector<double>> bary;
  std::vector<double> w;
  grundmann_moller(s, 2, bary, w);
  TriQuadrature rule;
  rule.strength = 2 * s + 1;
  const double scale = 2.0 * factorial(2);  // unit simplex (area 1/2) -> area 2
  for (size_t q = 0; q < bary.size(); ++q) {
    double a = 0.0, b = 0.0;
    for (int v = 0; v < 3; ++v) {
      a += bary[q][v] * kTriVerts[v][0];
      b += bary[q][v] * kTriVerts[v][1];
    }
    rule.a.push_back(a);
    rule.b.push_back(b);
    rule.weights.push_back(w[q] * scale);
  }
  return rule;
}

TriQuadrature tri_quadrature(int strength) {
  std::vector<TriOrbit> orbits;
  if (!tabulated_tri_orbits(strength, orbits)) {
    return grundmann_moller_tri(std::max(0, strength / 2));
  }

  // Expand orbits to (a,b) points on the reference triangle.
  std::vector<std::vector<std::array<double, 2>>> orbit_ab(orbits.size());
  for (size_t o = 0; o < orbits.size(); ++o) {
    std::vector<std::array<double, 3>> bary;
    orbit_points(orbits[o], bary);
    for (const auto& l : bary) {
      double a = 0.0, b = 0.0;
      for (int v = 0; v < 3; ++v) {
        a += l[v] * kTriVerts[v][0];
        b += l[v] * kTriVerts[v][1];
      }
      orbit_ab[o].push_back({a, b});
    }
  }

  // Solve for one weight per orbit from the monomial moment equations.
  std::vector<std::pair<int, int>> monomials;
  for (int total = 0; total <= strength; ++total)
    for (int p = 0; p <= total; ++p) monomials.push_back({p, total - p});

  Eigen::MatrixXd A(monomials.size(), orbits.size());
  Eigen::VectorXd rhs(monomials.size());
  for (size_t m = 0; m < monomials.size(); ++m) {
    const auto [p, q] = monomials[m];
    rhs(m) = tri_monomial_integral(p, q);
    for (size_t o = 0; o < orbits.size(); ++o) {
      double sum = 0.0;
      for (const auto& ab : orbit_ab[o]) sum += std::pow(ab[0], p) * std::pow(ab[1], q);
      A(m, o) = sum;
    }
  }
  Eigen::VectorXd w = A.colPivHouseholderQr().solve(rhs);
  if ((A * w - rhs).lpNorm<Eigen::Infinity>() > 1e-12) {
    throw NumericsError("tri_quadrature: tabulated rule fails moment equations, strength " +
                        std::to_string(strength));
  }

  TriQuadrature rule;
  rule.strength = strength;
  for (size_t o = 0; o < orbits.size(); ++o) {
    for (const auto& ab : orbit_ab[o]) {
      rule.a.push_back(ab[0]);
      rule.b.push_back(ab[1]);
      rule.weights.push_back(w(o));
    }
  }
  return rule;
}

}  // namespace cdg
