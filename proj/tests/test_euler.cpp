#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cdg/euler.hpp>
#include <cdg/viscosity.hpp>

#include <cmath>
#include <random>

using namespace cdg;

namespace {

const GasModel kGas{1.4};

ConservedState make_state(double rho, const Vec3& v, double p, double gamma = 1.4) {
  ConservedState u;
  u.rho = rho;
  u.mom = rho * v;
  u.rhoE = p / (gamma - 1.0) + 0.5 * rho * dot(v, v);
  return u;
}

ConservedState random_state(std::mt19937& gen) {
  std::uniform_real_distribution<double> rho(0.2, 3.0);
  std::uniform_real_distribution<double> vel(-1.5, 1.5);
  std::uniform_real_distribution<double> pres(0.2, 4.0);
  return make_state(rho(gen), {vel(gen), vel(gen), vel(gen)}, pres(gen));
}

Vec3 random_unit(std::mt19937& gen) {
  std::normal_distribution<double> n(0, 1);
  Vec3 v{n(gen), n(gen), n(gen)};
  return v / norm(v);
}

// random rotation from two unit vectors (Gram-Schmidt)
std::array<Vec3, 3> random_rotation(std::mt19937& gen) {
  const Vec3 a = random_unit(gen);
  Vec3 b = random_unit(gen);
  b = b - dot(a, b) * a;
  b = b / norm(b);
  const Vec3 c = cross(a, b);
  return {a, b, c};
}

Vec3 rotate(const std::array<Vec3, 3>& r, const Vec3& v) {
  // rows of r are the new basis: rotated vector components
  return {dot(r[0], v), dot(r[1], v), dot(r[2], v)};
}

ConservedState rotate_state(const std::array<Vec3, 3>& r, const ConservedState& u) {
  ConservedState out = u;
  out.mom = rotate(r, u.mom);
  return out;
}

// Independent scalar reference implementation of the LLF flux, written
// directly from the component formulas.
Flux5 llf_reference(const ConservedState& l, const ConservedState& r, const Vec3& n) {
  const double g = 1.4;
  auto prs = [&](const ConservedState& u) {
    return (g - 1) * (u.rhoE - (u.mom.x * u.mom.x + u.mom.y * u.mom.y +
                                u.mom.z * u.mom.z) /
                                   (2 * u.rho));
  };
  auto f = [&](const ConservedState& u, int c) {
    const double p = prs(u);
    const double vn = (u.mom.x * n.x + u.mom.y * n.y + u.mom.z * n.z) / u.rho;
    switch (c) {
      case 0: return u.rho * vn;
      case 1: return u.mom.x * vn + p * n.x;
      case 2: return u.mom.y * vn + p * n.y;
      case 3: return u.mom.z * vn + p * n.z;
      default: return vn * (u.rhoE + p);
    }
  };
  auto speed = [&](const ConservedState& u) {
    const double p = prs(u);
    return std::abs((u.mom.x * n.x + u.mom.y * n.y + u.mom.z * n.z) / u.rho) +
           std::sqrt(g * p / u.rho);
  };
  const double lam = std::max(speed(l), speed(r));
  Flux5 out;
  for (int c = 0; c < 5; ++c) out[c] = 0.5 * (f(l, c) + f(r, c)) - 0.5 * lam * (r[c] - l[c]);
  return out;
}

}  // namespace

TEST_CASE("pressure formula") {
  ConservedState u;
  u.rho = 1;
  u.mom = {0, 0, 0};
  u.rhoE = 1;
  CHECK(pressure(u, kGas) == doctest::Approx(0.4).epsilon(1e-14));

  u.mom = {1, 0, 0};
  CHECK(pressure(u, kGas) == doctest::Approx(0.2).epsilon(1e-14));

  // inadmissibility boundary: rhoE = |m|^2/(2 rho)
  u.rhoE = 0.5;
  CHECK(pressure(u, kGas) == doctest::Approx(0.0));
  CHECK(!admissible(u, kGas));

  u.rho = -1;
  CHECK_THROWS_AS(pressure(u, kGas), NumericsError);
}

TEST_CASE("flux tensor") {
  SUBCASE("stationary gas: only pressure in the momentum diagonal") {
    const ConservedState u = make_state(2.0, {0, 0, 0}, 3.0);
    const auto f = flux(u, kGas);
    for (int d = 0; d < 3; ++d) {
      CHECK(f[d][0] == 0.0);
      CHECK(f[d][4] == 0.0);
      for (int c = 1; c <= 3; ++c)
        CHECK(f[d][c] == doctest::Approx(c == d + 1 ? 3.0 : 0.0));
    }
  }
  SUBCASE("unit flow in x") {
    const ConservedState u = make_state(1.0, {1, 0, 0}, 1.0);
    CHECK(u.rhoE == doctest::Approx(3.0));
    const auto f = flux(u, kGas);
    CHECK(f[0][0] == doctest::Approx(1.0));
    CHECK(f[0][1] == doctest::Approx(2.0));
    CHECK(f[0][2] == doctest::Approx(0.0));
    CHECK(f[0][3] == doctest::Approx(0.0));
    CHECK(f[0][4] == doctest::Approx(4.0));
  }
  SUBCASE("axis permutation symmetry") {
    const ConservedState ux = make_state(1.2, {0.7, 0, 0}, 0.9);
    const ConservedState uy = make_state(1.2, {0, 0.7, 0}, 0.9);
    const auto fx = flux(ux, kGas);
    const auto fy = flux(uy, kGas);
    CHECK(fx[0][0] == doctest::Approx(fy[1][0]));
    CHECK(fx[0][1] == doctest::Approx(fy[1][2]));
    CHECK(fx[0][4] == doctest::Approx(fy[1][4]));
  }
}

TEST_CASE("max wavespeed") {
  const ConservedState u = make_state(1.0, {0, 0, 0}, 1.0);
  CHECK(max_wavespeed(u, kGas, {1, 0, 0}) ==
        doctest::Approx(std::sqrt(1.4)).epsilon(1e-12));

  const double c = std::sqrt(1.4);
  const ConservedState moving = make_state(1.0, {c, 0, 0}, 1.0);
  CHECK(max_wavespeed(moving, kGas, {1, 0, 0}) == doctest::Approx(2 * c).epsilon(1e-12));
  CHECK(max_wavespeed(moving, kGas, {-1, 0, 0}) ==
        doctest::Approx(2 * c).epsilon(1e-12));
}

TEST_CASE("LLF: consistency, antisymmetry, reference implementation") {
  std::mt19937 gen(77);
  for (int rep = 0; rep < 1000; ++rep) {
    const ConservedState u = random_state(gen);
    const Vec3 n = random_unit(gen);
    const Flux5 f = llf_flux(u, u, n, kGas);
    const Flux5 exact = flux_dot_n(u, kGas, n);
    for (int c = 0; c < 5; ++c)
      CHECK(std::abs(f[c] - exact[c]) <= 1e-12 * (1.0 + std::abs(exact[c])));
  }

  for (int rep = 0; rep < 1000; ++rep) {
    const ConservedState a = random_state(gen), b = random_state(gen);
    const Vec3 n = random_unit(gen);
    const Flux5 fab = llf_flux(a, b, n, kGas);
    const Flux5 fba = llf_flux(b, a, -n, kGas);
    for (int c = 0; c < 5; ++c) CHECK(std::abs(fab[c] + fba[c]) < 1e-12);
  }

  // Sod-like jump vs the independently coded scalar version
  const ConservedState left = make_state(1.0, {0, 0, 0}, 1.0);
  const ConservedState right = make_state(0.125, {0, 0, 0}, 0.1);
  for (const Vec3 n : {Vec3{1, 0, 0}, Vec3{0.6, 0.8, 0}}) {
    const Flux5 mine = llf_flux(left, right, n, kGas);
    const Flux5 ref = llf_reference(left, right, n);
    for (int c = 0; c < 5; ++c) CHECK(mine[c] == doctest::Approx(ref[c]).epsilon(1e-13));
  }
}

TEST_CASE("HLLC: consistency, contact resolution, supersonic limits") {
  std::mt19937 gen(99);
  for (int rep = 0; rep < 1000; ++rep) {
    const ConservedState u = random_state(gen);
    const Vec3 n = random_unit(gen);
    const Flux5 f = hllc_flux(u, u, n, kGas);
    const Flux5 exact = flux_dot_n(u, kGas, n);
    for (int c = 0; c < 5; ++c)
      CHECK(std::abs(f[c] - exact[c]) <= 1e-12 * (1.0 + std::abs(exact[c])));
  }

  SUBCASE("isolated contact is resolved exactly") {
    const Vec3 n{1, 0, 0};
    // equal pressure and velocity aligned with n, different density
    const ConservedState l = make_state(1.0, {0.3, 0, 0}, 1.0);
    const ConservedState r = make_state(0.5, {0.3, 0, 0}, 1.0);
    const Flux5 f = hllc_flux(l, r, n, kGas);
    const Flux5 upwind = flux_dot_n(l, kGas, n);  // positive contact speed: left
    for (int c = 0; c < 5; ++c) CHECK(std::abs(f[c] - upwind[c]) < 1e-12);

    const ConservedState l2 = make_state(1.0, {-0.3, 0, 0}, 1.0);
    const ConservedState r2 = make_state(0.5, {-0.3, 0, 0}, 1.0);
    const Flux5 f2 = hllc_flux(l2, r2, n, kGas);
    const Flux5 upwind2 = flux_dot_n(r2, kGas, n);
    for (int c = 0; c < 5; ++c) CHECK(std::abs(f2[c] - upwind2[c]) < 1e-12);
  }

  SUBCASE("supersonic left-moving states take the right flux") {
    const Vec3 n{1, 0, 0};
    const double c = std::sqrt(1.4);
    const ConservedState l = make_state(1.0, {-3 * c, 0, 0}, 1.0);
    const ConservedState r = make_state(1.0, {-3.5 * c, 0, 0}, 1.0);
    const Flux5 f = hllc_flux(l, r, n, kGas);
    const Flux5 expect = flux_dot_n(r, kGas, n);
    for (int cc = 0; cc < 5; ++cc) CHECK(f[cc] == doctest::Approx(expect[cc]));
  }

  SUBCASE("antisymmetry") {
    for (int rep = 0; rep < 500; ++rep) {
      const ConservedState a = random_state(gen), b = random_state(gen);
      const Vec3 n = random_unit(gen);
      const Flux5 fab = hllc_flux(a, b, n, kGas);
      const Flux5 fba = hllc_flux(b, a, -n, kGas);
      for (int c = 0; c < 5; ++c)
        CHECK(std::abs(fab[c] + fba[c]) < 1e-11 * (1 + std::abs(fab[c])));
    }
  }
}

TEST_CASE("Riemann fluxes: rotational invariance") {
  std::mt19937 gen(123);
  for (int rep = 0; rep < 400; ++rep) {
    const ConservedState a = random_state(gen), b = random_state(gen);
    const Vec3 n = random_unit(gen);
    const auto rot = random_rotation(gen);

    for (const bool use_hllc : {false, true}) {
      const Flux5 f =
          use_hllc ? hllc_flux(a, b, n, kGas) : llf_flux(a, b, n, kGas);
      const Flux5 rf = use_hllc
                           ? hllc_flux(rotate_state(rot, a), rotate_state(rot, b),
                                       rotate(rot, n), kGas)
                           : llf_flux(rotate_state(rot, a), rotate_state(rot, b),
                                      rotate(rot, n), kGas);
      // scalar components invariant, momentum components rotate
      CHECK(std::abs(f[0] - rf[0]) < 1e-10 * (1 + std::abs(f[0])));
      CHECK(std::abs(f[4] - rf[4]) < 1e-10 * (1 + std::abs(f[4])));
      const Vec3 mom{f[1], f[2], f[3]};
      const Vec3 expect = rotate(rot, mom);
      CHECK(std::abs(rf[1] - expect.x) < 1e-10 * (1 + std::abs(expect.x)));
      CHECK(std::abs(rf[2] - expect.y) < 1e-10 * (1 + std::abs(expect.y)));
      CHECK(std::abs(rf[3] - expect.z) < 1e-10 * (1 + std::abs(expect.z)));
    }
  }
}

TEST_CASE("boundary states") {
  const ConservedState inf = make_state(1.0, {0.5, 0, 0}, 1.0);

  SUBCASE("wall with tangential flow keeps the state") {
    const Vec3 n{0, 0, 1};
    const ConservedState u = make_state(1.0, {0.7, 0.2, 0}, 1.0);
    const ConservedState ghost = boundary_state(u, n, BcKind::SlipWall, inf);
    CHECK(norm(ghost.mom - u.mom) < 1e-15);
    CHECK(ghost.rho == u.rho);
    CHECK(ghost.rhoE == u.rhoE);
  }

  SUBCASE("wall with normal flow reflects and kills the LLF mass flux") {
    const Vec3 n{1, 0, 0};
    const ConservedState u = make_state(1.0, {1.0, 0, 0}, 1.0);
    const ConservedState ghost = boundary_state(u, n, BcKind::SlipWall, inf);
    CHECK(ghost.mom.x == doctest::Approx(-1.0));
    const Flux5 f = llf_flux(u, ghost, n, kGas);
    CHECK(std::abs(f[0]) < 1e-12);
    CHECK(std::abs(f[4]) < 1e-12);
  }

  SUBCASE("farfield returns the freestream") {
    const ConservedState u = make_state(2.0, {0, 0, 0}, 2.0);
    const ConservedState ghost = boundary_state(u, {0, 1, 0}, BcKind::Farfield, inf);
    CHECK(ghost.rho == inf.rho);
    CHECK(ghost.rhoE == inf.rhoE);
  }

  SUBCASE("unknown kind string") {
    CHECK_THROWS_AS(bc_kind_from_string("weird"), ConfigError);
  }
}

TEST_CASE("smoothness indicator via Parseval") {
  const auto re = get_reference_element(3);
  const int np = re->n_basis();
  const int np_prev = basis_count(2);

  SUBCASE("zero top-degree modes give S_k = 0") {
    Eigen::VectorXd modal = Eigen::VectorXd::Zero(np);
    modal(0) = 1.0;
    modal(2) = 0.5;
    const Eigen::VectorXd nodal = re->vandermonde() * modal;
    CHECK(smoothness_indicator(nodal, *re) == doctest::Approx(0.0));
  }
  SUBCASE("pure top mode gives S_k = 1") {
    Eigen::VectorXd modal = Eigen::VectorXd::Zero(np);
    modal(np - 1) = 2.0;
    const Eigen::VectorXd nodal = re->vandermonde() * modal;
    CHECK(smoothness_indicator(nodal, *re) == doctest::Approx(1.0));
  }
  SUBCASE("equal energy in one low and one top mode gives 0.5") {
    Eigen::VectorXd modal = Eigen::VectorXd::Zero(np);
    modal(1) = 1.0;
    modal(np_prev) = 1.0;
    const Eigen::VectorXd nodal = re->vandermonde() * modal;
    CHECK(smoothness_indicator(nodal, *re) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("scale invariance and zero field") {
    std::mt19937 gen(4);
    std::uniform_real_distribution<double> uni(-1, 1);
    Eigen::VectorXd nodal(np);
    for (int i = 0; i < np; ++i) nodal(i) = uni(gen);
    const double s1 = smoothness_indicator(nodal, *re);
    const double s2 = smoothness_indicator((-37.0) * nodal, *re);
    CHECK(s1 == doctest::Approx(s2).epsilon(1e-13));
    CHECK(smoothness_indicator(Eigen::VectorXd::Zero(np), *re) == 0.0);
  }
  SUBCASE("jacobian-weighted variant agrees on the reference element") {
    std::mt19937 gen(8);
    std::uniform_real_distribution<double> uni(-1, 1);
    Eigen::VectorXd nodal(np);
    for (int i = 0; i < np; ++i) nodal(i) = uni(gen);
    const std::vector<double> jac(re->n_cub(), 1.0);
    CHECK(smoothness_indicator(nodal, *re, &jac) ==
          doctest::Approx(smoothness_indicator(nodal, *re)).epsilon(1e-10));
  }
}

TEST_CASE("viscosity ramp") {
  ViscosityModel model;
  model.eps0 = 0.3;
  model.kappa = 4.0;
  const int p = 4;
  const double s0 = model.s0(p);
  CHECK(s0 == doctest::Approx(std::log10(1.0 / 256.0)).epsilon(1e-12));

  // eps(s0) = eps0/2 exactly
  CHECK(viscosity_amount(std::pow(10.0, s0), p, model) ==
        doctest::Approx(0.15).epsilon(1e-14));

  // continuity at both breakpoints
  const double below = viscosity_amount(std::pow(10.0, s0 - model.kappa - 1e-9), p, model);
  const double at_lo = viscosity_amount(std::pow(10.0, s0 - model.kappa + 1e-9), p, model);
  CHECK(below == 0.0);
  CHECK(at_lo < 1e-9);
  const double at_hi = viscosity_amount(std::pow(10.0, s0 + model.kappa - 1e-9), p, model);
  const double above = viscosity_amount(std::pow(10.0, s0 + model.kappa + 1e-9), p, model);
  CHECK(above == doctest::Approx(0.3));
  CHECK(std::abs(at_hi - above) < 1e-8);

  // monotone nondecreasing, bounded in [0, eps0]
  double prev = -1.0;
  for (double sk = s0 - 2 * model.kappa; sk <= s0 + 2 * model.kappa; sk += 0.01) {
    const double eps = viscosity_amount(std::pow(10.0, sk), p, model);
    CHECK(eps >= prev - 1e-15);
    CHECK(eps >= 0.0);
    CHECK(eps <= model.eps0 + 1e-15);
    prev = eps;
  }

  // S_k = 0 handled as smooth
  CHECK(viscosity_amount(0.0, p, model) == 0.0);

  // defaults match the transonic presets
  const ViscosityModel defaults;
  CHECK(defaults.kappa == 4.0);
  CHECK(defaults.eps0 == 0.3);
}
