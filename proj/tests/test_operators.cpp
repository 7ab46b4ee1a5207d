#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cdg/curved_mesh.hpp>
#include <cdg/meshgen.hpp>
#include <cdg/operators.hpp>

#include "support/oracles.hpp"

#include <cmath>
#include <random>

using namespace cdg;

namespace {

std::vector<Vec3> reference_nodes(const ReferenceElement& re) {
  return re.colloc_nodes();
}

std::vector<Vec3> scaled_nodes(const ReferenceElement& re, double factor) {
  auto nodes = re.colloc_nodes();
  for (auto& n : nodes) n = n * factor;
  return nodes;
}

double monomial(const Vec3& p, int a, int b, int c) {
  return std::pow(p.x, a) * std::pow(p.y, b) * std::pow(p.z, c);
}

// Curved element: reference tet with a smooth polynomial bump applied to the
// collocation nodes (degree <= p so the isoparametric map reproduces it).
std::vector<Vec3> bumped_nodes(const ReferenceElement& re, double amp) {
  auto nodes = re.colloc_nodes();
  for (auto& n : nodes) {
    n.z += amp * (1 + n.x) * (1 + n.y) * (1 + n.z);
  }
  return nodes;
}

}  // namespace

TEST_CASE("mapping: reference tet is the identity") {
  const auto re = get_reference_element(3);
  const ElementGeometry geom = compute_mapping(reference_nodes(*re), *re);
  for (int q = 0; q < re->n_cub(); ++q) {
    CHECK(geom.cub_jac[q] == doctest::Approx(1.0).epsilon(1e-12));
    for (int m = 0; m < 3; ++m)
      for (int i = 0; i < 3; ++i)
        CHECK(std::abs(geom.cub_dr[q][m * 3 + i] - (m == i ? 1.0 : 0.0)) < 1e-12);
  }
  // outward unit normals on the reference element
  const Vec3 expected[4] = {{0, 0, -1}, {0, -1, 0},
                            {1.0 / std::sqrt(3), 1.0 / std::sqrt(3), 1.0 / std::sqrt(3)},
                            {-1, 0, 0}};
  const int ng = re->n_face_quad();
  for (int f = 0; f < 4; ++f)
    for (int g = 0; g < ng; ++g) {
      const Vec3& n = geom.face_normal[f * ng + g];
      CHECK(norm(n - expected[f]) < 1e-12);
      CHECK(std::abs(norm(n) - 1.0) < 1e-12);
    }
}

TEST_CASE("mapping: axis scaling by 2 gives inverse-map determinant 1/8") {
  const auto re = get_reference_element(2);
  const ElementGeometry geom = compute_mapping(scaled_nodes(*re, 2.0), *re);
  for (int q = 0; q < re->n_cub(); ++q) {
    CHECK(geom.cub_jac[q] == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(geom.inv_map_jacobian(q) == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
  }
  // constant across the element (affine)
  for (int q = 1; q < re->n_cub(); ++q)
    CHECK(std::abs(geom.cub_jac[q] - geom.cub_jac[0]) < 1e-12);
}

TEST_CASE("mapping: inverted element raises naming the element") {
  const auto re = get_reference_element(1);
  auto nodes = reference_nodes(*re);
  std::swap(nodes[0], nodes[1]);  // flips orientation
  CHECK_THROWS_WITH_AS(compute_mapping(nodes, *re, 17),
                       doctest::Contains("element 17"), NumericsError);
}

TEST_CASE("mapping: curved element keeps positive varying jacobian") {
  const auto re = get_reference_element(3);
  const ElementGeometry geom = compute_mapping(bumped_nodes(*re, 0.08), *re);
  double lo = 1e300, hi = -1e300;
  for (double j : geom.cub_jac) {
    lo = std::min(lo, j);
    hi = std::max(hi, j);
  }
  CHECK(lo > 0.0);
  CHECK(hi > lo + 1e-6);  // genuinely non-constant
}

TEST_CASE("operators: mass matrix identities") {
  for (int p : {1, 2, 4}) {
    const auto re = get_reference_element(p);
    const auto shared = make_shared_operators(*re);

    // reference tet: M = (V V^T)^-1
    const ElementGeometry geom = compute_mapping(reference_nodes(*re), *re);
    const ElementOperators ops = build_operators(geom, *re, shared);
    const Eigen::MatrixXd vvt = re->vandermonde() * re->vandermonde().transpose();
    const Eigen::MatrixXd expected = vvt.inverse();
    for (int i = 0; i < re->n_basis(); ++i)
      for (int j = 0; j < re->n_basis(); ++j)
        CHECK(std::abs(ops.mass[j * re->n_basis() + i] - expected(i, j)) < 1e-10);

    // scaled element: M = |J| (V V^T)^-1 with the integration Jacobian
    const ElementGeometry geom2 = compute_mapping(scaled_nodes(*re, 2.0), *re);
    const ElementOperators ops2 = build_operators(geom2, *re, shared);
    for (int i = 0; i < re->n_basis(); ++i)
      for (int j = 0; j < re->n_basis(); ++j)
        CHECK(std::abs(ops2.mass[j * re->n_basis() + i] - 8.0 * expected(i, j)) < 1e-9);

    // symmetry
    for (int i = 0; i < re->n_basis(); ++i)
      for (int j = 0; j < re->n_basis(); ++j)
        CHECK(std::abs(ops.mass[j * re->n_basis() + i] - ops.mass[i * re->n_basis() + j]) <
              1e-12);
  }
}

TEST_CASE("operators: Cholesky solve reaches machine residual") {
  const auto re = get_reference_element(4);
  const auto shared = make_shared_operators(*re);
  const ElementOperators ops =
      build_operators(compute_mapping(bumped_nodes(*re, 0.05), *re), *re, shared);
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> uni(-1, 1);
  const int np = re->n_basis();
  std::vector<double> b(np), x(np);
  for (int rep = 0; rep < 5; ++rep) {
    for (auto& v : b) v = uni(gen);
    ops.mass_solve(b.data(), x.data());
    // residual ||M x - b||
    double worst = 0.0, bnorm = 0.0;
    for (int i = 0; i < np; ++i) {
      double sum = 0.0;
      for (int j = 0; j < np; ++j) sum += ops.mass[j * np + i] * x[j];
      worst = std::max(worst, std::abs(sum - b[i]));
      bnorm = std::max(bnorm, std::abs(b[i]));
    }
    CHECK(worst < 1e-12 * std::max(bnorm, 1.0));
  }
}

TEST_CASE("operators: stiffness column sums match analytic face integrals") {
  // (S_x 1)_i = integral of d l_i/dx over the reference tet
  //           = surface integral of l_i n_x (divergence theorem), which the
  //   face quadrature evaluates exactly for straight elements.
  const auto re = get_reference_element(2);
  const auto shared = make_shared_operators(*re);
  const ElementGeometry geom = compute_mapping(reference_nodes(*re), *re);
  const ElementOperators ops = build_operators(geom, *re, shared);

  const int np = re->n_basis();
  const int ng = re->n_face_quad();
  std::vector<double> ones(re->n_cub(), 1.0);

  for (int dim = 0; dim < 3; ++dim) {
    std::vector<double> colsum(np, 0.0);
    gemv_acc(ops.s[dim], ones.data(), colsum.data());
    // oracle: sum over faces of sum_g w_g sjac l_i(face node) n_dim
    for (int i = 0; i < np; ++i) {
      double oracle = 0.0;
      for (int f = 0; f < 4; ++f) {
        for (int g = 0; g < ng; ++g) {
          const int q = f * ng + g;
          oracle += re->face_weights()[g] * geom.face_sjac[q] *
                    re->interp_face()(q, i) * geom.face_normal[q][dim];
        }
      }
      CHECK(std::abs(colsum[i] - oracle) < 1e-12);
    }
  }
}

TEST_CASE("operators: face mass row action = boundary integrals of basis") {
  const auto re = get_reference_element(2);
  const auto shared = make_shared_operators(*re);
  const ElementGeometry geom = compute_mapping(reference_nodes(*re), *re);
  const ElementOperators ops = build_operators(geom, *re, shared);

  const int np = re->n_basis();
  const int nf = 4 * re->n_face_quad();
  std::vector<double> ones(nf, 1.0), result(np);
  gemv(ops.face_mass, ones.data(), result.data());

  // oracle: integral of l_i over the element boundary via a dense triangle rule
  const auto dense = test::collapsed_tri_rule(10);
  const auto& verts = ReferenceElement::vertices();
  std::vector<double> oracle(np, 0.0);
  for (int f = 0; f < 4; ++f) {
    const auto& fv = ReferenceElement::face_vertices()[f];
    const Vec3 a = verts[fv[0]], b = verts[fv[1]], c = verts[fv[2]];
    const double sjac = norm(cross(0.5 * (b - a), 0.5 * (c - a)));
    std::vector<Vec3> pts;
    for (size_t q = 0; q < dense.a.size(); ++q) {
      const double u = (dense.a[q] + 1) / 2, v = (dense.b[q] + 1) / 2;
      pts.push_back(a + u * (b - a) + v * (c - a));
    }
    const Eigen::MatrixXd lag = re->lagrange_eval(pts);
    for (int i = 0; i < np; ++i) {
      double sum = 0.0;
      for (size_t q = 0; q < dense.a.size(); ++q)
        sum += dense.weights[q] * sjac * lag(q, i);
      oracle[i] += sum;
    }
  }
  for (int i = 0; i < np; ++i) CHECK(std::abs(result[i] - oracle[i]) < 1e-11);
}

TEST_CASE("operators: interpolation consistency at cubature and face nodes") {
  for (int p : {2, 3}) {
    const auto re = get_reference_element(p);
    double worst = 0.0;
    for (int total = 0; total <= p; ++total) {
      for (int a = 0; a <= total; ++a) {
        for (int b = 0; b <= total - a; ++b) {
          const int c = total - a - b;
          Eigen::VectorXd nodal(re->n_basis());
          for (int i = 0; i < re->n_basis(); ++i)
            nodal(i) = monomial(re->colloc_nodes()[i], a, b, c);
          const Eigen::VectorXd at_cub = re->interp_cub() * nodal;
          for (int q = 0; q < re->n_cub(); ++q)
            worst = std::max(worst,
                             std::abs(at_cub(q) - monomial(re->cub_nodes()[q], a, b, c)));
          const Eigen::VectorXd at_face = re->interp_face() * nodal;
          for (size_t q = 0; q < re->face_nodes().size(); ++q)
            worst = std::max(
                worst, std::abs(at_face(q) - monomial(re->face_nodes()[q], a, b, c)));
        }
      }
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("operators: discrete integration by parts on affine elements") {
  const auto re = get_reference_element(3);
  const auto shared = make_shared_operators(*re);
  // a generic affine element
  Mesh two = make_two_tets();
  const auto nodes = CurvedMesh::straight_nodes(two, 1, *re);
  const ElementGeometry geom = compute_mapping(nodes, *re);
  const ElementOperators ops = build_operators(geom, *re, shared);

  const int np = re->n_basis();
  const int ncub = re->n_cub();
  const int ng = re->n_face_quad();
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> uni(-1, 1);

  for (int rep = 0; rep < 4; ++rep) {
    // random polynomials u, v of degree <= p as nodal vectors
    Eigen::VectorXd u(np), v(np);
    for (int i = 0; i < np; ++i) {
      u(i) = uni(gen);
      v(i) = uni(gen);
    }
    const Eigen::VectorXd u_cub = re->interp_cub() * u;
    const Eigen::VectorXd v_cub = re->interp_cub() * v;

    for (int dim = 0; dim < 3; ++dim) {
      // term1 = v^T S_dim u_cub = integral (dv/dx_dim) u
      std::vector<double> su(np, 0.0);
      gemv_acc(ops.s[dim], u_cub.data(), su.data());
      double term1 = 0.0;
      for (int i = 0; i < np; ++i) term1 += v(i) * su[i];

      // term2 = integral v (du/dx_dim) via cubature
      Eigen::VectorXd du = Eigen::VectorXd::Zero(ncub);
      const Eigen::MatrixXd* d[3] = {&re->deriv_r(), &re->deriv_s(), &re->deriv_t()};
      for (int m = 0; m < 3; ++m) {
        const Eigen::VectorXd dm = (*d[m]) * u;
        for (int q = 0; q < ncub; ++q) du(q) += geom.cub_dr[q][m * 3 + dim] * dm(q);
      }
      double term2 = 0.0;
      for (int q = 0; q < ncub; ++q)
        term2 += v_cub(q) * geom.cub_jac[q] * re->cub_weights()[q] * du(q);

      // boundary: integral u v n_dim over the 4 faces (face quadrature exact)
      const Eigen::VectorXd u_face = re->interp_face() * u;
      const Eigen::VectorXd v_face = re->interp_face() * v;
      double boundary = 0.0;
      for (int f = 0; f < 4; ++f)
        for (int g = 0; g < ng; ++g) {
          const int q = f * ng + g;
          boundary += re->face_weights()[g] * geom.face_sjac[q] *
                      geom.face_normal[q][dim] * u_face(q) * v_face(q);
        }
      CHECK(std::abs(term1 + term2 - boundary) < 1e-9);
    }
  }
}

TEST_CASE("discrete divergence check: affine exact, curved small, padded = unpadded") {
  const auto re = get_reference_element(3);
  const auto shared_p = make_shared_operators(*re, true);
  const auto shared_u = make_shared_operators(*re, false);

  const ElementGeometry affine = compute_mapping(scaled_nodes(*re, 1.7), *re);
  const ElementOperators ops_a = build_operators(affine, *re, shared_p);
  CHECK(discrete_divergence_check(affine, ops_a, *re) < 1e-12);

  const ElementGeometry curved = compute_mapping(bumped_nodes(*re, 0.05), *re);
  const ElementOperators ops_c = build_operators(curved, *re, shared_p);
  const double defect = discrete_divergence_check(curved, ops_c, *re);
  CHECK(defect < 1e-8);

  const ElementOperators ops_cu = build_operators(curved, *re, shared_u, false);
  const double defect_u = discrete_divergence_check(curved, ops_cu, *re);
  CHECK(defect == defect_u);  // identical arithmetic, layout aside
}
