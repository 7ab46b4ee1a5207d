#include "cdg/jacobi.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace cdg {

namespace {

double lgamma_pos(double x) { return std::lgamma(x); }

}  // namespace

double jacobi_p(double x, double alpha, double beta, int n) {
  // Three-term recurrence on the orthonormal family.
  const double ab = alpha + beta;
  const double gamma0 = std::exp((ab + 1.0) * std::log(2.0) + lgamma_pos(alpha + 1.0) +
                                 lgamma_pos(beta + 1.0) - lgamma_pos(ab + 1.0)) /
                        (ab + 1.0);

  double p_prev = 1.0 / std::sqrt(gamma0);
  if (n == 0) return p_prev;

  const double gamma1 = (alpha + 1.0) * (beta + 1.0) / (ab + 3.0) * gamma0;
  double p_cur = ((ab + 2.0) * x / 2.0 + (alpha - beta) / 2.0) / std::sqrt(gamma1);
  if (n == 1) return p_cur;

  double a_old = 2.0 / (2.0 + ab) * std::sqrt((alpha + 1.0) * (beta + 1.0) / (ab + 3.0));
  for (int i = 1; i < n; ++i) {
    const double h1 = 2.0 * i + ab;
    const double a_new = 2.0 / (h1 + 2.0) *
                         std::sqrt((i + 1.0) * (i + 1.0 + ab) * (i + 1.0 + alpha) *
                                   (i + 1.0 + beta) / ((h1 + 1.0) * (h1 + 3.0)));
    const double b_new = -(alpha * alpha - beta * beta) / (h1 * (h1 + 2.0));
    const double p_next = (-a_old * p_prev + (x - b_new) * p_cur) / a_new;
    p_prev = p_cur;
    p_cur = p_next;
    a_old = a_new;
  }
  return p_cur;
}

double grad_jacobi_p(double x, double alpha, double beta, int n) {
  if (n == 0) return 0.0;
  return std::sqrt(n * (n + alpha + beta + 1.0)) * jacobi_p(x, alpha + 1.0, beta + 1.0, n - 1);
}

void gauss_jacobi(int n, double alpha, double beta,
                  std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be >= 1");
  nodes.resize(n);
  weights.resize(n);

  const double ab = alpha + beta;
  if (n == 1) {
    nodes[0] = -(alpha - beta) / (ab + 2.0);
    weights[0] = std::exp((ab + 1.0) * std::log(2.0) + lgamma_pos(alpha + 1.0) +
                          lgamma_pos(beta + 1.0) - lgamma_pos(ab + 2.0));
    return;
  }

  // Golub-Welsch: eigenvalues of the symmetric tridiagonal Jacobi matrix.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double h1 = 2.0 * i + ab;
    // i = 0 entry simplifies to (beta-alpha)/(ab+2); the generic form is 0/0 at ab = 0.
    J(i, i) = (i == 0) ? (beta - alpha) / (ab + 2.0)
                       : -(alpha * alpha - beta * beta) / (h1 * (h1 + 2.0));
    if (i < n - 1) {
      const double off = 2.0 / (h1 + 2.0) *
                         std::sqrt((i + 1.0) * (i + 1.0 + ab) * (i + 1.0 + alpha) *
                                   (i + 1.0 + beta) / ((h1 + 1.0) * (h1 + 3.0)));
      J(i, i + 1) = off;
      J(i + 1, i) = off;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + lgamma_pos(alpha + 1.0) +
                              lgamma_pos(beta + 1.0) - lgamma_pos(ab + 2.0));
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    weights[i] = mu0 * v0 * v0;
  }
}

std::vector<double> gauss_lobatto(int n) {
  if (n < 1) throw std::invalid_argument("gauss_lobatto: degree must be >= 1");
  std::vector<double> x(n + 1);
  x.front() = -1.0;
  x.back() = 1.0;
  if (n >= 2) {
    std::vector<double> gn, gw;
    gauss_jacobi(n - 1, 1.0, 1.0, gn, gw);
    for (int i = 0; i < n - 1; ++i) x[i + 1] = gn[i];
  }
  return x;
}

}  // namespace cdg
