#pragma once

#include <vector>

namespace cdg {

/// Orthonormal Jacobi polynomial P_n^(alpha,beta)(x), normalized to unit
/// L2 norm on [-1,1] with weight (1-x)^alpha (1+x)^beta.
double jacobi_p(double x, double alpha, double beta, int n);

/// Derivative of the orthonormal Jacobi polynomial.
double grad_jacobi_p(double x, double alpha, double beta, int n);

/// Gauss-Jacobi quadrature: n-point rule, exact for polynomials of degree
/// 2n-1 against the weight (1-x)^alpha (1+x)^beta on [-1,1].
void gauss_jacobi(int n, double alpha, double beta,
                  std::vector<double>& nodes, std::vector<double>& weights);

/// Gauss-Lobatto-Legendre nodes on [-1,1] (endpoints included), n+1 points
/// for polynomial degree n.
std::vector<double> gauss_lobatto(int n);

}  // namespace cdg
