#pragma once

#include <Eigen/Dense>
#include <cassert>
#include <cstddef>
#include <vector>

namespace cdg {

/// Rounds a block length up to the next multiple of 16 so block starts stay
/// aligned for coalesced/vectorized access.
inline int pad16(int n) { return 16 * ((n + 15) / 16); }

/// Dense matrix in column-major storage, each column padded to a multiple of
/// 16 entries; the layout the element kernels stream through.
struct PaddedMatrix {
  int rows = 0, cols = 0, stride = 0;
  std::vector<double> data;

  PaddedMatrix() = default;
  PaddedMatrix(int r, int c, bool padded = true)
      : rows(r), cols(c), stride(padded ? pad16(r) : r),
        data(static_cast<size_t>(stride) * c, 0.0) {}

  double& operator()(int i, int j) { return data[static_cast<size_t>(j) * stride + i]; }
  double operator()(int i, int j) const {
    return data[static_cast<size_t>(j) * stride + i];
  }
  const double* col(int j) const { return data.data() + static_cast<size_t>(j) * stride; }

  static PaddedMatrix from(const Eigen::MatrixXd& m, bool padded = true) {
    PaddedMatrix out(static_cast<int>(m.rows()), static_cast<int>(m.cols()), padded);
    for (int j = 0; j < out.cols; ++j)
      for (int i = 0; i < out.rows; ++i) out(i, j) = m(i, j);
    return out;
  }
};

/// y += A x, streaming columns: the row loop over a contiguous padded column
/// is the vectorizable inner dimension; four columns per pass keep the
/// accumulator traffic down.
inline void gemv_acc(const PaddedMatrix& a, const double* x, double* y) {
  int j = 0;
  for (; j + 4 <= a.cols; j += 4) {
    const double* c0 = a.col(j);
    const double* c1 = a.col(j + 1);
    const double* c2 = a.col(j + 2);
    const double* c3 = a.col(j + 3);
    const double x0 = x[j], x1 = x[j + 1], x2 = x[j + 2], x3 = x[j + 3];
    for (int i = 0; i < a.rows; ++i)
      y[i] += c0[i] * x0 + c1[i] * x1 + c2[i] * x2 + c3[i] * x3;
  }
  for (; j < a.cols; ++j) {
    const double* colj = a.col(j);
    const double xj = x[j];
    for (int i = 0; i < a.rows; ++i) y[i] += colj[i] * xj;
  }
}

/// y -= A x.
inline void gemv_sub(const PaddedMatrix& a, const double* x, double* y) {
  int j = 0;
  for (; j + 4 <= a.cols; j += 4) {
    const double* c0 = a.col(j);
    const double* c1 = a.col(j + 1);
    const double* c2 = a.col(j + 2);
    const double* c3 = a.col(j + 3);
    const double x0 = x[j], x1 = x[j + 1], x2 = x[j + 2], x3 = x[j + 3];
    for (int i = 0; i < a.rows; ++i)
      y[i] -= c0[i] * x0 + c1[i] * x1 + c2[i] * x2 + c3[i] * x3;
  }
  for (; j < a.cols; ++j) {
    const double* colj = a.col(j);
    const double xj = x[j];
    for (int i = 0; i < a.rows; ++i) y[i] -= colj[i] * xj;
  }
}

/// y = A x.
inline void gemv(const PaddedMatrix& a, const double* x, double* y) {
  for (int i = 0; i < a.rows; ++i) y[i] = 0.0;
  gemv_acc(a, x, y);
}

}  // namespace cdg
