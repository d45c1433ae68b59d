#include "gcnsamp/kernels.hpp"

#include <algorithm>

#include <omp.h>

namespace gcnsamp::kernels {

namespace {

void check_spmm(const CsrMatrix& a, const Matrix& b) {
  if (a.cols != b.rows()) throw ConfigError("spmm: inner dimension mismatch");
}

void check_spmm_t(const CsrMatrix& a, const Matrix& b) {
  if (a.rows != b.rows()) throw ConfigError("spmm_transposed: inner dimension mismatch");
}

// Small products are not worth waking the thread team.
constexpr Index kParallelWork = 1 << 14;

}  // namespace

void spmm(const CsrMatrix& a, const Matrix& b, Matrix& out) {
  check_spmm(a, b);
  const Index width = b.cols();
  out.setZero(a.rows, width);
  const bool parallel = a.nnz() * width >= kParallelWork;
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
  for (Index i = 0; i < a.rows; ++i) {
    double* dst = out.row(i).data();
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const double v = a.values[k];
      const double* src = b.row(a.col_idx[k]).data();
#pragma omp simd
      for (Index c = 0; c < width; ++c) dst[c] += v * src[c];
    }
  }
}

void spmm_transposed(const CsrMatrix& a, const Matrix& b, Matrix& out) {
  check_spmm_t(a, b);
  const Index width = b.cols();
  out.setZero(a.cols, width);
  // Scatter is race-free when each thread owns a disjoint band of columns;
  // the per-element accumulation order matches the serial loop.
  const bool parallel = a.nnz() * width >= kParallelWork && width >= 16;
  const int teams = parallel ? omp_get_max_threads() : 1;
  const Index band = (width + teams - 1) / teams;
#pragma omp parallel for schedule(static) if (parallel)
  for (int t = 0; t < teams; ++t) {
    const Index c0 = std::min(width, t * band);
    const Index c1 = std::min(width, c0 + band);
    for (Index i = 0; i < a.rows; ++i) {
      const double* src = b.row(i).data();
      for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
        const double v = a.values[k];
        double* dst = out.row(a.col_idx[k]).data();
#pragma omp simd
        for (Index c = c0; c < c1; ++c) dst[c] += v * src[c];
      }
    }
  }
}

void relu(const Matrix& x, Matrix& out) {
  out.resize(x.rows(), x.cols());
  const Index n = x.size();
  const double* src = x.data();
  double* dst = out.data();
#pragma omp parallel for simd if (n >= kParallelWork)
  for (Index i = 0; i < n; ++i) dst[i] = src[i] > 0.0 ? src[i] : 0.0;
}

void relu_backward(const Matrix& pre, Matrix& grad) {
  if (pre.rows() != grad.rows() || pre.cols() != grad.cols())
    throw ConfigError("relu_backward: shape mismatch");
  const Index n = pre.size();
  const double* p = pre.data();
  double* g = grad.data();
#pragma omp parallel for simd if (n >= kParallelWork)
  for (Index i = 0; i < n; ++i) g[i] = p[i] > 0.0 ? g[i] : 0.0;
}

namespace serial {

void spmm(const CsrMatrix& a, const Matrix& b, Matrix& out) {
  check_spmm(a, b);
  out.setZero(a.rows, b.cols());
  for (Index i = 0; i < a.rows; ++i)
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      for (Index c = 0; c < b.cols(); ++c) out(i, c) += a.values[k] * b(a.col_idx[k], c);
}

void spmm_transposed(const CsrMatrix& a, const Matrix& b, Matrix& out) {
  check_spmm_t(a, b);
  out.setZero(a.cols, b.cols());
  for (Index i = 0; i < a.rows; ++i)
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      for (Index c = 0; c < b.cols(); ++c) out(a.col_idx[k], c) += a.values[k] * b(i, c);
}

void relu(const Matrix& x, Matrix& out) {
  out.resize(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) > 0.0 ? x(i, j) : 0.0;
}

void relu_backward(const Matrix& pre, Matrix& grad) {
  if (pre.rows() != grad.rows() || pre.cols() != grad.cols())
    throw ConfigError("relu_backward: shape mismatch");
  for (Index i = 0; i < pre.rows(); ++i)
    for (Index j = 0; j < pre.cols(); ++j)
      if (!(pre(i, j) > 0.0)) grad(i, j) = 0.0;
}

}  // namespace serial

}  // namespace gcnsamp::kernels
