#pragma once

#include "gcnsamp/csr.hpp"

// Sparse/dense building blocks of the GCN forward and backward passes.
//
// The functions in `gcnsamp::kernels` are OpenMP-parallel. The ones in
// `gcnsamp::kernels::serial` are straightforward single-threaded references
// kept for testing and benchmarking; both produce bit-identical results
// because every output element is accumulated in the same order.
namespace gcnsamp::kernels {

// out = a * b
void spmm(const CsrMatrix& a, const Matrix& b, Matrix& out);
// out = a^T * b
void spmm_transposed(const CsrMatrix& a, const Matrix& b, Matrix& out);
// out = max(x, 0)
void relu(const Matrix& x, Matrix& out);
// grad *= (pre > 0), the ReLU subgradient with value 0 at 0.
void relu_backward(const Matrix& pre, Matrix& grad);

namespace serial {
void spmm(const CsrMatrix& a, const Matrix& b, Matrix& out);
void spmm_transposed(const CsrMatrix& a, const Matrix& b, Matrix& out);
void relu(const Matrix& x, Matrix& out);
void relu_backward(const Matrix& pre, Matrix& grad);
}  // namespace serial

}  // namespace gcnsamp::kernels
