#pragma once

#include <span>
#include <vector>

#include "gcnsamp/common.hpp"

namespace gcnsamp {

struct Triplet {
  NodeId row;
  NodeId col;
  double value;
};

// Compressed sparse row matrix. Column indices are sorted within each row.
struct CsrMatrix {
  Index rows = 0;
  Index cols = 0;
  std::vector<Index> row_ptr{0};
  std::vector<NodeId> col_idx;
  std::vector<double> values;

  Index nnz() const { return static_cast<Index>(values.size()); }
  double at(Index i, Index j) const;
  Matrix to_dense() const;

  // Duplicate coordinates are summed.
  static CsrMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> entries);
  static CsrMatrix identity(Index n);
  static CsrMatrix from_dense(const Matrix& dense);
};

CsrMatrix transpose(const CsrMatrix& a);

// Maximum absolute row sum.
double infinity_norm(const CsrMatrix& a);

/// A sparse matrix expressed as diag(row_scale) * base * diag(col_scale).
///
/// Every sampled or effective adjacency in this library is a diagonal
/// rescaling of the normalized adjacency, so this view avoids materializing
/// an N x N copy per SGD step. An empty scale vector means all ones. `base`
/// is non-owning and must outlive the view.
struct ScaledCsr {
  const CsrMatrix* base = nullptr;
  std::vector<double> row_scale;
  std::vector<double> col_scale;

  Index rows() const { return base->rows; }
  Index cols() const { return base->cols; }
  double row_factor(Index i) const { return row_scale.empty() ? 1.0 : row_scale[i]; }
  double col_factor(Index j) const { return col_scale.empty() ? 1.0 : col_scale[j]; }

  // Zero entries produced by zero scales are dropped.
  CsrMatrix materialize() const;
  double infinity_norm() const;
};

ScaledCsr unscaled(const CsrMatrix& base);

// ||x - y||_inf for two rescalings of the same base matrix.
double scaled_difference_inf_norm(const ScaledCsr& x, const ScaledCsr& y);

// max_ij |a_ij - b_ij| over the union of both patterns.
double max_abs_difference(const CsrMatrix& a, const CsrMatrix& b);

}  // namespace gcnsamp
