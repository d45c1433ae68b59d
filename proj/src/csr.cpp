#include "gcnsamp/csr.hpp"

#include <algorithm>
#include <cmath>

namespace gcnsamp {

double CsrMatrix::at(Index i, Index j) const {
  const auto first = col_idx.begin() + row_ptr[i];
  const auto last = col_idx.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(first, last, static_cast<NodeId>(j));
  if (it == last || *it != j) return 0.0;
  return values[static_cast<std::size_t>(it - col_idx.begin())];
}

Matrix CsrMatrix::to_dense() const {
  Matrix out = Matrix::Zero(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index k = row_ptr[i]; k < row_ptr[i + 1]; ++k) out(i, col_idx[k]) += values[k];
  return out;
}

CsrMatrix CsrMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw ConfigError("triplet index out of range");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (k > 0 && entries[k].row == entries[k - 1].row && entries[k].col == entries[k - 1].col) {
      m.values.back() += entries[k].value;
      continue;
    }
    m.col_idx.push_back(entries[k].col);
    m.values.push_back(entries[k].value);
    ++m.row_ptr[entries[k].row + 1];
  }
  for (Index i = 0; i < rows; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  return m;
}

CsrMatrix CsrMatrix::identity(Index n) {
  CsrMatrix m;
  m.rows = m.cols = n;
  m.row_ptr.resize(static_cast<std::size_t>(n) + 1);
  m.col_idx.resize(static_cast<std::size_t>(n));
  m.values.assign(static_cast<std::size_t>(n), 1.0);
  for (Index i = 0; i <= n; ++i) m.row_ptr[i] = i;
  for (Index i = 0; i < n; ++i) m.col_idx[i] = static_cast<NodeId>(i);
  return m;
}

CsrMatrix CsrMatrix::from_dense(const Matrix& dense) {
  std::vector<Triplet> t;
  for (Index i = 0; i < dense.rows(); ++i)
    for (Index j = 0; j < dense.cols(); ++j)
      if (dense(i, j) != 0.0)
        t.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), dense(i, j)});
  return from_triplets(dense.rows(), dense.cols(), std::move(t));
}

CsrMatrix transpose(const CsrMatrix& a) {
  CsrMatrix t;
  t.rows = a.cols;
  t.cols = a.rows;
  t.row_ptr.assign(static_cast<std::size_t>(a.cols) + 1, 0);
  t.col_idx.resize(a.col_idx.size());
  t.values.resize(a.values.size());
  for (NodeId c : a.col_idx) ++t.row_ptr[c + 1];
  for (Index i = 0; i < a.cols; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
  std::vector<Index> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  // Rows visited in order, so columns of the transpose come out sorted.
  for (Index i = 0; i < a.rows; ++i) {
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const Index dst = next[a.col_idx[k]]++;
      t.col_idx[dst] = static_cast<NodeId>(i);
      t.values[dst] = a.values[k];
    }
  }
  return t;
}

double infinity_norm(const CsrMatrix& a) {
  double best = 0.0;
  for (Index i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += std::abs(a.values[k]);
    best = std::max(best, s);
  }
  return best;
}

CsrMatrix ScaledCsr::materialize() const {
  CsrMatrix m;
  m.rows = base->rows;
  m.cols = base->cols;
  m.row_ptr.assign(static_cast<std::size_t>(m.rows) + 1, 0);
  m.col_idx.reserve(base->col_idx.size());
  m.values.reserve(base->values.size());
  for (Index i = 0; i < m.rows; ++i) {
    const double r = row_factor(i);
    for (Index k = base->row_ptr[i]; k < base->row_ptr[i + 1]; ++k) {
      const double v = r * base->values[k] * col_factor(base->col_idx[k]);
      if (v == 0.0) continue;
      m.col_idx.push_back(base->col_idx[k]);
      m.values.push_back(v);
    }
    m.row_ptr[i + 1] = static_cast<Index>(m.values.size());
  }
  return m;
}

double ScaledCsr::infinity_norm() const {
  double best = 0.0;
  for (Index i = 0; i < base->rows; ++i) {
    double s = 0.0;
    for (Index k = base->row_ptr[i]; k < base->row_ptr[i + 1]; ++k)
      s += std::abs(base->values[k] * col_factor(base->col_idx[k]));
    best = std::max(best, std::abs(row_factor(i)) * s);
  }
  return best;
}

ScaledCsr unscaled(const CsrMatrix& base) { return ScaledCsr{&base, {}, {}}; }

double scaled_difference_inf_norm(const ScaledCsr& x, const ScaledCsr& y) {
  if (x.base != y.base) throw ConfigError("scaled matrices do not share a base");
  const CsrMatrix& a = *x.base;
  double best = 0.0;
  for (Index i = 0; i < a.rows; ++i) {
    const double rx = x.row_factor(i);
    const double ry = y.row_factor(i);
    double s = 0.0;
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const NodeId j = a.col_idx[k];
      s += std::abs(a.values[k] * (rx * x.col_factor(j) - ry * y.col_factor(j)));
    }
    best = std::max(best, s);
  }
  return best;
}

double max_abs_difference(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw ConfigError("shape mismatch");
  double best = 0.0;
  for (Index i = 0; i < a.rows; ++i) {
    Index ka = a.row_ptr[i], kb = b.row_ptr[i];
    const Index ea = a.row_ptr[i + 1], eb = b.row_ptr[i + 1];
    while (ka < ea || kb < eb) {
      if (kb >= eb || (ka < ea && a.col_idx[ka] < b.col_idx[kb])) {
        best = std::max(best, std::abs(a.values[ka++]));
      } else if (ka >= ea || b.col_idx[kb] < a.col_idx[ka]) {
        best = std::max(best, std::abs(b.values[kb++]));
      } else {
        best = std::max(best, std::abs(a.values[ka++] - b.values[kb++]));
      }
    }
  }
  return best;
}

}  // namespace gcnsamp
