#include "gcnsamp/compute_graph.hpp"

#include <algorithm>
#include <numeric>

namespace gcnsamp {

std::vector<NodeId> all_nodes(Index n) {
  std::vector<NodeId> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

ComputeGraph build_compute_graph(std::span<const ScaledCsr* const> ops, std::span<const NodeId> targets) {
  if (ops.empty()) throw ConfigError("compute graph needs at least one operator");
  const Index n = ops.front()->rows();
  for (const ScaledCsr* op : ops)
    if (op->rows() != n || op->cols() != n) throw ConfigError("compute graph operators must be N x N");

  ComputeGraph g;
  g.targets.assign(targets.begin(), targets.end());
  std::vector<NodeId> dst(targets.begin(), targets.end());
  std::vector<NodeId> local(static_cast<std::size_t>(n), -1);

  for (const ScaledCsr* op : ops) {
    const CsrMatrix& a = *op->base;
    LayerBlock block;
    for (NodeId v : dst) {
      if (v < 0 || v >= n) throw ConfigError("compute graph: node out of range");
      if (op->row_factor(v) == 0.0) continue;
      for (Index k = a.row_ptr[v]; k < a.row_ptr[v + 1]; ++k) {
        const NodeId j = a.col_idx[k];
        if (op->col_factor(j) != 0.0 && a.values[k] != 0.0 && local[j] < 0) {
          local[j] = 0;
          block.src.push_back(j);
        }
      }
    }
    std::sort(block.src.begin(), block.src.end());
    for (std::size_t c = 0; c < block.src.size(); ++c) local[block.src[c]] = static_cast<NodeId>(c);

    CsrMatrix& m = block.adj;
    m.rows = static_cast<Index>(dst.size());
    m.cols = static_cast<Index>(block.src.size());
    m.row_ptr.assign(dst.size() + 1, 0);
    for (std::size_t r = 0; r < dst.size(); ++r) {
      const NodeId v = dst[r];
      const double rf = op->row_factor(v);
      if (rf != 0.0) {
        for (Index k = a.row_ptr[v]; k < a.row_ptr[v + 1]; ++k) {
          const NodeId j = a.col_idx[k];
          const double val = rf * a.values[k] * op->col_factor(j);
          if (val == 0.0) continue;
          // Base columns are sorted and the local map is monotone, so rows stay sorted.
          m.col_idx.push_back(local[j]);
          m.values.push_back(val);
        }
      }
      m.row_ptr[r + 1] = m.nnz();
    }
    for (NodeId j : block.src) local[j] = -1;
    dst = block.src;
    g.blocks.push_back(std::move(block));
  }
  return g;
}

}  // namespace gcnsamp
