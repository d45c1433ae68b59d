#pragma once

#include <span>
#include <vector>

#include "gcnsamp/csr.hpp"

namespace gcnsamp {

/// One aggregation step restricted to the nodes a mini-batch depends on.
/// Row r of `adj` corresponds to the r-th destination node (the previous
/// block's sources, or the targets for the outermost block); column c is the
/// c-th entry of `src`.
struct LayerBlock {
  CsrMatrix adj;
  std::vector<NodeId> src;
};

/// Receptive field of a set of target nodes through a stack of adjacency
/// operators. `blocks[0]` is the outermost aggregation (applied last in the
/// forward pass); `blocks.back().src` indexes the feature rows.
struct ComputeGraph {
  std::vector<NodeId> targets;
  std::vector<LayerBlock> blocks;

  std::span<const NodeId> input_nodes() const { return blocks.back().src; }
};

/// `ops` are ordered outermost first, e.g. {A3, A2, A1} for the three-layer
/// network. Entries whose scaled value is zero are dropped, which is where
/// topology sampling saves work.
ComputeGraph build_compute_graph(std::span<const ScaledCsr* const> ops, std::span<const NodeId> targets);

std::vector<NodeId> all_nodes(Index n);

}  // namespace gcnsamp
