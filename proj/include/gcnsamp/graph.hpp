#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "gcnsamp/csr.hpp"

namespace gcnsamp {

/// Undirected simple graph. Edges are canonical (first <= second), sorted and
/// free of duplicates; self-loops are never stored because normalization adds
/// exactly one per node.
struct RawGraph {
  Index n_nodes = 0;
  std::vector<std::pair<NodeId, NodeId>> edges;
};

// Validates indices, drops explicit self-loops, canonicalizes and dedups.
RawGraph make_graph(Index n_nodes, std::vector<std::pair<NodeId, NodeId>> edges);

// Neighbor counts excluding the self-loop.
std::vector<Index> node_degrees(const RawGraph& g);

/// A = D^{-1/2} (adj + I) D^{-1/2}.
struct NormalizedAdjacency {
  CsrMatrix matrix;
  std::vector<double> row_sums;
  std::vector<Index> degree;  // without self-loop
  Index max_degree = 0;

  Index n() const { return matrix.rows; }
  double inf_norm() const;
};

NormalizedAdjacency build_normalized_adjacency(const RawGraph& g);

/// Partition of the nodes into L degree groups ordered by ascending degree.
struct DegreeGrouping {
  std::vector<int> membership;               // node -> group
  std::vector<double> degree_scale;          // d_l, median degree of group l
  std::vector<std::vector<NodeId>> members;  // ascending node ids

  Index groups() const { return static_cast<Index>(members.size()); }
  Index size(Index l) const { return static_cast<Index>(members[l].size()); }
  Index n_nodes() const { return static_cast<Index>(membership.size()); }
};

// Optimal 1-D k-means on log(1 + degree) with L clusters.
DegreeGrouping group_by_degree(const RawGraph& g, Index L);

/// Builds a grouping from caller-supplied labels. Groups are renumbered in
/// ascending order of their median degree; `order_out`, when given, receives
/// the new index of each original label.
DegreeGrouping grouping_from_labels(const RawGraph& g, std::span<const int> labels,
                                    std::vector<int>* order_out = nullptr);

/// Random graph with two degree groups: nodes [0, n1) target degree d1 and
/// nodes [n1, n1+n2) target degree d2. Each pair (i, j) is an edge
/// independently with probability min(1, w_i w_j / sum(w)), so the expected
/// degree of node i is about w_i.
RawGraph generate_two_group_graph(Index n1, Index n2, double d1, double d2, std::uint64_t seed);

// Edge-list text: first line "N M", then M lines "i j" (0-based).
RawGraph read_edge_list(std::istream& in);
void write_edge_list(const RawGraph& g, std::ostream& out);

// CSV "node,group,degree".
void write_grouping_csv(const RawGraph& g, const DegreeGrouping& grouping, std::ostream& out);
std::vector<int> read_grouping_labels(std::istream& in, Index n_nodes);

}  // namespace gcnsamp
