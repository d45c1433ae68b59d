#pragma once

#include <cmath>
#include <vector>

#include "gcnsamp/graph.hpp"

namespace gcnsamp::testing {

inline RawGraph triangle() { return make_graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

inline RawGraph star(Index leaves) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (Index i = 1; i <= leaves; ++i) e.emplace_back(0, static_cast<NodeId>(i));
  return make_graph(leaves + 1, e);
}

inline RawGraph cycle(Index n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (Index i = 0; i < n; ++i) e.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n));
  return make_graph(n, e);
}

// Erdos-Renyi graph with edge probability p.
inline RawGraph random_graph(Index n, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<NodeId, NodeId>> e;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (coin(rng)) e.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
  return make_graph(n, e);
}

// Dense D^-1/2 (adj + I) D^-1/2 straight from the edge list.
inline Matrix dense_normalized(const RawGraph& g) {
  Matrix m = Matrix::Identity(g.n_nodes, g.n_nodes);
  for (const auto& [i, j] : g.edges) {
    m(i, j) = 1.0;
    m(j, i) = 1.0;
  }
  const Vector deg = m.rowwise().sum();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) /= std::sqrt(deg(i) * deg(j));
  return m;
}

inline double dense_inf_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

inline Matrix random_matrix(Index r, Index c, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  Matrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
  return m;
}

// Grouping with explicit (d_l, N_l) for checks that only read those fields.
inline DegreeGrouping synthetic_grouping(const std::vector<double>& d, const std::vector<Index>& n) {
  DegreeGrouping g;
  NodeId next = 0;
  for (std::size_t l = 0; l < d.size(); ++l) {
    g.degree_scale.push_back(d[l]);
    g.members.emplace_back();
    for (Index i = 0; i < n[l]; ++i) {
      g.members.back().push_back(next++);
      g.membership.push_back(static_cast<int>(l));
    }
  }
  return g;
}

}  // namespace gcnsamp::testing
