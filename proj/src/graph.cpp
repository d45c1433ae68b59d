#include "gcnsamp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace gcnsamp {

RawGraph make_graph(Index n_nodes, std::vector<std::pair<NodeId, NodeId>> edges) {
  if (n_nodes < 0) throw ConfigError("negative node count");
  RawGraph g;
  g.n_nodes = n_nodes;
  g.edges.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n_nodes || b >= n_nodes)
      throw ConfigError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                        ") out of range for " + std::to_string(n_nodes) + " nodes");
    if (a == b) continue;
    g.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

std::vector<Index> node_degrees(const RawGraph& g) {
  std::vector<Index> deg(static_cast<std::size_t>(g.n_nodes), 0);
  for (auto [a, b] : g.edges) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

double NormalizedAdjacency::inf_norm() const {
  return row_sums.empty() ? 0.0 : *std::max_element(row_sums.begin(), row_sums.end());
}

NormalizedAdjacency build_normalized_adjacency(const RawGraph& g) {
  if (g.n_nodes == 0) throw ConfigError("empty graph");
  NormalizedAdjacency out;
  out.degree = node_degrees(g);
  out.max_degree = *std::max_element(out.degree.begin(), out.degree.end());

  std::vector<double> inv_sqrt(static_cast<std::size_t>(g.n_nodes));
  for (Index i = 0; i < g.n_nodes; ++i)
    inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(out.degree[i] + 1));

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(g.n_nodes) + 2 * g.edges.size());
  for (Index i = 0; i < g.n_nodes; ++i)
    t.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i), inv_sqrt[i] * inv_sqrt[i]});
  for (auto [a, b] : g.edges) {
    const double v = inv_sqrt[a] * inv_sqrt[b];
    t.push_back({a, b, v});
    t.push_back({b, a, v});
  }
  out.matrix = CsrMatrix::from_triplets(g.n_nodes, g.n_nodes, std::move(t));

  out.row_sums.resize(static_cast<std::size_t>(g.n_nodes));
  for (Index i = 0; i < g.n_nodes; ++i) {
    double s = 0.0;
    for (Index k = out.matrix.row_ptr[i]; k < out.matrix.row_ptr[i + 1]; ++k)
      s += std::abs(out.matrix.values[k]);
    out.row_sums[i] = s;
  }
  return out;
}

namespace {

double median_degree(const std::vector<NodeId>& nodes, const std::vector<Index>& deg) {
  std::vector<Index> d;
  d.reserve(nodes.size());
  for (NodeId v : nodes) d.push_back(deg[v]);
  std::sort(d.begin(), d.end());
  const std::size_t n = d.size();
  if (n % 2 == 1) return static_cast<double>(d[n / 2]);
  return 0.5 * static_cast<double>(d[n / 2 - 1] + d[n / 2]);
}

DegreeGrouping assemble(const std::vector<int>& membership, Index L, const std::vector<Index>& deg) {
  DegreeGrouping g;
  g.membership = membership;
  g.members.assign(static_cast<std::size_t>(L), {});
  for (std::size_t v = 0; v < membership.size(); ++v)
    g.members[membership[v]].push_back(static_cast<NodeId>(v));
  for (Index l = 0; l < L; ++l) {
    if (g.members[l].empty()) throw ConfigError("degree group " + std::to_string(l) + " is empty");
    g.degree_scale.push_back(median_degree(g.members[l], deg));
  }
  return g;
}

}  // namespace

DegreeGrouping group_by_degree(const RawGraph& g, Index L) {
  if (L < 1) throw ConfigError("number of degree groups must be >= 1");
  const auto deg = node_degrees(g);
  std::vector<Index> distinct(deg.begin(), deg.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const Index D = static_cast<Index>(distinct.size());
  if (L > D)
    throw ConfigError("requested " + std::to_string(L) + " degree groups but the graph has only " +
                      std::to_string(D) + " distinct degrees");

  std::vector<double> count(static_cast<std::size_t>(D), 0.0);
  for (Index d : deg)
    ++count[std::lower_bound(distinct.begin(), distinct.end(), d) - distinct.begin()];

  // Prefix sums over the sorted distinct values for O(1) weighted SSE.
  std::vector<double> cw(D + 1, 0.0), cx(D + 1, 0.0), cxx(D + 1, 0.0);
  for (Index i = 0; i < D; ++i) {
    const double x = std::log1p(static_cast<double>(distinct[i]));
    cw[i + 1] = cw[i] + count[i];
    cx[i + 1] = cx[i] + count[i] * x;
    cxx[i + 1] = cxx[i] + count[i] * x * x;
  }
  auto sse = [&](Index a, Index b) {  // values a..b inclusive
    const double w = cw[b + 1] - cw[a];
    const double s = cx[b + 1] - cx[a];
    return std::max(0.0, (cxx[b + 1] - cxx[a]) - s * s / w);
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> cost(L, std::vector<double>(D, inf));
  std::vector<std::vector<Index>> cut(L, std::vector<Index>(D, 0));
  for (Index b = 0; b < D; ++b) cost[0][b] = sse(0, b);
  for (Index k = 1; k < L; ++k) {
    for (Index b = k; b < D; ++b) {
      for (Index a = k; a <= b; ++a) {
        const double c = cost[k - 1][a - 1] + sse(a, b);
        if (c < cost[k][b]) {
          cost[k][b] = c;
          cut[k][b] = a;
        }
      }
    }
  }

  std::vector<int> value_group(static_cast<std::size_t>(D));
  Index b = D - 1;
  for (Index k = L - 1; k >= 0; --k) {
    const Index a = k == 0 ? 0 : cut[k][b];
    for (Index i = a; i <= b; ++i) value_group[i] = static_cast<int>(k);
    b = a - 1;
  }

  std::vector<int> membership(deg.size());
  for (std::size_t v = 0; v < deg.size(); ++v)
    membership[v] = value_group[std::lower_bound(distinct.begin(), distinct.end(), deg[v]) -
                                distinct.begin()];
  return assemble(membership, L, deg);
}

DegreeGrouping grouping_from_labels(const RawGraph& g, std::span<const int> labels,
                                    std::vector<int>* order_out) {
  if (static_cast<Index>(labels.size()) != g.n_nodes)
    throw ConfigError("grouping labels do not cover every node");
  if (labels.empty()) throw ConfigError("empty graph");
  const int L = *std::max_element(labels.begin(), labels.end()) + 1;
  if (*std::min_element(labels.begin(), labels.end()) < 0) throw ConfigError("negative group label");

  const auto deg = node_degrees(g);
  std::vector<std::vector<NodeId>> by_label(static_cast<std::size_t>(L));
  for (std::size_t v = 0; v < labels.size(); ++v) by_label[labels[v]].push_back(static_cast<NodeId>(v));
  std::vector<double> med(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    if (by_label[l].empty()) throw ConfigError("group label " + std::to_string(l) + " has no nodes");
    med[l] = median_degree(by_label[l], deg);
  }
  std::vector<int> order(static_cast<std::size_t>(L));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return med[a] < med[b]; });
  std::vector<int> rank(static_cast<std::size_t>(L));
  for (int r = 0; r < L; ++r) rank[order[r]] = r;
  for (int r = 1; r < L; ++r)
    if (!(med[order[r]] > med[order[r - 1]]))
      throw ConfigError("degree groups must have distinct median degrees");

  std::vector<int> membership(labels.size());
  for (std::size_t v = 0; v < labels.size(); ++v) membership[v] = rank[labels[v]];
  if (order_out) *order_out = rank;
  return assemble(membership, L, deg);
}

RawGraph generate_two_group_graph(Index n1, Index n2, double d1, double d2, std::uint64_t seed) {
  if (n1 < 1 || n2 < 1) throw ConfigError("both groups need at least one node");
  const Index n = n1 + n2;
  if (d1 < 0 || d2 < 0) throw ConfigError("negative target degree");
  if (d1 >= static_cast<double>(n) || d2 >= static_cast<double>(n))
    throw ConfigError("target degree must be smaller than the node count");

  const double total = static_cast<double>(n1) * d1 + static_cast<double>(n2) * d2;
  std::vector<std::pair<NodeId, NodeId>> edges;
  if (total > 0.0) {
    auto weight = [&](Index i) { return i < n1 ? d1 : d2; };
    Rng rng = make_rng(seed, 0x67726170);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const double p = std::min(1.0, weight(i) * weight(j) / total);
        if (p > 0.0 && unif(rng) < p) edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
      }
    }
  }
  return make_graph(n, std::move(edges));
}

RawGraph read_edge_list(std::istream& in) {
  Index n = 0, m = 0;
  if (!(in >> n >> m) || n < 0 || m < 0) throw ConfigError("edge list: bad header, expected \"N M\"");
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (Index k = 0; k < m; ++k) {
    long long a = 0, b = 0;
    if (!(in >> a >> b)) throw ConfigError("edge list: expected " + std::to_string(m) + " edges, got " + std::to_string(k));
    edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
  }
  return make_graph(n, std::move(edges));
}

void write_edge_list(const RawGraph& g, std::ostream& out) {
  out << g.n_nodes << ' ' << g.edges.size() << '\n';
  for (auto [a, b] : g.edges) out << a << ' ' << b << '\n';
}

void write_grouping_csv(const RawGraph& g, const DegreeGrouping& grouping, std::ostream& out) {
  const auto deg = node_degrees(g);
  out << "node,group,degree\n";
  for (Index v = 0; v < g.n_nodes; ++v) out << v << ',' << grouping.membership[v] << ',' << deg[v] << '\n';
}

std::vector<int> read_grouping_labels(std::istream& in, Index n_nodes) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("node,group", 0) != 0)
    throw ConfigError("grouping csv: expected header \"node,group,degree\"");
  std::vector<int> labels(static_cast<std::size_t>(n_nodes), -1);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    long long node = -1, group = -1;
    char comma = 0;
    if (!(row >> node >> comma >> group) || comma != ',' || node < 0 || node >= n_nodes || group < 0)
      throw ConfigError("grouping csv: malformed row \"" + line + "\"");
    labels[node] = static_cast<int>(group);
  }
  if (std::find(labels.begin(), labels.end(), -1) != labels.end())
    throw ConfigError("grouping csv: not every node has a group");
  return labels;
}

}  // namespace gcnsamp
