#include "gcnsamp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "gcnsamp/csv.hpp"
#include "gcnsamp/kernels.hpp"

namespace gcnsamp {

namespace {

Matrix gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
  return m;
}

Matrix unit_columns(Index rows, Index cols, Rng& rng) {
  Matrix m = gaussian(rows, cols, rng);
  for (Index j = 0; j < cols; ++j) m.col(j).normalize();
  return m;
}

void check_unit_columns(const Matrix& m, const char* name) {
  for (Index j = 0; j < m.cols(); ++j)
    if (std::abs(m.col(j).norm() - 1.0) > 1e-9)
      throw ConfigError(std::string("concept target: columns of ") + name + " must have unit norm");
}

}  // namespace

Matrix gen_features(Index n, Index d, std::uint64_t seed, bool normalize) {
  if (n < 1 || d < 1) throw ConfigError("feature dimensions must be positive");
  Rng rng = make_rng(seed, 0x66656174ULL);
  Matrix x = gaussian(n, d, rng);
  if (normalize)
    for (Index i = 0; i < n; ++i) {
      const double nrm = x.row(i).norm();
      if (nrm > 0.0) x.row(i) /= nrm;
    }
  return x;
}

CsrMatrix gen_ahat(const NormalizedAdjacency& a, const DegreeGrouping& grouping, std::span<const double> phat) {
  return effective_adjacency(a, grouping, phat, false).matrix;
}

LabelTarget gen_label_target(Index d, Index p, Index k, std::uint64_t seed) {
  if (d < 1 || p < 1 || k < 1) throw ConfigError("target dimensions must be positive");
  Rng rng = make_rng(seed, 0x6c61626cULL);
  LabelTarget t;
  t.w_star = gaussian(d, p, rng);
  t.c_star = gaussian(p, k, rng);
  return t;
}

Matrix gen_labels(const CsrMatrix& ahat, const Matrix& X, const LabelTarget& target) {
  if (ahat.rows != ahat.cols || ahat.cols != X.rows()) throw ConfigError("labels: Ahat and X disagree");
  if (X.cols() != target.w_star.rows() || target.w_star.cols() != target.c_star.rows())
    throw ConfigError("labels: target shapes disagree");
  Matrix ax;
  kernels::spmm(ahat, X, ax);
  const Matrix z = ax * target.w_star;
  const Matrix h = z.unaryExpr([](double v) { return std::sin(v) * std::tanh(v); });
  return h * target.c_star;
}

Matrix apply_activation(const std::string& name, const Matrix& x) {
  if (name == "identity") return x;
  if (name == "sin") return x.unaryExpr([](double v) { return std::sin(v); });
  if (name == "cos") return x.unaryExpr([](double v) { return std::cos(v); });
  if (name == "exp") return x.unaryExpr([](double v) { return std::exp(v); });
  if (name == "tanh") return x.unaryExpr([](double v) { return std::tanh(v); });
  throw ConfigError("unknown activation: " + name);
}

ConceptTarget gen_concept_target(Index d, Index p1, Index p2, Index k, std::uint64_t seed) {
  if (d < 1 || p1 < 1 || p2 < 1 || k < 1) throw ConfigError("target dimensions must be positive");
  Rng rng = make_rng(seed, 0x636f6e63ULL);
  ConceptTarget t;
  t.w1 = unit_columns(d, p1, rng);
  t.w2 = unit_columns(d, p1, rng);
  t.v1 = unit_columns(p1, p2, rng);
  t.v2 = unit_columns(p1, p2, rng);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  t.c.resize(p2, k);
  for (Index i = 0; i < t.c.size(); ++i) t.c.data()[i] = u(rng);
  return t;
}

void check_concept_target(const ConceptTarget& t) {
  if (t.w1.rows() != t.w2.rows() || t.w1.cols() != t.w2.cols() || t.v1.rows() != t.w1.cols() ||
      t.v2.rows() != t.w2.cols() || t.v1.cols() != t.v2.cols() || t.c.rows() != t.v1.cols())
    throw ConfigError("concept target: shapes disagree");
  check_unit_columns(t.w1, "W1*");
  check_unit_columns(t.w2, "W2*");
  check_unit_columns(t.v1, "V1*");
  check_unit_columns(t.v2, "V2*");
  if (t.c.size() > 0 && t.c.cwiseAbs().maxCoeff() > 1.0) throw ConfigError("concept target: |C*| must be <= 1");
  const Matrix probe = Matrix::Zero(1, 1);
  apply_activation(t.phi1, probe);
  apply_activation(t.phi2, probe);
  apply_activation(t.outer, probe);
}

Matrix eval_concept_target(const CsrMatrix& astar, const Matrix& X, const ConceptTarget& t) {
  check_concept_target(t);
  if (astar.rows != astar.cols || astar.cols != X.rows() || X.cols() != t.w1.rows())
    throw ConfigError("concept target: A*, X and W* disagree");
  Matrix ax;
  kernels::spmm(astar, X, ax);
  auto branch = [&](const Matrix& w, const Matrix& v, const std::string& phi) {
    Matrix agg;
    kernels::spmm(astar, apply_activation(phi, ax * w), agg);
    return Matrix(agg * v);
  };
  const Matrix r1 = branch(t.w1, t.v1, t.phi1);
  const Matrix r2 = branch(t.w2, t.v2, t.phi2);
  const Matrix inner = apply_activation(t.outer, r1).cwiseProduct(r2);
  Matrix agg;
  kernels::spmm(astar, inner, agg);
  return agg * t.c;
}

Split split_nodes(Index n, Index n_train, Index n_test, std::uint64_t seed) {
  if (n_train < 0 || n_test < 0 || n_train + n_test > n) throw ConfigError("split sizes exceed the node count");
  std::vector<NodeId> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = static_cast<NodeId>(i);
  Rng rng = make_rng(seed, 0x73706c74ULL);
  const std::size_t take = static_cast<std::size_t>(n_train + n_test);
  for (std::size_t i = 0; i < take; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, perm.size() - 1);
    std::swap(perm[i], perm[pick(rng)]);
  }
  Split s;
  s.omega.assign(perm.begin(), perm.begin() + n_train);
  s.test.assign(perm.begin() + n_train, perm.begin() + static_cast<std::ptrdiff_t>(take));
  std::sort(s.omega.begin(), s.omega.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

void write_split_csv(const Split& s, std::ostream& out) {
  std::vector<std::pair<NodeId, const char*>> rows;
  for (NodeId v : s.omega) rows.emplace_back(v, "train");
  for (NodeId v : s.test) rows.emplace_back(v, "test");
  std::sort(rows.begin(), rows.end());
  out << "node,role\n";
  for (const auto& [v, role] : rows) out << v << ',' << role << '\n';
}

Split read_split_csv(std::istream& in, Index n_nodes) {
  const CsvTable t = read_csv(in);
  const std::size_t cn = t.column("node"), cr = t.column("role");
  Split s;
  std::vector<char> seen(static_cast<std::size_t>(n_nodes), 0);
  for (const auto& r : t.rows) {
    const double v = parse_double(r[cn]);
    if (v != std::floor(v) || v < 0 || v >= double(n_nodes)) throw ConfigError("split: node out of range");
    const auto node = static_cast<NodeId>(v);
    if (seen[static_cast<std::size_t>(node)]++) throw ConfigError("split: node listed twice");
    if (r[cr] == "train")
      s.omega.push_back(node);
    else if (r[cr] == "test")
      s.test.push_back(node);
    else
      throw ConfigError("split: unknown role '" + r[cr] + "'");
  }
  std::sort(s.omega.begin(), s.omega.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

}  // namespace gcnsamp
