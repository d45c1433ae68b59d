#include "gcnsamp/model.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "gcnsamp/kernels.hpp"
#include "gcnsamp/regularizer.hpp"

namespace gcnsamp {

namespace {

Matrix gaussian(Index rows, Index cols, double stddev, Rng& rng) {
  std::normal_distribution<double> nd(0.0, stddev);
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
  return m;
}

Matrix gather_rows(const Matrix& x, std::span<const NodeId> rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= x.rows()) throw ConfigError("feature matrix has too few rows");
    out.row(static_cast<Index>(r)) = x.row(rows[r]);
  }
  return out;
}

void check_positive(Index v, const char* what) {
  if (v <= 0) throw ConfigError(std::string("dimension must be positive: ") + what);
}

void check_labels(const Matrix& labels, const ComputeGraph& g, Index k) {
  if (labels.cols() != k) throw ConfigError("label width does not match the output width");
  for (NodeId v : g.targets)
    if (v < 0 || v >= labels.rows()) throw ConfigError("label matrix has too few rows");
}

}  // namespace

GcnParams3 init_params3(Index d, Index m1, Index m2, Index n, Index k, std::uint64_t seed) {
  check_positive(d, "d");
  check_positive(m1, "m1");
  check_positive(m2, "m2");
  check_positive(n, "n");
  check_positive(k, "k");
  GcnParams3 p;
  p.dims = {d, m1, m2, n, k};
  p.seed = seed;
  Rng rng = make_rng(seed, 0x6d6f64656c33ULL);
  p.W0 = gaussian(d, m1, 1.0 / std::sqrt(double(m1)), rng);
  p.V0 = gaussian(m1, m2, 1.0 / std::sqrt(double(m2)), rng);
  p.b1 = gaussian(1, m1, 1.0 / std::sqrt(double(m1)), rng);
  p.b2 = gaussian(1, m2, 1.0 / std::sqrt(double(m2)), rng);
  p.C = gaussian(m2, k, 1.0, rng);
  p.W = Matrix::Zero(d, m1);
  p.V = Matrix::Zero(m1, m2);
  return p;
}

NoiseState draw_noise(const Dims3& dims, const NoiseSpec& spec, Rng& rng) {
  if (spec.sigma_w < 0.0 || spec.sigma_v < 0.0) throw ConfigError("smoothing scale must be non-negative");
  NoiseState s;
  if (spec.sigma_w > 0.0) s.w_rho = gaussian(dims.d, dims.m1, spec.sigma_w, rng);
  if (spec.sigma_v > 0.0) s.v_rho = gaussian(dims.m1, dims.m2, spec.sigma_v, rng);
  switch (spec.dropout) {
    case DropoutKind::None:
      break;
    case DropoutKind::Sign: {
      std::bernoulli_distribution coin(0.5);
      s.sigma.resize(dims.m1);
      for (Index i = 0; i < dims.m1; ++i) s.sigma[i] = coin(rng) ? 1.0 : -1.0;
      break;
    }
    case DropoutKind::Bernoulli: {
      if (!(spec.dropout_rate >= 0.0 && spec.dropout_rate < 1.0))
        throw ConfigError("dropout rate must lie in [0, 1)");
      std::bernoulli_distribution keep(1.0 - spec.dropout_rate);
      const double scale = 1.0 / (1.0 - spec.dropout_rate);
      s.sigma.resize(dims.m1);
      for (Index i = 0; i < dims.m1; ++i) s.sigma[i] = keep(rng) ? scale : 0.0;
      break;
    }
  }
  return s;
}

EffectiveWeights effective_weights(const GcnParams3& p, const NoiseState* noise, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and non-negative");
  const double s = std::sqrt(lambda);
  EffectiveWeights e;
  e.w = p.W0;
  e.v = p.V0;
  if (noise && noise->w_rho.size() > 0) e.w += noise->w_rho;
  if (noise && noise->v_rho.size() > 0) e.v += noise->v_rho;
  if (noise && noise->sigma.size() > 0) {
    if (noise->sigma.size() != p.dims.m1) throw ConfigError("dropout mask has the wrong width");
    e.w.noalias() += p.W * noise->sigma.asDiagonal();
    e.v.noalias() += noise->sigma.asDiagonal() * p.V;
  } else {
    e.w += p.W;
    e.v += p.V;
  }
  e.w *= s;
  e.v *= s;
  return e;
}

Matrix forward3_effective(const ComputeGraph& graph, const Matrix& X, const Matrix& w_eff, const Matrix& v_eff,
                          const RowVector& b1, const RowVector& b2, const Matrix& C, Forward3Cache* cache) {
  if (graph.blocks.size() != 3) throw ConfigError("three-layer network needs three aggregation blocks");
  if (X.cols() != w_eff.rows()) throw ConfigError("feature width does not match W");
  if (w_eff.cols() != v_eff.rows() || v_eff.cols() != C.rows() || b1.size() != w_eff.cols() ||
      b2.size() != v_eff.cols())
    throw ConfigError("inconsistent layer shapes");

  Forward3Cache local;
  Forward3Cache& c = cache ? *cache : local;
  c.graph = &graph;
  const Matrix xin = gather_rows(X, graph.input_nodes());
  kernels::spmm(graph.blocks[2].adj, xin, c.z1);
  c.pre1.noalias() = c.z1 * w_eff;
  c.pre1.rowwise() += b1;
  kernels::relu(c.pre1, c.h1);
  kernels::spmm(graph.blocks[1].adj, c.h1, c.g2);
  c.pre2.noalias() = c.g2 * v_eff;
  c.pre2.rowwise() += b2;
  kernels::relu(c.pre2, c.h2);
  kernels::spmm(graph.blocks[0].adj, c.h2, c.agg3);
  c.out.noalias() = c.agg3 * C;
  if (!cache) return std::move(c.out);
  return c.out;
}

Matrix forward3(const ComputeGraph& graph, const Matrix& X, const GcnParams3& p, const NoiseState* noise,
                double lambda, Forward3Cache* cache) {
  EffectiveWeights eff = effective_weights(p, noise, lambda);
  if (!cache) return forward3_effective(graph, X, eff.w, eff.v, p.b1, p.b2, p.C, nullptr);
  Matrix out = forward3_effective(graph, X, eff.w, eff.v, p.b1, p.b2, p.C, cache);
  cache->eff = std::move(eff);
  cache->sigma = (noise && noise->sigma.size() > 0) ? noise->sigma : Vector();
  cache->lambda = lambda;
  cache->version = p.version;
  cache->from_params = true;
  return out;
}

Matrix forward3(const ScaledCsr& a1, const ScaledCsr& a2, const ScaledCsr& a3, const Matrix& X,
                const GcnParams3& p, const NoiseState* noise, double lambda) {
  const ScaledCsr* ops[] = {&a3, &a2, &a1};
  const std::vector<NodeId> targets = all_nodes(a1.rows());
  const ComputeGraph g = build_compute_graph(ops, targets);
  return forward3(g, X, p, noise, lambda);
}

double loss_l2(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw ConfigError("loss: prediction and target shapes differ");
  if (pred.rows() == 0) throw ConfigError("loss over an empty set");
  return 0.5 * (pred - target).squaredNorm() / double(pred.rows());
}

double loss_l2(const Matrix& pred, const Matrix& labels, std::span<const NodeId> idx) {
  if (pred.cols() != labels.cols()) throw ConfigError("loss: prediction and label widths differ");
  if (idx.empty()) throw ConfigError("loss over an empty set");
  double s = 0.0;
  for (NodeId v : idx) {
    if (v < 0 || v >= pred.rows() || v >= labels.rows()) throw ConfigError("loss: node out of range");
    s += (pred.row(v) - labels.row(v)).squaredNorm();
  }
  return 0.5 * s / double(idx.size());
}

Gradients3 grad3(const Forward3Cache& c, const GcnParams3& p, const Matrix& labels, RegWeights reg) {
  if (!c.graph || !c.from_params) throw ConfigError("grad3 needs a cached forward pass over the parameters");
  if (c.version != p.version) throw ConfigError("stale forward cache: parameters changed since the forward pass");
  const ComputeGraph& g = *c.graph;
  check_labels(labels, g, p.dims.k);
  if (g.targets.empty()) throw ConfigError("loss over an empty set");

  const Index b = static_cast<Index>(g.targets.size());
  const Matrix y = gather_rows(labels, g.targets);
  Gradients3 out;
  const Matrix diff = c.out - y;
  out.loss = 0.5 * diff.squaredNorm() / double(b);
  const Matrix d_out = diff / double(b);

  const Matrix d_agg3 = d_out * p.C.transpose();
  Matrix d_pre2;
  kernels::spmm_transposed(g.blocks[0].adj, d_agg3, d_pre2);
  kernels::relu_backward(c.pre2, d_pre2);
  const Matrix d_veff = c.g2.transpose() * d_pre2;
  const Matrix d_g2 = d_pre2 * c.eff.v.transpose();
  Matrix d_pre1;
  kernels::spmm_transposed(g.blocks[1].adj, d_g2, d_pre1);
  kernels::relu_backward(c.pre1, d_pre1);
  const Matrix d_weff = c.z1.transpose() * d_pre1;

  const double s = std::sqrt(c.lambda);
  if (c.sigma.size() > 0) {
    out.w = s * (d_weff * c.sigma.asDiagonal());
    out.v = s * (c.sigma.asDiagonal() * d_veff);
  } else {
    out.w = s * d_weff;
    out.v = s * d_veff;
  }
  if (reg.lambda_w != 0.0 || reg.lambda_v != 0.0) {
    const RegularizerValue r = regularizer(p.W, p.V, c.lambda, reg.lambda_w, reg.lambda_v);
    out.reg = r.value;
    out.w += r.grad_w;
    out.v += r.grad_v;
  }
  return out;
}

GcnParams2 init_params2(Index d, Index m, Index n, Index k, double eps_c, std::uint64_t seed) {
  check_positive(d, "d");
  check_positive(m, "m");
  check_positive(n, "n");
  check_positive(k, "k");
  if (!(eps_c > 0.0)) throw ConfigError("output scale must be positive");
  GcnParams2 p;
  p.d = d;
  p.m = m;
  p.n = n;
  p.k = k;
  p.seed = seed;
  p.eps_c = eps_c;
  Rng rng = make_rng(seed, 0x6d6f64656c32ULL);
  p.W0 = gaussian(d, m, 1.0 / std::sqrt(double(m)), rng);
  p.b = gaussian(1, m, 1.0 / std::sqrt(double(m)), rng);
  p.c_out = gaussian(m, k, eps_c, rng);
  p.W = Matrix::Zero(d, m);
  return p;
}

Matrix forward2(const ComputeGraph& graph, const Matrix& X, const GcnParams2& p, Forward2Cache* cache) {
  if (graph.blocks.size() != 1) throw ConfigError("two-layer network needs one aggregation block");
  if (X.cols() != p.d) throw ConfigError("feature width does not match W");
  Forward2Cache local;
  Forward2Cache& c = cache ? *cache : local;
  c.graph = &graph;
  const Matrix xin = gather_rows(X, graph.input_nodes());
  kernels::spmm(graph.blocks[0].adj, xin, c.z);
  c.pre.noalias() = c.z * (p.W0 + p.W);
  c.pre.rowwise() += p.b;
  kernels::relu(c.pre, c.h);
  c.out.noalias() = c.h * p.c_out;
  c.version = p.version;
  if (!cache) return std::move(c.out);
  return c.out;
}

Matrix forward2(const ScaledCsr& a, const Matrix& X, const GcnParams2& p) {
  const ScaledCsr* ops[] = {&a};
  const std::vector<NodeId> targets = all_nodes(a.rows());
  const ComputeGraph g = build_compute_graph(ops, targets);
  return forward2(g, X, p);
}

Gradients2 grad2(const Forward2Cache& c, const GcnParams2& p, const Matrix& labels) {
  if (!c.graph) throw ConfigError("grad2 needs a cached forward pass");
  if (c.version != p.version) throw ConfigError("stale forward cache: parameters changed since the forward pass");
  const ComputeGraph& g = *c.graph;
  check_labels(labels, g, p.k);
  if (g.targets.empty()) throw ConfigError("loss over an empty set");
  const Index b = static_cast<Index>(g.targets.size());
  const Matrix diff = c.out - gather_rows(labels, g.targets);
  Gradients2 out;
  out.loss = 0.5 * diff.squaredNorm() / double(b);
  Matrix d_pre = (diff / double(b)) * p.c_out.transpose();
  kernels::relu_backward(c.pre, d_pre);
  out.w = c.z.transpose() * d_pre;
  return out;
}

namespace {

constexpr const char* kCheckpointMagic = "gcnsamp-checkpoint-v1";

void write_matrix(std::ostream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
    out << '\n';
  }
}

void read_matrix(std::istream& in, Matrix& m) {
  for (Index i = 0; i < m.size(); ++i)
    if (!(in >> m.data()[i]) || !std::isfinite(m.data()[i])) throw ConfigError("checkpoint: malformed matrix");
}

}  // namespace

void save_checkpoint(const GcnParams3& p, std::ostream& out) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << kCheckpointMagic << '\n'
      << p.dims.d << ' ' << p.dims.m1 << ' ' << p.dims.m2 << ' ' << p.dims.n << ' ' << p.dims.k << ' ' << p.seed
      << ' ' << p.version << '\n';
  write_matrix(out, p.W);
  write_matrix(out, p.V);
  out.precision(old);
  if (!out) throw ConfigError("checkpoint: write failed");
}

GcnParams3 load_checkpoint(std::istream& in) {
  std::string magic;
  if (!(in >> magic) || magic != kCheckpointMagic) throw ConfigError("checkpoint: bad header");
  Dims3 d;
  std::uint64_t seed = 0, version = 0;
  if (!(in >> d.d >> d.m1 >> d.m2 >> d.n >> d.k >> seed >> version)) throw ConfigError("checkpoint: bad dimensions");
  GcnParams3 p = init_params3(d.d, d.m1, d.m2, d.n, d.k, seed);
  read_matrix(in, p.W);
  read_matrix(in, p.V);
  p.version = version;
  return p;
}

}  // namespace gcnsamp
