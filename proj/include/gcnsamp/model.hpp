#pragma once

#include <span>

#include "gcnsamp/compute_graph.hpp"

namespace gcnsamp {

struct Dims3 {
  Index d = 0;   // feature width
  Index m1 = 0;  // first hidden layer
  Index m2 = 0;  // second hidden layer
  Index n = 0;   // nodes
  Index k = 0;   // outputs
};

/// Three-layer learner  out = A3 relu(A2 relu(A1 X W_eff + B1) V_eff + B2) C.
///
/// Only the offsets W and V are trained. B1 and B2 are all-ones columns times
/// a single random row, so only that row is stored (b1: 1 x m1, b2: 1 x m2).
struct GcnParams3 {
  Dims3 dims;
  std::uint64_t seed = 0;
  Matrix W;   // d x m1, starts at 0
  Matrix V;   // m1 x m2, starts at 0
  Matrix W0;  // frozen initialization
  Matrix V0;
  RowVector b1;
  RowVector b2;
  Matrix C;  // m2 x K
  // Bumped whenever W or V change; forward caches remember it.
  std::uint64_t version = 0;
};

/// W0 ~ N(0, 1/m1), V0 ~ N(0, 1/m2), b1 ~ N(0, 1/m1), b2 ~ N(0, 1/m2),
/// C ~ N(0, 1); W = V = 0. Deterministic in `seed`.
GcnParams3 init_params3(Index d, Index m1, Index m2, Index n, Index k, std::uint64_t seed);

enum class DropoutKind { None, Sign, Bernoulli };

/// Per-step randomness of the stochastic objective. Empty matrices mean zero
/// smoothing; an empty `sigma` means the identity.
struct NoiseState {
  Matrix w_rho;  // d x m1
  Matrix v_rho;  // m1 x m2
  Vector sigma;  // diagonal of the m1 x m1 mask
};

struct NoiseSpec {
  double sigma_w = 0.0;
  double sigma_v = 0.0;
  DropoutKind dropout = DropoutKind::None;
  double dropout_rate = 0.0;  // Bernoulli only: P(unit dropped)
};

/// Sign dropout draws sigma uniformly from {-1, +1}; Bernoulli dropout draws
/// the inverted mask {0, 1/(1-rate)} so that E[sigma] = 1.
NoiseState draw_noise(const Dims3& dims, const NoiseSpec& spec, Rng& rng);

struct EffectiveWeights {
  Matrix w;  // sqrt(lambda) (W0 + W_rho + W Sigma)
  Matrix v;  // sqrt(lambda) (V0 + V_rho + Sigma V)
};

EffectiveWeights effective_weights(const GcnParams3& p, const NoiseState* noise, double lambda);

struct Forward3Cache {
  const ComputeGraph* graph = nullptr;
  Matrix z1, pre1, h1, g2, pre2, h2, agg3, out;
  EffectiveWeights eff;
  Vector sigma;
  double lambda = 1.0;
  std::uint64_t version = 0;
  bool from_params = false;
};

/// Forward pass for the targets of `graph` (rows of the result follow
/// graph.targets). X holds all N feature rows.
Matrix forward3(const ComputeGraph& graph, const Matrix& X, const GcnParams3& p, const NoiseState* noise,
                double lambda, Forward3Cache* cache = nullptr);

// Same network with explicit effective weights (prediction with W_out, V_out).
Matrix forward3_effective(const ComputeGraph& graph, const Matrix& X, const Matrix& w_eff, const Matrix& v_eff,
                          const RowVector& b1, const RowVector& b2, const Matrix& C,
                          Forward3Cache* cache = nullptr);

// All N rows with three (possibly different) adjacency operators.
Matrix forward3(const ScaledCsr& a1, const ScaledCsr& a2, const ScaledCsr& a3, const Matrix& X,
                const GcnParams3& p, const NoiseState* noise, double lambda);

// Mean over rows of 0.5 ||pred - target||^2.
double loss_l2(const Matrix& pred, const Matrix& target);
// Same, for the rows `idx` of full N-row matrices.
double loss_l2(const Matrix& pred, const Matrix& labels, std::span<const NodeId> idx);

struct RegWeights {
  double lambda_w = 0.0;
  double lambda_v = 0.0;
};

struct Gradients3 {
  Matrix w;
  Matrix v;
  double loss = 0.0;  // data term on the batch
  double reg = 0.0;   // regularizer value
};

/// Gradient of  loss_l2(batch) + lambda_w ||sqrt(l) W||_{2,4}^4 + lambda_v ||sqrt(l) V||_F^2
/// with respect to the offsets W and V, where l is the lambda of the forward
/// pass. `labels` holds all N rows. Throws if `p` changed since the forward.
Gradients3 grad3(const Forward3Cache& cache, const GcnParams3& p, const Matrix& labels, RegWeights reg);

/// Two-layer learner  out = relu(A X (W0 + W) + B) c.
struct GcnParams2 {
  Index d = 0, m = 0, n = 0, k = 0;
  std::uint64_t seed = 0;
  double eps_c = 1.0;
  Matrix W;   // d x m, starts at 0
  Matrix W0;  // N(0, 1/m)
  RowVector b;
  Matrix c_out;  // m x K, N(0, eps_c^2)
  std::uint64_t version = 0;
};

GcnParams2 init_params2(Index d, Index m, Index n, Index k, double eps_c, std::uint64_t seed);

struct Forward2Cache {
  const ComputeGraph* graph = nullptr;
  Matrix z, pre, h, out;
  std::uint64_t version = 0;
};

Matrix forward2(const ComputeGraph& graph, const Matrix& X, const GcnParams2& p, Forward2Cache* cache = nullptr);
Matrix forward2(const ScaledCsr& a, const Matrix& X, const GcnParams2& p);

struct Gradients2 {
  Matrix w;
  double loss = 0.0;
};

Gradients2 grad2(const Forward2Cache& cache, const GcnParams2& p, const Matrix& labels);

// Checkpoint: dimensions, seed and trainable offsets; frozen parts are
// regenerated from the seed on load.
void save_checkpoint(const GcnParams3& p, std::ostream& out);
GcnParams3 load_checkpoint(std::istream& in);

}  // namespace gcnsamp
