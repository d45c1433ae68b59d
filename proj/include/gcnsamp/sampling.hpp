#pragma once

#include <span>
#include <string>
#include <vector>

#include "gcnsamp/graph.hpp"

namespace gcnsamp {

enum class Strategy { Asymmetric, Symmetric, FastGcn };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& name);

/// Per-group scale factors and sample budgets. Group order follows
/// DegreeGrouping (ascending degree). FastGCN plans only use `layer_samples`.
struct SamplingPlan {
  Strategy strategy = Strategy::Asymmetric;
  std::vector<double> pstar;
  std::vector<Index> budget;
  Index layer_samples = 0;
  bool force_uniform = false;  // FastGCN with q uniform; test hook
};

// Budgets as fractions of each group's size, rounded to nearest, clamped to [1, N_l].
std::vector<Index> budget_from_fractions(const DegreeGrouping& grouping, std::span<const double> fractions);

/// The deterministic matrix a sampling plan trains against:
/// A P* for the asymmetric scheme and P* A P* (with sqrt(p*) on the diagonal)
/// for the symmetric scheme.
struct EffectiveAdjacency {
  ScaledCsr op;
  CsrMatrix matrix;
  std::vector<double> pstar;
  bool symmetric = false;
  double inf_norm = 0.0;
};

EffectiveAdjacency effective_adjacency(const NormalizedAdjacency& a, const DegreeGrouping& grouping,
                                       std::span<const double> pstar, bool symmetric);

// The effective adjacency of any plan; FastGCN is unbiased for A itself.
EffectiveAdjacency effective_adjacency(const NormalizedAdjacency& a, const DegreeGrouping& grouping,
                                       const SamplingPlan& plan);

// psi_l = sqrt(d_L d_l) N_l / sum_i d_i N_i
std::vector<double> psi(const DegreeGrouping& grouping);

struct GroupCheck {
  std::vector<bool> pass;
  std::vector<double> threshold;  // per-group bound the check compared against
  std::vector<std::string> warnings;

  bool all() const;
};

/// Upper bound on the scale factors: p*_l <= c / (L psi_l), or
/// p*_l <= c / (L psi_l)^2 for the symmetric scheme.
GroupCheck check_pstar_bound(std::span<const double> pstar, std::span<const double> psi_values,
                             Index L, double c, bool symmetric = false);

/// Lower bound on the sampled fraction:
/// S_l / N_l >= (1 + c eps / (L p*_l psi_l))^-1, and for the symmetric scheme
/// S_l / N_l >= (1 + c eps / (L sqrt(p*_l) psi_l))^-2.
/// `threshold` holds the minimal fraction. Groups with p*_l = 0 pass with a
/// warning because they contribute nothing to A*.
GroupCheck check_sample_budget(std::span<const Index> budget, std::span<const Index> group_sizes,
                               std::span<const double> pstar, std::span<const double> psi_values,
                               Index L, double c, double eps_poly, bool symmetric = false);

// max_l |phat_l - p*_l| / p*_l <= eps_poly
bool check_phat_tolerance(std::span<const double> phat, std::span<const double> pstar, double eps_poly);

/// One realization of a sampled adjacency, stored as diagonal scalings of A.
struct SampledAdjacency {
  ScaledCsr op;
  std::vector<std::vector<NodeId>> selected;  // per group (FastGCN: one list, with repeats)
  std::uint64_t iteration_tag = 0;

  CsrMatrix materialize() const { return op.materialize(); }
};

SampledAdjacency sample_asymmetric(const NormalizedAdjacency& a, const DegreeGrouping& grouping,
                                   const SamplingPlan& plan, Rng& rng);
SampledAdjacency sample_symmetric(const NormalizedAdjacency& a, const DegreeGrouping& grouping,
                                  const SamplingPlan& plan, Rng& rng);
/// Layer-wise importance sampling: `layer_samples` columns drawn by systematic
/// resampling from q(u), proportional to the squared norm of column u. A drawn
/// column is rescaled by (times drawn) / (n q(u)) so that E[A^s] = A.
SampledAdjacency sample_fastgcn(const NormalizedAdjacency& a, Index layer_samples, Rng& rng,
                                bool force_uniform = false);

// Dispatches on plan.strategy.
SampledAdjacency sample(const NormalizedAdjacency& a, const DegreeGrouping& grouping,
                        const SamplingPlan& plan, Rng& rng);

void validate_plan(const DegreeGrouping& grouping, const SamplingPlan& plan);

struct DeviationStats {
  double mean = 0.0;
  double max = 0.0;
  std::vector<double> per_trial;
};

/// ||A^s - A*||_inf over independent draws. Trial t uses the stream
/// derive_seed(seed, t), so two plans evaluated with the same seed are paired.
/// Trials run in parallel; the result does not depend on the thread count.
DeviationStats estimate_sampling_deviation(const NormalizedAdjacency& a, const DegreeGrouping& grouping,
                                           const SamplingPlan& plan, Index trials, std::uint64_t seed);

}  // namespace gcnsamp
