#include "gcnsamp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gcnsamp {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Asymmetric: return "asymmetric";
    case Strategy::Symmetric: return "symmetric";
    case Strategy::FastGcn: return "fastgcn";
  }
  return "?";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "asymmetric" || name == "ours") return Strategy::Asymmetric;
  if (name == "symmetric") return Strategy::Symmetric;
  if (name == "fastgcn") return Strategy::FastGcn;
  throw ConfigError("unknown sampling strategy \"" + name + "\"");
}

std::vector<Index> budget_from_fractions(const DegreeGrouping& grouping, std::span<const double> fractions) {
  if (static_cast<Index>(fractions.size()) != grouping.groups())
    throw ConfigError("need one budget fraction per degree group");
  std::vector<Index> out;
  for (Index l = 0; l < grouping.groups(); ++l) {
    if (!(fractions[l] > 0.0 && fractions[l] <= 1.0)) throw ConfigError("budget fraction must be in (0, 1]");
    const Index n = grouping.size(l);
    out.push_back(std::clamp<Index>(std::llround(fractions[l] * static_cast<double>(n)), 1, n));
  }
  return out;
}

namespace {

void check_group_vector(const DegreeGrouping& grouping, std::span<const double> pstar) {
  if (static_cast<Index>(pstar.size()) != grouping.groups())
    throw ConfigError("expected " + std::to_string(grouping.groups()) + " per-group scale factors, got " +
                      std::to_string(pstar.size()));
  for (double p : pstar)
    if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("scale factors must be finite and non-negative");
}

void check_sizes(const NormalizedAdjacency& a, const DegreeGrouping& grouping) {
  if (grouping.n_nodes() != a.n()) throw ConfigError("grouping size does not match the graph");
}

}  // namespace

EffectiveAdjacency effective_adjacency(const NormalizedAdjacency& a, const DegreeGrouping& grouping,
                                       std::span<const double> pstar, bool symmetric) {
  check_sizes(a, grouping);
  check_group_vector(grouping, pstar);
  EffectiveAdjacency eff;
  eff.pstar.assign(pstar.begin(), pstar.end());
  eff.symmetric = symmetric;
  eff.op.base = &a.matrix;
  eff.op.col_scale.resize(static_cast<std::size_t>(a.n()));
  for (Index j = 0; j < a.n(); ++j) {
    const double p = pstar[grouping.membership[j]];
    eff.op.col_scale[j] = symmetric ? std::sqrt(p) : p;
  }
  if (symmetric) eff.op.row_scale = eff.op.col_scale;
  eff.matrix = eff.op.materialize();
  eff.inf_norm = eff.op.infinity_norm();
  return eff;
}

EffectiveAdjacency effective_adjacency(const NormalizedAdjacency& a, const DegreeGrouping& grouping,
                                       const SamplingPlan& plan) {
  if (plan.strategy == Strategy::FastGcn) {
    const std::vector<double> ones(static_cast<std::size_t>(grouping.groups()), 1.0);
    return effective_adjacency(a, grouping, ones, false);
  }
  return effective_adjacency(a, grouping, plan.pstar, plan.strategy == Strategy::Symmetric);
}

std::vector<double> psi(const DegreeGrouping& grouping) {
  const Index L = grouping.groups();
  if (L < 1) throw ConfigError("psi: no degree groups");
  double mass = 0.0;
  for (Index l = 0; l < L; ++l) {
    if (!(grouping.degree_scale[l] > 0.0)) throw ConfigError("psi: every group needs a positive degree scale");
    mass += grouping.degree_scale[l] * static_cast<double>(grouping.size(l));
  }
  if (!(mass > 0.0)) throw ConfigError("psi: zero total degree mass");
  const double top = grouping.degree_scale[L - 1];
  std::vector<double> out;
  for (Index l = 0; l < L; ++l)
    out.push_back(std::sqrt(top * grouping.degree_scale[l]) * static_cast<double>(grouping.size(l)) / mass);
  return out;
}

bool GroupCheck::all() const {
  return std::all_of(pass.begin(), pass.end(), [](bool b) { return b; });
}

GroupCheck check_pstar_bound(std::span<const double> pstar, std::span<const double> psi_values, Index L,
                             double c, bool symmetric) {
  if (pstar.size() != psi_values.size()) throw ConfigError("pstar and psi lengths differ");
  GroupCheck out;
  for (std::size_t l = 0; l < pstar.size(); ++l) {
    const double lpsi = static_cast<double>(L) * psi_values[l];
    const double limit = symmetric ? c / (lpsi * lpsi) : c / lpsi;
    out.threshold.push_back(limit);
    out.pass.push_back(pstar[l] >= 0.0 && pstar[l] <= limit);
  }
  return out;
}

GroupCheck check_sample_budget(std::span<const Index> budget, std::span<const Index> group_sizes,
                               std::span<const double> pstar, std::span<const double> psi_values, Index L,
                               double c, double eps_poly, bool symmetric) {
  if (budget.size() != group_sizes.size() || budget.size() != pstar.size() || budget.size() != psi_values.size())
    throw ConfigError("sample budget check: per-group vectors differ in length");
  GroupCheck out;
  for (std::size_t l = 0; l < budget.size(); ++l) {
    if (pstar[l] == 0.0) {
      out.threshold.push_back(0.0);
      out.pass.push_back(true);
      if (budget[l] > 0)
        out.warnings.push_back("group " + std::to_string(l) + " has p* = 0 and contributes nothing");
      continue;
    }
    const double scale = symmetric ? std::sqrt(pstar[l]) : pstar[l];
    const double ratio = c * eps_poly / (static_cast<double>(L) * scale * psi_values[l]);
    double threshold = 1.0 / (1.0 + ratio);
    if (symmetric) threshold *= threshold;
    out.threshold.push_back(threshold);
    const double fraction = static_cast<double>(budget[l]) / static_cast<double>(group_sizes[l]);
    out.pass.push_back(fraction >= threshold);
  }
  return out;
}

bool check_phat_tolerance(std::span<const double> phat, std::span<const double> pstar, double eps_poly) {
  if (phat.size() != pstar.size()) throw ConfigError("phat and pstar lengths differ");
  double worst = 0.0;
  for (std::size_t l = 0; l < phat.size(); ++l) {
    if (!(pstar[l] > 0.0)) throw ConfigError("phat tolerance needs positive p*");
    worst = std::max(worst, std::abs(phat[l] - pstar[l]) / pstar[l]);
  }
  return worst <= eps_poly;
}

void validate_plan(const DegreeGrouping& grouping, const SamplingPlan& plan) {
  if (plan.strategy == Strategy::FastGcn) {
    if (plan.layer_samples < 1 || plan.layer_samples > grouping.n_nodes())
      throw ConfigError("FastGCN layer sample count must be in [1, N]");
    return;
  }
  check_group_vector(grouping, plan.pstar);
  if (static_cast<Index>(plan.budget.size()) != grouping.groups())
    throw ConfigError("need one sample budget per degree group");
  for (Index l = 0; l < grouping.groups(); ++l)
    if (plan.budget[l] < 1 || plan.budget[l] > grouping.size(l))
      throw ConfigError("sample budget of group " + std::to_string(l) + " must be in [1, N_l]");
}

namespace {

// Uniform draw of `k` of `pool` without replacement, returned sorted.
std::vector<NodeId> draw_without_replacement(const std::vector<NodeId>& pool, Index k, Rng& rng) {
  std::vector<NodeId> work = pool;
  const Index n = static_cast<Index>(work.size());
  if (k < n) {
    for (Index i = 0; i < k; ++i) {
      std::uniform_int_distribution<Index> pick(i, n - 1);
      std::swap(work[i], work[pick(rng)]);
    }
    work.resize(static_cast<std::size_t>(k));
    std::sort(work.begin(), work.end());
  }
  return work;
}

SampledAdjacency group_sample(const NormalizedAdjacency& a, const DegreeGrouping& grouping,
                              const SamplingPlan& plan, Rng& rng, bool symmetric) {
  check_sizes(a, grouping);
  validate_plan(grouping, plan);
  SampledAdjacency s;
  s.op.base = &a.matrix;
  s.op.col_scale.assign(static_cast<std::size_t>(a.n()), 0.0);
  for (Index l = 0; l < grouping.groups(); ++l) {
    auto picked = draw_without_replacement(grouping.members[l], plan.budget[l], rng);
    // N_l / S_l first so that a full budget reproduces p*_l bit for bit.
    const double scale = plan.pstar[l] * (static_cast<double>(grouping.size(l)) / static_cast<double>(plan.budget[l]));
    const double factor = symmetric ? std::sqrt(scale) : scale;
    for (NodeId j : picked) s.op.col_scale[j] = factor;
    s.selected.push_back(std::move(picked));
  }
  if (symmetric) s.op.row_scale = s.op.col_scale;
  return s;
}

}  // namespace

SampledAdjacency sample_asymmetric(const NormalizedAdjacency& a, const DegreeGrouping& grouping,
                                   const SamplingPlan& plan, Rng& rng) {
  return group_sample(a, grouping, plan, rng, false);
}

SampledAdjacency sample_symmetric(const NormalizedAdjacency& a, const DegreeGrouping& grouping,
                                  const SamplingPlan& plan, Rng& rng) {
  return group_sample(a, grouping, plan, rng, true);
}

SampledAdjacency sample_fastgcn(const NormalizedAdjacency& a, Index layer_samples, Rng& rng, bool force_uniform) {
  const Index n = a.n();
  if (layer_samples < 1 || layer_samples > n) throw ConfigError("FastGCN layer sample count must be in [1, N]");

  std::vector<double> q(static_cast<std::size_t>(n), 1.0);
  if (!force_uniform) {
    // A is symmetric, so the squared norm of column u equals that of row u.
    for (Index u = 0; u < n; ++u) {
      double s = 0.0;
      for (Index k = a.matrix.row_ptr[u]; k < a.matrix.row_ptr[u + 1]; ++k) s += a.matrix.values[k] * a.matrix.values[k];
      q[u] = s;
    }
  }
  const double total = std::accumulate(q.begin(), q.end(), 0.0);
  for (double& v : q) v /= total;

  // Systematic resampling: one uniform offset, n evenly spaced points on the
  // CDF. Each column is drawn n q(u) times in expectation, so the estimator
  // stays unbiased, and uniform q with n = N keeps every column exactly once.
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double offset = unif(rng);
  std::vector<Index> count(static_cast<std::size_t>(n), 0);
  const double ns = static_cast<double>(layer_samples);
  double cdf_hi = 0.0;
  Index next = 0;  // next sample point index
  for (Index u = 0; u < n && next < layer_samples; ++u) {
    cdf_hi += q[u] * ns;
    if (u == n - 1) cdf_hi = ns;
    while (next < layer_samples && static_cast<double>(next) + offset < cdf_hi) {
      ++count[u];
      ++next;
    }
  }

  SampledAdjacency s;
  s.op.base = &a.matrix;
  s.op.col_scale.assign(static_cast<std::size_t>(n), 0.0);
  s.selected.emplace_back();
  for (Index u = 0; u < n; ++u) {
    if (count[u] == 0) continue;
    s.op.col_scale[u] = static_cast<double>(count[u]) / (ns * q[u]);
    for (Index r = 0; r < count[u]; ++r) s.selected[0].push_back(static_cast<NodeId>(u));
  }
  return s;
}

SampledAdjacency sample(const NormalizedAdjacency& a, const DegreeGrouping& grouping, const SamplingPlan& plan,
                        Rng& rng) {
  switch (plan.strategy) {
    case Strategy::Asymmetric: return sample_asymmetric(a, grouping, plan, rng);
    case Strategy::Symmetric: return sample_symmetric(a, grouping, plan, rng);
    case Strategy::FastGcn: return sample_fastgcn(a, plan.layer_samples, rng, plan.force_uniform);
  }
  throw ConfigError("unknown sampling strategy");
}

DeviationStats estimate_sampling_deviation(const NormalizedAdjacency& a, const DegreeGrouping& grouping,
                                           const SamplingPlan& plan, Index trials, std::uint64_t seed) {
  if (trials < 1) throw ConfigError("need at least one trial");
  validate_plan(grouping, plan);
  const EffectiveAdjacency eff = effective_adjacency(a, grouping, plan);
  DeviationStats stats;
  stats.per_trial.assign(static_cast<std::size_t>(trials), 0.0);
#pragma omp parallel for schedule(dynamic)
  for (Index t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(t));
    const SampledAdjacency s = sample(a, grouping, plan, rng);
    stats.per_trial[t] = scaled_difference_inf_norm(s.op, eff.op);
  }
  double sum = 0.0;
  for (double v : stats.per_trial) {
    sum += v;
    stats.max = std::max(stats.max, v);
  }
  stats.mean = sum / static_cast<double>(trials);
  return stats;
}

}  // namespace gcnsamp
