#include "gcnsamp/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "gcnsamp/csv.hpp"
#include "gcnsamp/regularizer.hpp"

namespace gcnsamp {

namespace {

constexpr double kDivergenceFactor = 1e6;
constexpr std::uint64_t kBatchStream = 1;
constexpr std::uint64_t kSampleStream = 2;
constexpr std::uint64_t kNoiseStream = 3;
constexpr std::uint64_t kOutputStream = 4;

// Uniform subset of size min(batch, |omega|) without replacement.
std::vector<NodeId> draw_batch(std::vector<NodeId>& pool, Index batch, Rng& rng) {
  const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(batch), pool.size());
  for (std::size_t i = 0; i < b; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  return {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(b)};
}

void check_sets(const Matrix& X, const Matrix& labels, Index n, std::span<const NodeId> omega) {
  if (omega.empty()) throw ConfigError("labeled set is empty");
  if (X.rows() != n || labels.rows() != n) throw ConfigError("features and labels need one row per node");
  for (NodeId v : omega)
    if (v < 0 || v >= n) throw ConfigError("labeled node out of range");
}

void guard(double loss, double reference) {
  if (!std::isfinite(loss)) throw NumericalError("non-finite training loss");
  if (loss > kDivergenceFactor * reference)
    throw NumericalError("training diverged: loss " + std::to_string(loss) + " exceeds 1e6 x initial " +
                         std::to_string(reference));
}

NoiseSpec noise_spec(const TrainConfig& cfg) {
  return {cfg.sigma_w, cfg.sigma_v, cfg.dropout, cfg.dropout_rate};
}

double elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

std::string to_string(Preset p) { return p == Preset::Theory ? "theory" : "practical"; }

Preset parse_preset(const std::string& name) {
  if (name == "theory") return Preset::Theory;
  if (name == "practical") return Preset::Practical;
  throw ConfigError("unknown preset: " + name);
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.eta >= 0.0 && cfg.eta < 1.0)) throw ConfigError("eta must lie in [0, 1)");
  if (cfg.T < 1 || cfg.T_w < 1) throw ConfigError("T and T_w must be at least 1");
  if (cfg.batch < 1) throw ConfigError("batch size must be at least 1");
  if (cfg.lambda_w < 0.0 || cfg.lambda_v < 0.0) throw ConfigError("regularizer weights must be non-negative");
  if (cfg.sigma_w < 0.0 || cfg.sigma_v < 0.0) throw ConfigError("smoothing scales must be non-negative");
  if (cfg.dropout == DropoutKind::Bernoulli && !(cfg.dropout_rate >= 0.0 && cfg.dropout_rate < 1.0))
    throw ConfigError("dropout rate must lie in [0, 1)");
  if (cfg.noise_candidates < 1) throw ConfigError("noise_candidates must be at least 1");
}

TrainConfig theory_preset(Index m1, Index m2, double eps0, double C0) {
  if (m1 < 1 || m2 < 1) throw ConfigError("widths must be positive");
  if (!(eps0 > 0.0) || !(C0 > 0.0)) throw ConfigError("eps0 and C0 must be positive");
  TrainConfig cfg;
  cfg.preset = Preset::Theory;
  cfg.eps0 = eps0;
  cfg.lambda_v = 2.0 * eps0 * double(m2) / std::pow(double(m1), 0.99);
  cfg.lambda_w = 2.0 * eps0 * std::pow(double(m1), 2.998) / std::pow(C0, 4.0);
  cfg.sigma_w = std::pow(double(m1), -0.99);
  cfg.sigma_v = std::pow(double(m2), -0.51);
  cfg.dropout = DropoutKind::Sign;
  cfg.output_uses_last_noise = true;
  return cfg;
}

TrainConfig practical_preset() {
  TrainConfig cfg;
  cfg.preset = Preset::Practical;
  cfg.lambda_w = 1e-4;
  cfg.lambda_v = 1e-4;
  cfg.dropout = DropoutKind::Bernoulli;
  cfg.dropout_rate = 0.4;
  cfg.output_uses_last_noise = false;
  return cfg;
}

double DecaySchedule::lambda(Index t) const {
  if (t < 0) throw ConfigError("negative decay step");
  return std::pow(1.0 - eta, static_cast<double>(t));
}

void TrainReport::write_csv(std::ostream& out) const {
  out << "t,lambda_t,train_loss,test_loss\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    out << t[i] << ',' << format_double(lambda[i]) << ',' << format_double(train_loss[i]) << ','
        << format_double(test_loss[i]) << '\n';
}

Index select_best_noise(Index count, const std::function<double(Index)>& eval_fn) {
  if (count < 1) throw ConfigError("need at least one noise candidate");
  Index best = 0;
  double best_value = eval_fn(0);
  for (Index j = 1; j < count; ++j) {
    const double v = eval_fn(j);
    if (v < best_value) {
      best_value = v;
      best = j;
    }
  }
  return best;
}

double evaluate(const GcnParams3& p, const Matrix& w_eff, const Matrix& v_eff, const ScaledCsr& astar,
                const Matrix& X, const Matrix& labels, std::span<const NodeId> idx) {
  if (idx.empty()) throw ConfigError("loss over an empty set");
  const ScaledCsr* ops[] = {&astar, &astar, &astar};
  const ComputeGraph g = build_compute_graph(ops, idx);
  const Matrix pred = forward3_effective(g, X, w_eff, v_eff, p.b1, p.b2, p.C);
  Matrix y(pred.rows(), labels.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) y.row(static_cast<Index>(r)) = labels.row(idx[r]);
  return loss_l2(pred, y);
}

double evaluate2(const GcnParams2& p, const ScaledCsr& a, const Matrix& X, const Matrix& labels,
                 std::span<const NodeId> idx) {
  if (idx.empty()) throw ConfigError("loss over an empty set");
  const ScaledCsr* ops[] = {&a};
  const ComputeGraph g = build_compute_graph(ops, idx);
  const Matrix pred = forward2(g, X, p);
  Matrix y(pred.rows(), labels.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) y.row(static_cast<Index>(r)) = labels.row(idx[r]);
  return loss_l2(pred, y);
}

TrainResult2 train_two_layer(const NormalizedAdjacency& a, const DegreeGrouping& grouping, const SamplingPlan& plan,
                             const Matrix& X, const Matrix& labels, std::span<const NodeId> omega,
                             std::span<const NodeId> test, GcnParams2 init, const TrainConfig& cfg) {
  validate(cfg);
  validate_plan(grouping, plan);
  check_sets(X, labels, a.n(), omega);
  const auto start = std::chrono::steady_clock::now();
  const EffectiveAdjacency astar = effective_adjacency(a, grouping, plan);

  TrainResult2 res{std::move(init), {}};
  GcnParams2& p = res.params;
  Rng batch_rng = make_rng(cfg.seed, kBatchStream);
  Rng sample_rng = make_rng(cfg.seed, kSampleStream);
  std::vector<NodeId> pool(omega.begin(), omega.end());

  const double reference = std::max(evaluate2(p, astar.op, X, labels, omega), 1e-300);
  res.report.initial_test_loss =
      test.empty() ? std::numeric_limits<double>::quiet_NaN() : evaluate2(p, astar.op, X, labels, test);

  Forward2Cache cache;
  for (Index t = 0; t < cfg.T; ++t) {
    double sum = 0.0;
    for (Index s = 0; s < cfg.T_w; ++s) {
      const std::vector<NodeId> batch = draw_batch(pool, cfg.batch, batch_rng);
      SampledAdjacency as = sample(a, grouping, plan, sample_rng);
      as.iteration_tag = static_cast<std::uint64_t>(t * cfg.T_w + s);
      const ScaledCsr* ops[] = {&as.op};
      const ComputeGraph g = build_compute_graph(ops, batch);
      forward2(g, X, p, &cache);
      const Gradients2 grad = grad2(cache, p, labels);
      guard(grad.loss, reference);
      sum += grad.loss;
      p.W.noalias() -= cfg.eta * grad.w;
      ++p.version;
    }
    const bool last = t + 1 == cfg.T;
    res.report.t.push_back(t);
    res.report.lambda.push_back(1.0);
    res.report.train_loss.push_back(sum / double(cfg.T_w));
    res.report.test_loss.push_back((cfg.eval_every_outer || last) && !test.empty()
                                       ? evaluate2(p, astar.op, X, labels, test)
                                       : std::numeric_limits<double>::quiet_NaN());
  }
  res.report.w_out = p.W0 + p.W;
  res.report.final_test_loss = res.report.test_loss.back();
  res.report.wall_seconds = elapsed(start);
  return res;
}

TrainResult3 train_three_layer(const NormalizedAdjacency& a, const DegreeGrouping& grouping,
                               const SamplingPlan& plan, const Matrix& X, const Matrix& labels,
                               std::span<const NodeId> omega, std::span<const NodeId> test, GcnParams3 init,
                               const TrainConfig& cfg) {
  validate(cfg);
  validate_plan(grouping, plan);
  check_sets(X, labels, a.n(), omega);
  if (init.dims.n != a.n() || init.dims.d != X.cols() || init.dims.k != labels.cols())
    throw ConfigError("parameter dimensions do not match the data");
  const auto start = std::chrono::steady_clock::now();
  const EffectiveAdjacency astar = effective_adjacency(a, grouping, plan);
  const DecaySchedule schedule{cfg.eta};
  const NoiseSpec spec = noise_spec(cfg);
  const RegWeights reg{cfg.lambda_w, cfg.lambda_v};

  TrainResult3 res{std::move(init), {}};
  GcnParams3& p = res.params;
  Rng batch_rng = make_rng(cfg.seed, kBatchStream);
  Rng sample_rng = make_rng(cfg.seed, kSampleStream);
  Rng noise_rng = make_rng(cfg.seed, kNoiseStream);
  std::vector<NodeId> pool(omega.begin(), omega.end());

  auto test_loss_at = [&](double lambda) {
    const EffectiveWeights e = effective_weights(p, nullptr, lambda);
    return evaluate(p, e.w, e.v, astar.op, X, labels, test);
  };
  {
    const EffectiveWeights e = effective_weights(p, nullptr, 1.0);
    res.report.initial_test_loss = test.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                : evaluate(p, e.w, e.v, astar.op, X, labels, test);
  }
  const double reference = [&] {
    const EffectiveWeights e = effective_weights(p, nullptr, 1.0);
    return std::max(evaluate(p, e.w, e.v, astar.op, X, labels, omega), 1e-300);
  }();

  NoiseState noise;
  Forward3Cache cache;
  double lambda = 1.0;
  for (Index t = 0; t < cfg.T; ++t) {
    lambda = schedule.lambda(t);
    if (!cfg.noise_per_step) noise = draw_noise(p.dims, spec, noise_rng);
    double sum = 0.0;
    for (Index s = 0; s < cfg.T_w; ++s) {
      const std::vector<NodeId> batch = draw_batch(pool, cfg.batch, batch_rng);
      SampledAdjacency s1 = sample(a, grouping, plan, sample_rng);
      SampledAdjacency s2 = cfg.share_sampled ? s1 : sample(a, grouping, plan, sample_rng);
      SampledAdjacency s3 = cfg.share_sampled ? s1 : sample(a, grouping, plan, sample_rng);
      const ScaledCsr* ops[] = {&s3.op, &s2.op, &s1.op};
      const ComputeGraph g = build_compute_graph(ops, batch);
      if (cfg.noise_per_step) noise = draw_noise(p.dims, spec, noise_rng);
      forward3(g, X, p, &noise, lambda, &cache);
      const Gradients3 grad = grad3(cache, p, labels, reg);
      guard(grad.loss, reference);
      sum += grad.loss;
      p.W.noalias() -= cfg.eta * grad.w;
      p.V.noalias() -= cfg.eta * grad.v;
      ++p.version;
    }
    const bool last = t + 1 == cfg.T;
    res.report.t.push_back(t);
    res.report.lambda.push_back(lambda);
    res.report.train_loss.push_back(sum / double(cfg.T_w));
    res.report.test_loss.push_back((cfg.eval_every_outer || last) && !test.empty()
                                       ? test_loss_at(lambda)
                                       : std::numeric_limits<double>::quiet_NaN());
  }

  // Output weights at the last lambda used for training.
  if (cfg.output_uses_last_noise) {
    std::vector<NoiseState> candidates{noise};
    Rng out_rng = make_rng(cfg.seed, kOutputStream);
    for (Index j = 1; j < cfg.noise_candidates; ++j) {
      NoiseState c = draw_noise(p.dims, spec, out_rng);
      c.sigma = noise.sigma;
      candidates.push_back(std::move(c));
    }
    const Index best = select_best_noise(cfg.noise_candidates, [&](Index j) {
      const EffectiveWeights e = effective_weights(p, &candidates[static_cast<std::size_t>(j)], lambda);
      return evaluate(p, e.w, e.v, astar.op, X, labels, omega) +
             regularizer(p.W, p.V, lambda, cfg.lambda_w, cfg.lambda_v).value;
    });
    EffectiveWeights e = effective_weights(p, &candidates[static_cast<std::size_t>(best)], lambda);
    res.report.w_out = std::move(e.w);
    res.report.v_out = std::move(e.v);
  } else {
    EffectiveWeights e = effective_weights(p, nullptr, lambda);
    res.report.w_out = std::move(e.w);
    res.report.v_out = std::move(e.v);
  }
  res.report.final_test_loss =
      test.empty() ? std::numeric_limits<double>::quiet_NaN()
                   : evaluate(p, res.report.w_out, res.report.v_out, astar.op, X, labels, test);
  res.report.wall_seconds = elapsed(start);
  return res;
}

}  // namespace gcnsamp
