#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gcnsamp/model.hpp"
#include "gcnsamp/sampling.hpp"

namespace gcnsamp {

enum class Preset { Theory, Practical };

std::string to_string(Preset p);
Preset parse_preset(const std::string& name);

struct TrainConfig {
  double eta = 1e-3;
  Index T = 1;    // outer iterations (weight-decay steps)
  Index T_w = 1;  // inner SGD steps per outer iteration
  Index batch = 5;
  double lambda_w = 0.0;
  double lambda_v = 0.0;
  double sigma_w = 0.0;
  double sigma_v = 0.0;
  double eps0 = 0.1;
  DropoutKind dropout = DropoutKind::None;
  double dropout_rate = 0.0;
  // Redraw smoothing noise every inner step; otherwise once per outer iteration.
  bool noise_per_step = true;
  // Use one sampled adjacency for all three layers instead of three draws.
  bool share_sampled = false;
  // The output weights keep the last noise draw (theory) or use Sigma = I and
  // no smoothing (practical, where the mask is a training-time dropout).
  bool output_uses_last_noise = true;
  // Number of smoothing draws compared when forming the output weights.
  Index noise_candidates = 1;
  // Evaluate the test loss after every outer iteration (else only the last).
  bool eval_every_outer = true;
  std::uint64_t seed = 0;
  Preset preset = Preset::Practical;
};

void validate(const TrainConfig& cfg);

/// Parameter choices derived from the theory: lambda_v = 2 eps0 m2 / m1^0.99,
/// lambda_w = 2 eps0 m1^2.998 / C0^4, sigma_w = m1^-0.99, sigma_v = m2^-0.51,
/// sign dropout.
TrainConfig theory_preset(Index m1, Index m2, double eps0, double C0);

/// Desk-scale choices: lambda_w = lambda_v = 1e-4, no smoothing, inverted
/// Bernoulli dropout with rate 0.4 in the Sigma position.
TrainConfig practical_preset();

// lambda_t = (1 - eta)^t, evaluated in closed form.
struct DecaySchedule {
  double eta = 0.0;
  double lambda(Index t) const;
};

struct TrainReport {
  std::vector<Index> t;
  std::vector<double> lambda;
  std::vector<double> train_loss;  // mean mini-batch data loss of the outer iteration
  std::vector<double> test_loss;   // NaN when not evaluated
  Matrix w_out;
  Matrix v_out;
  double initial_test_loss = 0.0;
  double final_test_loss = 0.0;
  double wall_seconds = 0.0;

  // Columns t,lambda_t,train_loss,test_loss; wall time is not written so the
  // file is a pure function of the inputs.
  void write_csv(std::ostream& out) const;
};

struct TrainResult3 {
  GcnParams3 params;
  TrainReport report;
};

struct TrainResult2 {
  GcnParams2 params;
  TrainReport report;
};

/// Two-layer SGD: T * T_w steps, each on a fresh mini-batch and a fresh A^s
/// drawn from `plan`. Only W moves; lambda stays 1. One report row per block
/// of T_w steps.
TrainResult2 train_two_layer(const NormalizedAdjacency& a, const DegreeGrouping& grouping, const SamplingPlan& plan,
                             const Matrix& X, const Matrix& labels, std::span<const NodeId> omega,
                             std::span<const NodeId> test, GcnParams2 init, const TrainConfig& cfg);

/// Weight-decayed noisy SGD for the three-layer network. Each inner step draws
/// a mini-batch of omega, three sampled adjacencies and fresh noise, then
/// takes one step on the regularized objective at fixed lambda_t. After each
/// outer iteration lambda decays by (1 - eta). Test losses use A* of the plan.
TrainResult3 train_three_layer(const NormalizedAdjacency& a, const DegreeGrouping& grouping,
                               const SamplingPlan& plan, const Matrix& X, const Matrix& labels,
                               std::span<const NodeId> omega, std::span<const NodeId> test, GcnParams3 init,
                               const TrainConfig& cfg);

/// Index of the smallest eval_fn(j) over j < count; ties go to the lowest index.
Index select_best_noise(Index count, const std::function<double(Index)>& eval_fn);

/// Loss on `idx` with all three layers set to `astar`, no noise and the given
/// effective weights (lambda already folded in).
double evaluate(const GcnParams3& p, const Matrix& w_eff, const Matrix& v_eff, const ScaledCsr& astar,
                const Matrix& X, const Matrix& labels, std::span<const NodeId> idx);

double evaluate2(const GcnParams2& p, const ScaledCsr& a, const Matrix& X, const Matrix& labels,
                 std::span<const NodeId> idx);

}  // namespace gcnsamp
