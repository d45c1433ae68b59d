#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <random>

#include "gcnsamp/kernels.hpp"
#include "gcnsamp/model.hpp"
#include "gcnsamp/sampling.hpp"

using namespace gcnsamp;

namespace {

struct Fixture {
  RawGraph raw;
  NormalizedAdjacency a;
  DegreeGrouping g;
};

// One graph per node count, built on first use.
const Fixture& fixture(Index n) {
  static std::map<Index, std::unique_ptr<Fixture>> cache;
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<Fixture>();
    const Index n1 = n / 20;
    slot->raw = generate_two_group_graph(n1, n - n1, 10, 2, 1);
    slot->a = build_normalized_adjacency(slot->raw);
    std::vector<int> labels(static_cast<std::size_t>(n), 1);
    std::fill(labels.begin(), labels.begin() + n1, 0);
    slot->g = grouping_from_labels(slot->raw, labels);
  }
  return *slot;
}

Matrix dense_input(Index rows, Index cols) {
  Rng rng(7);
  std::normal_distribution<double> nd;
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
  return m;
}

template <void (*Kernel)(const CsrMatrix&, const Matrix&, Matrix&)>
void BM_SpmmKernel(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  const Matrix b = dense_input(f.a.n(), state.range(1));
  Matrix out;
  for (auto _ : state) {
    Kernel(f.a.matrix, b, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.a.matrix.nnz()) * state.range(1));
}

template <void (*Kernel)(const Matrix&, Matrix&)>
void BM_ReluKernel(benchmark::State& state) {
  const Matrix x = dense_input(state.range(0), state.range(1));
  Matrix out;
  for (auto _ : state) {
    Kernel(x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}

// One three-layer forward over a 5-node batch, full A versus a 50% sample.
void BM_BatchForward(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  const bool sampled = state.range(1) != 0;
  const Matrix X = dense_input(f.a.n(), 10);
  const GcnParams3 p = init_params3(10, 200, 200, f.a.n(), 2, 3);
  SamplingPlan plan;
  plan.pstar = {1.0, 1.0};
  plan.budget = budget_from_fractions(f.g, std::vector<double>{sampled ? 0.5 : 1.0, sampled ? 0.5 : 1.0});
  Rng rng(11);
  const std::vector<NodeId> batch{1, 50, 300, 700, 1500};
  for (auto _ : state) {
    const auto s1 = sample(f.a, f.g, plan, rng), s2 = sample(f.a, f.g, plan, rng), s3 = sample(f.a, f.g, plan, rng);
    const ScaledCsr* ops[] = {&s3.op, &s2.op, &s1.op};
    const ComputeGraph cg = build_compute_graph(ops, batch);
    benchmark::DoNotOptimize(forward3(cg, X, p, nullptr, 1.0).data());
  }
}

void spmm_args(benchmark::internal::Benchmark* b) {
  for (Index n : {2000, 20000})
    for (Index w : {16, 128}) b->Args({n, w});
}

}  // namespace

BENCHMARK(BM_SpmmKernel<kernels::serial::spmm>)->Name("spmm/serial")->Apply(spmm_args);
BENCHMARK(BM_SpmmKernel<kernels::spmm>)->Name("spmm/openmp")->Apply(spmm_args);
BENCHMARK(BM_SpmmKernel<kernels::serial::spmm_transposed>)->Name("spmm_transposed/serial")->Apply(spmm_args);
BENCHMARK(BM_SpmmKernel<kernels::spmm_transposed>)->Name("spmm_transposed/openmp")->Apply(spmm_args);
BENCHMARK(BM_ReluKernel<kernels::serial::relu>)->Name("relu/serial")->Args({20000, 128});
BENCHMARK(BM_ReluKernel<kernels::relu>)->Name("relu/openmp")->Args({20000, 128});
BENCHMARK(BM_BatchForward)->Name("forward3_batch5")->Args({2000, 0})->Args({2000, 1});

BENCHMARK_MAIN();
