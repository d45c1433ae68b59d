#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gcnsamp/config.hpp"
#include "gcnsamp/csv.hpp"
#include "gcnsamp/synth.hpp"
#include "gcnsamp/train.hpp"

namespace gcnsamp {

enum class ExperimentKind { SampleComplexity, WidthSweep, AstarMatch, SamplingDeviation };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& name);

/// Two-group graph. Group "1" is nodes [0, n1) with target degree d1, group
/// "2" the remaining n2 nodes with target degree d2. Per-group vectors in
/// configs (pstar, phat, budget fractions) list group 1 first.
struct GraphSpec {
  std::string name;
  Index n1 = 100;
  Index n2 = 1900;
  double d1 = 10.0;
  double d2 = 1.0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::SampleComplexity;
  std::vector<GraphSpec> graphs;
  std::uint64_t graph_seed = 0;
  std::vector<double> pstar{0.7, 0.3};
  std::vector<double> budget_fraction{0.9, 0.9};

  // Data.
  Index d = 10;
  Index p = 10;
  Index k = 2;
  bool normalize_features = false;
  std::vector<Index> omega{300, 900, 1500};
  Index n_test = 0;  // 0: every unlabeled node

  // Network and training.
  std::vector<Index> widths{500};
  Preset preset = Preset::Practical;
  double eta = 1e-3;
  Index batch = 5;
  double dropout = 0.4;
  double iters_per_label = 4.0;  // T * T_w = iters_per_label * |omega|
  Index outer = 20;              // T
  double lambda_w = 1e-4;
  double lambda_v = 1e-4;
  double eps0 = 0.1;
  double c0 = 1.0;

  // astar_match: label datasets (per-group phat) and samplers.
  std::vector<std::vector<double>> datasets;
  std::vector<std::string> samplers{"ours"};
  double fastgcn_fraction = 0.9;

  // sampling_deviation.
  std::vector<std::string> strategies{"asymmetric"};
  std::vector<double> fractions{0.5, 0.7, 0.9, 1.0};
  Index trials = 1000;

  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
};

/// Recognized keys: experiment, graphs (name:n1:n2:d1:d2, comma separated),
/// graph_seed, pstar, budget_fraction, d, p, k, normalize_features, omega,
/// n_test, widths, preset, eta, batch, dropout, iters_per_label, outer,
/// lambda_w, lambda_v, eps0, c0, datasets (p1:p2, comma separated), samplers,
/// fastgcn_fraction, strategies, fractions, trials, seeds. Unknown keys are
/// an error.
ExperimentConfig parse_experiment_config(const KeyValueConfig& kv);

/// One unit of work of a sweep. `key` identifies everything except the seed.
struct CellSpec {
  std::string key;
  std::uint64_t seed = 0;
  std::size_t graph = 0;
  double x = 0.0;  // |omega|, width or budget fraction
  std::size_t dataset = 0;
  std::string sampler;
};

/// One row of cells.csv. Values are kept as text so that resumed cells are
/// re-emitted byte for byte.
struct CellRecord {
  std::string key;
  std::uint64_t seed = 0;
  std::string series;
  std::string astar_inf;
  std::string x;
  std::string dataset;
  std::string sampler;
  std::string value;     // final test loss, or mean deviation
  std::string baseline;  // initial test loss, or max deviation
  std::string status;    // ok | diverged
};

std::vector<CellSpec> enumerate_cells(const ExperimentConfig& cfg);
CellRecord run_cell(const ExperimentConfig& cfg, const CellSpec& cell);

struct SweepOptions {
  std::string output_dir;  // empty: keep everything in memory
  int jobs = 1;
  std::ostream* log = nullptr;
};

struct SweepResult {
  std::vector<CellRecord> cells;  // canonical order
  CsvTable summary;
  CsvTable argmin;  // astar_match only
  std::size_t computed = 0;
  std::size_t reused = 0;
};

/// Runs every cell not already present in <output_dir>/cells.csv, then
/// rewrites cells.csv, summary.csv and (astar_match) argmin.csv in canonical
/// order. Output is a pure function of the config and seeds.
SweepResult run_sweep(const ExperimentConfig& cfg, const SweepOptions& opt);

// Column layouts of the written files.
extern const std::vector<std::string> kCellColumns;
CsvTable cells_table(const std::vector<CellRecord>& cells);
CsvTable summarize(const ExperimentConfig& cfg, const std::vector<CellRecord>& cells);
CsvTable argmin_table(const ExperimentConfig& cfg, const std::vector<CellRecord>& cells);

std::uint64_t fnv1a64(const std::string& text);

// Graph, grouping and plan helpers shared by the CLI.
struct GraphBundle {
  RawGraph raw;
  NormalizedAdjacency a;
  DegreeGrouping grouping;
  std::vector<int> group_of_label;  // label 0 = group "1", label 1 = group "2"
};

GraphBundle build_graph(const GraphSpec& spec, std::uint64_t seed);
// Reorders a per-label vector (group "1" first) into grouping order.
std::vector<double> to_group_order(const GraphBundle& g, std::span<const double> per_label);
SamplingPlan make_plan(const GraphBundle& g, const std::string& sampler, std::span<const double> pstar,
                       std::span<const double> budget_fraction, double fastgcn_fraction);

}  // namespace gcnsamp
