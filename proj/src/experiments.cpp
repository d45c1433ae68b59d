#include "gcnsamp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <omp.h>

namespace gcnsamp {

namespace fs = std::filesystem;

const std::vector<std::string> kCellColumns = {"key",     "seed",  "series",   "astar_inf", "x",
                                               "dataset", "sampler", "value", "baseline",  "status"};

namespace {

std::string join_doubles(std::span<const double> v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(sep);
    out += format_double(v[i]);
  }
  return out;
}

std::vector<double> parse_pair_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& f : split(text, ':')) out.push_back(parse_double(f));
  return out;
}

GraphSpec parse_graph_spec(const std::string& text) {
  const auto f = split(text, ':');
  if (f.size() != 5) throw ConfigError("graph spec must be name:n1:n2:d1:d2, got '" + text + "'");
  GraphSpec g;
  g.name = f[0];
  if (g.name.empty()) throw ConfigError("graph spec needs a name");
  g.n1 = parse_int(f[1]);
  g.n2 = parse_int(f[2]);
  g.d1 = parse_double(f[3]);
  g.d2 = parse_double(f[4]);
  return g;
}

std::string describe(const GraphSpec& g) {
  return g.name + ":" + std::to_string(g.n1) + ":" + std::to_string(g.n2) + ":" + format_double(g.d1) + ":" +
         format_double(g.d2);
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 15];
  return s;
}

bool is_training(ExperimentKind k) { return k != ExperimentKind::SamplingDeviation; }

std::string cell_description(const ExperimentConfig& cfg, std::size_t graph, double x, std::size_t dataset,
                             const std::string& sampler) {
  std::ostringstream s;
  s << "experiment=" << to_string(cfg.kind) << ";graph=" << describe(cfg.graphs[graph])
    << ";graph_seed=" << cfg.graph_seed << ";pstar=" << join_doubles(cfg.pstar, ':')
    << ";budget=" << join_doubles(cfg.budget_fraction, ':') << ";x=" << format_double(x) << ";sampler=" << sampler;
  if (is_training(cfg.kind)) {
    s << ";d=" << cfg.d << ";p=" << cfg.p << ";k=" << cfg.k << ";normalize=" << cfg.normalize_features
      << ";omega=" << cfg.omega.front() << ";width=" << cfg.widths.front() << ";n_test=" << cfg.n_test
      << ";preset=" << to_string(cfg.preset) << ";eta=" << format_double(cfg.eta) << ";batch=" << cfg.batch
      << ";dropout=" << format_double(cfg.dropout) << ";iters_per_label=" << format_double(cfg.iters_per_label)
      << ";outer=" << cfg.outer << ";lambda_w=" << format_double(cfg.lambda_w)
      << ";lambda_v=" << format_double(cfg.lambda_v) << ";eps0=" << format_double(cfg.eps0)
      << ";c0=" << format_double(cfg.c0) << ";fastgcn_fraction=" << format_double(cfg.fastgcn_fraction);
    if (cfg.kind == ExperimentKind::AstarMatch) s << ";phat=" << join_doubles(cfg.datasets[dataset], ':');
  } else {
    s << ";trials=" << cfg.trials;
  }
  return s.str();
}

std::string dataset_label(const ExperimentConfig& cfg, std::size_t dataset) {
  return cfg.kind == ExperimentKind::AstarMatch ? join_doubles(cfg.datasets[dataset], ':') : "";
}

struct Stats {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std = 0.0;
  std::size_t n = 0;
};

Stats stats_of(const std::vector<double>& v) {
  Stats s;
  std::vector<double> finite;
  for (double x : v)
    if (std::isfinite(x)) finite.push_back(x);
  s.n = finite.size();
  if (finite.empty()) return s;
  s.mean = std::accumulate(finite.begin(), finite.end(), 0.0) / double(finite.size());
  if (finite.size() > 1) {
    double ss = 0.0;
    for (double x : finite) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / double(finite.size() - 1));
  }
  return s;
}

std::map<std::pair<std::string, std::uint64_t>, CellRecord> read_existing(const fs::path& path) {
  std::map<std::pair<std::string, std::uint64_t>, CellRecord> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  if (!std::getline(in, line)) return out;
  const auto header = split_csv_line(line);
  if (header != kCellColumns) throw ConfigError("existing cells.csv has an unexpected header: " + path.string());
  while (std::getline(in, line)) {
    const auto f = split_csv_line(line);
    // A partially written last line is ignored and recomputed.
    if (f.size() != kCellColumns.size() || f.back().empty()) continue;
    CellRecord r{f[0], static_cast<std::uint64_t>(parse_int(f[1])), f[2], f[3], f[4], f[5], f[6], f[7], f[8], f[9]};
    out[{r.key, r.seed}] = r;
  }
  return out;
}

std::vector<std::string> record_fields(const CellRecord& r) {
  return {r.key, std::to_string(r.seed), r.series, r.astar_inf, r.x, r.dataset, r.sampler, r.value, r.baseline,
          r.status};
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << content;
    if (!out) throw ConfigError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string table_text(const CsvTable& t) {
  std::ostringstream s;
  write_csv(t, s);
  return s.str();
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::SampleComplexity:
      return "sample_complexity";
    case ExperimentKind::WidthSweep:
      return "width_sweep";
    case ExperimentKind::AstarMatch:
      return "astar_match";
    case ExperimentKind::SamplingDeviation:
      return "sampling_deviation";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto k : {ExperimentKind::SampleComplexity, ExperimentKind::WidthSweep, ExperimentKind::AstarMatch,
                 ExperimentKind::SamplingDeviation})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown experiment: " + name);
}

ExperimentConfig parse_experiment_config(const KeyValueConfig& kv) {
  ExperimentConfig c;
  c.kind = parse_experiment_kind(kv.get("experiment"));
  for (const auto& g : kv.get_list("graphs")) c.graphs.push_back(parse_graph_spec(g));
  c.graph_seed = static_cast<std::uint64_t>(kv.get_int("graph_seed", 0));
  c.pstar = kv.get_doubles("pstar", c.pstar);
  c.budget_fraction = kv.get_doubles("budget_fraction", c.budget_fraction);
  c.d = kv.get_int("d", c.d);
  c.p = kv.get_int("p", c.p);
  c.k = kv.get_int("k", c.k);
  c.normalize_features = kv.get_bool("normalize_features", c.normalize_features);
  c.omega = kv.get_ints("omega", c.omega);
  c.n_test = kv.get_int("n_test", c.n_test);
  c.widths = kv.get_ints("widths", c.widths);
  c.preset = parse_preset(kv.get("preset", to_string(c.preset)));
  c.eta = kv.get_double("eta", c.eta);
  c.batch = kv.get_int("batch", c.batch);
  c.dropout = kv.get_double("dropout", c.dropout);
  c.iters_per_label = kv.get_double("iters_per_label", c.iters_per_label);
  c.outer = kv.get_int("outer", c.outer);
  c.lambda_w = kv.get_double("lambda_w", c.lambda_w);
  c.lambda_v = kv.get_double("lambda_v", c.lambda_v);
  c.eps0 = kv.get_double("eps0", c.eps0);
  c.c0 = kv.get_double("c0", c.c0);
  for (const auto& ds : kv.get_list("datasets")) c.datasets.push_back(parse_pair_list(ds));
  if (kv.has("samplers")) c.samplers = kv.get_list("samplers");
  c.fastgcn_fraction = kv.get_double("fastgcn_fraction", c.fastgcn_fraction);
  if (kv.has("strategies")) c.strategies = kv.get_list("strategies");
  c.fractions = kv.get_doubles("fractions", c.fractions);
  c.trials = kv.get_int("trials", c.trials);
  if (kv.has("seeds")) {
    c.seeds.clear();
    for (Index s : kv.get_ints("seeds", {})) {
      if (s < 0) throw ConfigError("seeds must be non-negative");
      c.seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }
  const auto unused = kv.unused_keys();
  if (!unused.empty()) throw ConfigError("unknown config key: " + unused.front());

  if (c.graphs.empty()) throw ConfigError("config needs at least one graph");
  if (c.seeds.empty()) throw ConfigError("config needs at least one seed");
  if (c.pstar.size() != 2 || c.budget_fraction.size() != 2)
    throw ConfigError("pstar and budget_fraction need one value per group (2)");
  if (c.omega.empty() || c.widths.empty()) throw ConfigError("omega and widths must be non-empty");
  if (c.kind == ExperimentKind::AstarMatch) {
    if (c.datasets.empty()) throw ConfigError("astar_match needs datasets");
    for (const auto& ds : c.datasets)
      if (ds.size() != 2) throw ConfigError("each dataset needs two phat values");
    if (c.samplers.empty()) throw ConfigError("astar_match needs samplers");
  }
  if (c.kind == ExperimentKind::SamplingDeviation) {
    if (c.fractions.empty() || c.strategies.empty()) throw ConfigError("sampling_deviation needs fractions and strategies");
    if (c.trials < 1) throw ConfigError("trials must be at least 1");
  }
  if (!(c.iters_per_label > 0.0) || c.outer < 1) throw ConfigError("iters_per_label and outer must be positive");
  return c;
}

GraphBundle build_graph(const GraphSpec& spec, std::uint64_t seed) {
  GraphBundle b;
  b.raw = generate_two_group_graph(spec.n1, spec.n2, spec.d1, spec.d2, seed);
  b.a = build_normalized_adjacency(b.raw);
  std::vector<int> labels(static_cast<std::size_t>(spec.n1 + spec.n2), 1);
  std::fill(labels.begin(), labels.begin() + spec.n1, 0);
  b.grouping = grouping_from_labels(b.raw, labels, &b.group_of_label);
  return b;
}

std::vector<double> to_group_order(const GraphBundle& g, std::span<const double> per_label) {
  if (per_label.size() != g.group_of_label.size()) throw ConfigError("need one value per group");
  std::vector<double> out(per_label.size());
  for (std::size_t l = 0; l < per_label.size(); ++l) out[static_cast<std::size_t>(g.group_of_label[l])] = per_label[l];
  return out;
}

SamplingPlan make_plan(const GraphBundle& g, const std::string& sampler, std::span<const double> pstar,
                       std::span<const double> budget_fraction, double fastgcn_fraction) {
  SamplingPlan plan;
  plan.strategy = parse_strategy(sampler);
  plan.pstar = to_group_order(g, pstar);
  const auto fr = to_group_order(g, budget_fraction);
  plan.budget = budget_from_fractions(g.grouping, fr);
  if (plan.strategy == Strategy::FastGcn) {
    if (!(fastgcn_fraction > 0.0 && fastgcn_fraction <= 1.0)) throw ConfigError("fastgcn_fraction must lie in (0, 1]");
    plan.layer_samples = std::max<Index>(1, std::llround(fastgcn_fraction * double(g.a.n())));
  }
  validate_plan(g.grouping, plan);
  return plan;
}

std::vector<CellSpec> enumerate_cells(const ExperimentConfig& cfg) {
  std::vector<CellSpec> cells;
  auto add = [&](std::size_t graph, double x, std::size_t dataset, const std::string& sampler) {
    const std::string key = hex64(fnv1a64(cell_description(cfg, graph, x, dataset, sampler)));
    for (std::uint64_t seed : cfg.seeds) cells.push_back({key, seed, graph, x, dataset, sampler});
  };
  for (std::size_t g = 0; g < cfg.graphs.size(); ++g) {
    switch (cfg.kind) {
      case ExperimentKind::SampleComplexity:
        for (const auto& s : cfg.samplers)
          for (Index o : cfg.omega) add(g, double(o), 0, s);
        break;
      case ExperimentKind::WidthSweep:
        for (const auto& s : cfg.samplers)
          for (Index m : cfg.widths) add(g, double(m), 0, s);
        break;
      case ExperimentKind::AstarMatch:
        for (const auto& s : cfg.samplers)
          for (std::size_t ds = 0; ds < cfg.datasets.size(); ++ds) add(g, 0.0, ds, s);
        break;
      case ExperimentKind::SamplingDeviation:
        for (const auto& s : cfg.strategies)
          for (double f : cfg.fractions) add(g, f, 0, s);
        break;
    }
  }
  return cells;
}

CellRecord run_cell(const ExperimentConfig& cfg, const CellSpec& cell) {
  const GraphSpec& gs = cfg.graphs.at(cell.graph);
  const GraphBundle gb = build_graph(gs, cfg.graph_seed);
  CellRecord r;
  r.key = cell.key;
  r.seed = cell.seed;
  r.series = gs.name;
  r.x = cfg.kind == ExperimentKind::AstarMatch ? "" : format_double(cell.x);
  r.dataset = dataset_label(cfg, cell.dataset);
  r.sampler = cell.sampler;
  r.status = "ok";

  if (cfg.kind == ExperimentKind::SamplingDeviation) {
    const double fr[2] = {cell.x, cell.x};
    const SamplingPlan plan = make_plan(gb, cell.sampler, cfg.pstar, fr, cell.x);
    const EffectiveAdjacency astar = effective_adjacency(gb.a, gb.grouping, plan);
    const DeviationStats st = estimate_sampling_deviation(gb.a, gb.grouping, plan, cfg.trials, cell.seed);
    r.astar_inf = format_double(astar.inf_norm);
    r.value = format_double(st.mean);
    r.baseline = format_double(st.max);
    return r;
  }

  const Index n = gs.n1 + gs.n2;
  const SamplingPlan plan = make_plan(gb, cell.sampler, cfg.pstar, cfg.budget_fraction, cfg.fastgcn_fraction);
  const EffectiveAdjacency astar = effective_adjacency(gb.a, gb.grouping, plan);
  r.astar_inf = format_double(astar.inf_norm);

  const std::vector<double>& phat = cfg.kind == ExperimentKind::AstarMatch ? cfg.datasets[cell.dataset] : cfg.pstar;
  const CsrMatrix ahat = gen_ahat(gb.a, gb.grouping, to_group_order(gb, phat));
  const Matrix X = gen_features(n, cfg.d, derive_seed(cell.seed, 1), cfg.normalize_features);
  const LabelTarget target = gen_label_target(cfg.d, cfg.p, cfg.k, derive_seed(cell.seed, 2));
  const Matrix Y = gen_labels(ahat, X, target);

  const Index n_omega = cfg.kind == ExperimentKind::SampleComplexity ? static_cast<Index>(cell.x) : cfg.omega.front();
  const Index width = cfg.kind == ExperimentKind::WidthSweep ? static_cast<Index>(cell.x) : cfg.widths.front();
  const Index n_test = cfg.n_test > 0 ? cfg.n_test : n - n_omega;
  const Split split = split_nodes(n, n_omega, n_test, derive_seed(cell.seed, 3));

  TrainConfig tc;
  if (cfg.preset == Preset::Theory) {
    tc = theory_preset(width, width, cfg.eps0, cfg.c0);
  } else {
    tc = practical_preset();
    tc.lambda_w = cfg.lambda_w;
    tc.lambda_v = cfg.lambda_v;
    tc.dropout_rate = cfg.dropout;
    if (cfg.dropout == 0.0) tc.dropout = DropoutKind::None;
  }
  tc.eta = cfg.eta;
  tc.batch = cfg.batch;
  tc.T = cfg.outer;
  const double total = cfg.iters_per_label * double(n_omega);
  tc.T_w = std::max<Index>(1, std::llround(total / double(cfg.outer)));
  tc.eval_every_outer = false;
  tc.seed = derive_seed(cell.seed, 5);

  GcnParams3 init = init_params3(cfg.d, width, width, n, cfg.k, derive_seed(cell.seed, 4));
  try {
    const TrainResult3 res = train_three_layer(gb.a, gb.grouping, plan, X, Y, split.omega, split.test,
                                               std::move(init), tc);
    r.value = format_double(res.report.final_test_loss);
    r.baseline = format_double(res.report.initial_test_loss);
  } catch (const NumericalError&) {
    r.value = "nan";
    r.baseline = "nan";
    r.status = "diverged";
  }
  return r;
}

CsvTable cells_table(const std::vector<CellRecord>& cells) {
  CsvTable t;
  t.header = kCellColumns;
  for (const auto& c : cells) t.rows.push_back(record_fields(c));
  return t;
}

CsvTable summarize(const ExperimentConfig& cfg, const std::vector<CellRecord>& cells) {
  // Cells arrive in canonical order; consecutive runs of one key form a group.
  CsvTable t;
  const bool astar = cfg.kind == ExperimentKind::AstarMatch;
  t.header = astar ? std::vector<std::string>{"series", "sampler", "dataset", "astar_inf", "mean", "std", "n"}
                   : std::vector<std::string>{"series", "sampler", "astar_inf", "x", "mean", "std", "n"};
  for (std::size_t i = 0; i < cells.size();) {
    std::size_t j = i;
    std::vector<double> values;
    while (j < cells.size() && cells[j].key == cells[i].key) values.push_back(parse_double(cells[j++].value));
    const Stats s = stats_of(values);
    const CellRecord& c = cells[i];
    if (astar)
      t.rows.push_back({c.series, c.sampler, c.dataset, c.astar_inf, format_double(s.mean), format_double(s.std),
                        std::to_string(s.n)});
    else
      t.rows.push_back({c.series, c.sampler, c.astar_inf, c.x, format_double(s.mean), format_double(s.std),
                        std::to_string(s.n)});
    i = j;
  }
  return t;
}

CsvTable argmin_table(const ExperimentConfig& cfg, const std::vector<CellRecord>& cells) {
  CsvTable t;
  t.header = {"series", "sampler", "seed", "argmin"};
  if (cfg.kind != ExperimentKind::AstarMatch) return t;
  // Group by (series, sampler) in first-appearance order.
  std::vector<std::pair<std::string, std::string>> groups;
  for (const auto& c : cells)
    if (std::find(groups.begin(), groups.end(), std::make_pair(c.series, c.sampler)) == groups.end())
      groups.emplace_back(c.series, c.sampler);
  for (const auto& [series, sampler] : groups) {
    std::vector<std::string> datasets;
    std::map<std::uint64_t, std::vector<double>> by_seed;
    std::map<std::string, std::vector<double>> by_dataset;
    for (const auto& c : cells) {
      if (c.series != series || c.sampler != sampler) continue;
      if (std::find(datasets.begin(), datasets.end(), c.dataset) == datasets.end()) datasets.push_back(c.dataset);
      by_dataset[c.dataset].push_back(parse_double(c.value));
    }
    auto best_of = [&](const std::function<double(std::size_t)>& value_of) {
      std::size_t best = 0;
      double bv = std::numeric_limits<double>::infinity();
      for (std::size_t d = 0; d < datasets.size(); ++d) {
        const double v = value_of(d);
        if (std::isfinite(v) && v < bv) {
          bv = v;
          best = d;
        }
      }
      return std::isfinite(bv) ? datasets[best] : std::string("none");
    };
    for (std::uint64_t seed : cfg.seeds) {
      auto value_of = [&](std::size_t d) {
        for (const auto& c : cells)
          if (c.series == series && c.sampler == sampler && c.dataset == datasets[d] && c.seed == seed)
            return parse_double(c.value);
        return std::numeric_limits<double>::quiet_NaN();
      };
      t.rows.push_back({series, sampler, std::to_string(seed), best_of(value_of)});
    }
    t.rows.push_back({series, sampler, "mean", best_of([&](std::size_t d) { return stats_of(by_dataset[datasets[d]]).mean; })});
  }
  return t;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const SweepOptions& opt) {
  const std::vector<CellSpec> specs = enumerate_cells(cfg);
  std::map<std::pair<std::string, std::uint64_t>, CellRecord> existing;
  fs::path cells_path;
  std::ofstream journal;
  if (!opt.output_dir.empty()) {
    fs::create_directories(opt.output_dir);
    cells_path = fs::path(opt.output_dir) / "cells.csv";
    existing = read_existing(cells_path);
    // Rewrite the journal with the reusable rows before appending new ones.
    std::vector<CellRecord> keep;
    for (const auto& s : specs) {
      const auto it = existing.find({s.key, s.seed});
      if (it != existing.end()) keep.push_back(it->second);
    }
    write_file_atomic(cells_path, table_text(cells_table(keep)));
    journal.open(cells_path, std::ios::app);
    if (!journal) throw ConfigError("cannot append to " + cells_path.string());
  }

  SweepResult result;
  result.cells.resize(specs.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto it = existing.find({specs[i].key, specs[i].seed});
    if (it != existing.end()) {
      result.cells[i] = it->second;
      ++result.reused;
    } else {
      pending.push_back(i);
    }
  }

  std::string first_error;
  std::size_t done = 0;
  const int jobs = std::max(1, opt.jobs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (std::size_t p = 0; p < pending.size(); ++p) {
    const std::size_t i = pending[p];
    try {
      CellRecord rec = run_cell(cfg, specs[i]);
#pragma omp critical(gcnsamp_sweep_io)
      {
        result.cells[i] = rec;
        ++done;
        if (journal.is_open()) {
          const auto f = record_fields(rec);
          for (std::size_t c = 0; c < f.size(); ++c) journal << (c ? "," : "") << f[c];
          journal << '\n' << std::flush;
        }
        if (opt.log)
          *opt.log << "[" << done << "/" << pending.size() << "] " << rec.series << " " << rec.sampler << " x=" << rec.x
                   << (rec.dataset.empty() ? "" : " phat=" + rec.dataset) << " seed=" << rec.seed
                   << " value=" << rec.value << '\n'
                   << std::flush;
      }
    } catch (const std::exception& e) {
#pragma omp critical(gcnsamp_sweep_io)
      if (first_error.empty()) first_error = e.what();
    }
  }
  result.computed = done;
  if (!first_error.empty()) throw ConfigError(first_error);

  result.summary = summarize(cfg, result.cells);
  result.argmin = argmin_table(cfg, result.cells);
  if (!opt.output_dir.empty()) {
    journal.close();
    write_file_atomic(cells_path, table_text(cells_table(result.cells)));
    write_file_atomic(fs::path(opt.output_dir) / "summary.csv", table_text(result.summary));
    if (cfg.kind == ExperimentKind::AstarMatch)
      write_file_atomic(fs::path(opt.output_dir) / "argmin.csv", table_text(result.argmin));
  }
  return result;
}

}  // namespace gcnsamp
