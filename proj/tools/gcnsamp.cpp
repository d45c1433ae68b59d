// Command-line front end: graph and data generation, training, sweeps,
// sampling verification, complexity constants and plotting.
//
// Exit codes: 0 success, 1 configuration or input error, 2 numerical abort.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gcnsamp/complexity.hpp"
#include "gcnsamp/experiments.hpp"
#include "gcnsamp/svg.hpp"

namespace fs = std::filesystem;
using namespace gcnsamp;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

std::string csv_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

// Graph plus grouping as seen by file-based subcommands. Per-group vectors on
// the command line follow the grouping order (ascending degree).
struct LoadedGraph {
  RawGraph raw;
  NormalizedAdjacency a;
  DegreeGrouping grouping;
};

LoadedGraph load_graph(const std::string& edges, const std::string& grouping_file, Index groups) {
  LoadedGraph g;
  auto in = open_in(edges);
  g.raw = read_edge_list(in);
  g.a = build_normalized_adjacency(g.raw);
  if (!grouping_file.empty()) {
    auto gin = open_in(grouping_file);
    const auto labels = read_grouping_labels(gin, g.raw.n_nodes);
    g.grouping = grouping_from_labels(g.raw, labels);
  } else {
    g.grouping = group_by_degree(g.raw, groups);
  }
  return g;
}

SamplingPlan plan_from_flags(const LoadedGraph& g, const std::string& strategy, std::vector<double> pstar,
                             std::vector<double> budget, Index layer_samples) {
  SamplingPlan plan;
  plan.strategy = parse_strategy(strategy);
  const Index L = g.grouping.groups();
  if (pstar.empty()) pstar.assign(static_cast<std::size_t>(L), 1.0);
  if (budget.empty()) budget.assign(static_cast<std::size_t>(L), 1.0);
  if (static_cast<Index>(pstar.size()) != L || static_cast<Index>(budget.size()) != L)
    throw ConfigError("--pstar and --budget need " + std::to_string(L) + " values");
  plan.pstar = pstar;
  plan.budget = budget_from_fractions(g.grouping, budget);
  plan.layer_samples = layer_samples > 0 ? layer_samples : g.a.n();
  validate_plan(g.grouping, plan);
  return plan;
}

struct PlanFlags {
  std::string strategy = "asymmetric";
  std::vector<double> pstar;
  std::vector<double> budget;
  Index layer_samples = 0;

  void attach(CLI::App* app) {
    app->add_option("--plan", strategy, "Sampling strategy: asymmetric (ours), symmetric, fastgcn");
    app->add_option("--pstar", pstar, "Per-group scale factors p*_l, ascending-degree order")->delimiter(',');
    app->add_option("--budget", budget, "Per-group sampled fractions S_l/N_l")->delimiter(',');
    app->add_option("--layer-samples", layer_samples, "FastGCN samples per layer (default N)");
  }
};

int cmd_gen_graph(Index n1, Index n2, double d1, double d2, std::uint64_t seed, const std::string& out,
                  const std::string& grouping_out) {
  GraphSpec spec{"graph", n1, n2, d1, d2};
  const GraphBundle g = build_graph(spec, seed);
  auto o = open_out(out);
  write_edge_list(g.raw, o);
  if (!grouping_out.empty()) {
    auto go = open_out(grouping_out);
    write_grouping_csv(g.raw, g.grouping, go);
  }
  std::cout << "nodes,edges,a_inf,group_sizes,group_degrees\n"
            << g.raw.n_nodes << ',' << g.raw.edges.size() << ',' << format_double(g.a.inf_norm()) << ",\""
            << g.grouping.size(0) << ':' << g.grouping.size(1) << "\",\"" << format_double(g.grouping.degree_scale[0])
            << ':' << format_double(g.grouping.degree_scale[1]) << "\"\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph convolutional network training with graph topology sampling"};
  app.require_subcommand(1);

  // gen-graph
  Index n1 = 100, n2 = 1900, groups = 2;
  double d1 = 10, d2 = 1;
  std::uint64_t seed = 0;
  std::string out, grouping_out;
  auto* gen_graph = app.add_subcommand("gen-graph", "Generate a two-group random graph as an edge list");
  gen_graph->add_option("--n1", n1, "Nodes in group 1 (target degree d1)");
  gen_graph->add_option("--n2", n2, "Nodes in group 2 (target degree d2)");
  gen_graph->add_option("--d1", d1, "Target degree of group 1");
  gen_graph->add_option("--d2", d2, "Target degree of group 2");
  gen_graph->add_option("--seed", seed, "Random seed");
  gen_graph->add_option("--out", out, "Edge-list output path")->required();
  gen_graph->add_option("--grouping", grouping_out, "Write node,group,degree CSV here");

  // gen-data
  std::string graph_path, grouping_path, data_dir;
  std::vector<double> phat;
  Index d = 10, p = 10, k = 2, n_train = 1500, n_test = 0;
  bool normalize = false;
  auto* gen_data = app.add_subcommand("gen-data", "Generate features, labels and a train/test split");
  gen_data->add_option("--graph", graph_path, "Edge-list file")->required();
  gen_data->add_option("--grouping", grouping_path, "Grouping CSV (default: cluster degrees)");
  gen_data->add_option("--groups", groups, "Number of degree groups when clustering");
  gen_data->add_option("--phat", phat, "Per-group label scales p-hat, ascending-degree order")->delimiter(',');
  gen_data->add_option("--d", d, "Feature width");
  gen_data->add_option("--p", p, "Target hidden width");
  gen_data->add_option("--k", k, "Output width");
  gen_data->add_option("--n-train", n_train, "Labeled nodes");
  gen_data->add_option("--n-test", n_test, "Test nodes (0: all remaining)");
  gen_data->add_flag("--normalize", normalize, "Scale feature rows to unit norm");
  gen_data->add_option("--seed", seed, "Random seed");
  gen_data->add_option("--out", data_dir, "Output directory for X.csv, Y.csv, split.csv")->required();

  // train
  std::string arch = "3layer", preset = "practical", report_path, checkpoint_path;
  double eta = 1e-3, eps0 = 0.1, c0 = 1.0;
  Index T = 20, Tw = 300, batch = 5, width = 100;
  PlanFlags train_plan;
  auto* train = app.add_subcommand("train", "Train a two- or three-layer network on a generated dataset");
  train->add_option("--graph", graph_path, "Edge-list file")->required();
  train->add_option("--grouping", grouping_path, "Grouping CSV (default: cluster degrees)");
  train->add_option("--groups", groups, "Number of degree groups when clustering");
  train->add_option("--data", data_dir, "Directory with X.csv, Y.csv, split.csv")->required();
  train->add_option("--arch", arch, "2layer or 3layer")->check(CLI::IsMember({"2layer", "3layer"}));
  train_plan.attach(train);
  train->add_option("--preset", preset, "theory or practical")->check(CLI::IsMember({"theory", "practical"}));
  train->add_option("--eps0", eps0, "Target accuracy knob (theory preset)");
  train->add_option("--c0", c0, "Constant C0 (theory preset)");
  train->add_option("--eta", eta, "Step size");
  train->add_option("--T", T, "Outer iterations");
  train->add_option("--Tw", Tw, "Inner iterations per outer iteration");
  train->add_option("--batch", batch, "Mini-batch size");
  train->add_option("--width", width, "Hidden width m (m1 = m2 = m)");
  train->add_option("--seed", seed, "Random seed");
  train->add_option("--out", report_path, "Report CSV (t,lambda_t,train_loss,test_loss)");
  train->add_option("--checkpoint", checkpoint_path, "Write the trained three-layer parameters here");

  // sweep
  std::string config_path, sweep_dir;
  int jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Run a resumable experiment sweep from a config file");
  sweep->add_option("--config", config_path, "key = value experiment config")->required();
  sweep->add_option("--out", sweep_dir, "Output directory")->required();
  sweep->add_option("--jobs", jobs, "Cells run in parallel");

  // verify-sampling
  PlanFlags vplan;
  Index trials = 1000;
  double eps_poly = 0.1, c1 = 1.0;
  auto* verify = app.add_subcommand("verify-sampling", "Check a plan's admissibility and measure its deviation");
  verify->add_option("--graph", graph_path, "Edge-list file")->required();
  verify->add_option("--grouping", grouping_path, "Grouping CSV (default: cluster degrees)");
  verify->add_option("--groups", groups, "Number of degree groups when clustering");
  vplan.attach(verify);
  verify->add_option("--trials", trials, "Monte-Carlo draws");
  verify->add_option("--eps-poly", eps_poly, "Accuracy knob of the budget check");
  verify->add_option("--c1", c1, "Constant of the bound checks");
  verify->add_option("--seed", seed, "Random seed");

  // complexity
  std::string phi = "sin";
  std::vector<double> poly;
  double R = 1.0, eps = 0.1, cstar = 1.0;
  auto* complexity = app.add_subcommand("complexity", "Function complexity sums of an activation");
  complexity->add_option("--phi", phi, "sin, cos, exp, tanh, identity");
  complexity->add_option("--poly", poly, "Polynomial coefficients c_0,c_1,... (overrides --phi)")->delimiter(',');
  complexity->add_option("--R", R, "Radius R");
  complexity->add_option("--eps", eps, "Accuracy eps in (0, 1)");
  complexity->add_option("--cstar", cstar, "Constant C*");

  // plot
  std::string plot_in, plot_out, x_col = "x", y_col = "mean", title;
  std::vector<std::string> series_cols{"series"};
  auto* plot = app.add_subcommand("plot", "Render a summary CSV as an SVG line chart");
  plot->add_option("--in", plot_in, "Input CSV")->required();
  plot->add_option("--out", plot_out, "Output SVG")->required();
  plot->add_option("--x", x_col, "x column");
  plot->add_option("--y", y_col, "y column");
  plot->add_option("--series", series_cols, "Columns naming a series")->delimiter(',');
  plot->add_option("--title", title, "Chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen_graph->parsed()) return cmd_gen_graph(n1, n2, d1, d2, seed, out, grouping_out);

    if (gen_data->parsed()) {
      const LoadedGraph g = load_graph(graph_path, grouping_path, groups);
      if (phat.empty()) phat.assign(static_cast<std::size_t>(g.grouping.groups()), 1.0);
      const Index n = g.a.n();
      const CsrMatrix ahat = gen_ahat(g.a, g.grouping, phat);
      const Matrix X = gen_features(n, d, derive_seed(seed, 1), normalize);
      const Matrix Y = gen_labels(ahat, X, gen_label_target(d, p, k, derive_seed(seed, 2)));
      const Split s = split_nodes(n, n_train, n_test > 0 ? n_test : n - n_train, derive_seed(seed, 3));
      fs::create_directories(data_dir);
      auto xo = open_out((fs::path(data_dir) / "X.csv").string());
      write_matrix_csv(X, xo);
      auto yo = open_out((fs::path(data_dir) / "Y.csv").string());
      write_matrix_csv(Y, yo);
      auto so = open_out((fs::path(data_dir) / "split.csv").string());
      write_split_csv(s, so);
      std::cout << "nodes,train,test,phat\n" << n << ',' << s.omega.size() << ',' << s.test.size() << ",\""
                << csv_list(phat) << "\"\n";
      return 0;
    }

    if (train->parsed()) {
      const LoadedGraph g = load_graph(graph_path, grouping_path, groups);
      auto xin = open_in((fs::path(data_dir) / "X.csv").string());
      const Matrix X = read_matrix_csv(xin);
      auto yin = open_in((fs::path(data_dir) / "Y.csv").string());
      const Matrix Y = read_matrix_csv(yin);
      auto sin = open_in((fs::path(data_dir) / "split.csv").string());
      const Split s = read_split_csv(sin, g.a.n());
      const SamplingPlan plan = plan_from_flags(g, train_plan.strategy, train_plan.pstar, train_plan.budget,
                                                train_plan.layer_samples);
      TrainConfig cfg = parse_preset(preset) == Preset::Theory ? theory_preset(width, width, eps0, c0)
                                                                : practical_preset();
      cfg.eta = eta;
      cfg.T = T;
      cfg.T_w = Tw;
      cfg.batch = batch;
      cfg.seed = derive_seed(seed, 5);
      TrainReport report;
      if (arch == "2layer") {
        auto res = train_two_layer(g.a, g.grouping, plan, X, Y, s.omega, s.test,
                                   init_params2(X.cols(), width, g.a.n(), Y.cols(), 1.0, derive_seed(seed, 4)), cfg);
        report = std::move(res.report);
      } else {
        auto res = train_three_layer(g.a, g.grouping, plan, X, Y, s.omega, s.test,
                                     init_params3(X.cols(), width, width, g.a.n(), Y.cols(), derive_seed(seed, 4)),
                                     cfg);
        report = std::move(res.report);
        if (!checkpoint_path.empty()) {
          auto co = open_out(checkpoint_path);
          save_checkpoint(res.params, co);
        }
      }
      if (!report_path.empty()) {
        auto ro = open_out(report_path);
        report.write_csv(ro);
      }
      std::cout << "initial_test_loss,final_test_loss,wall_seconds\n"
                << format_double(report.initial_test_loss) << ',' << format_double(report.final_test_loss) << ','
                << report.wall_seconds << '\n';
      return 0;
    }

    if (sweep->parsed()) {
      auto in = open_in(config_path);
      const ExperimentConfig cfg = parse_experiment_config(KeyValueConfig::parse(in));
      const SweepResult r = run_sweep(cfg, {sweep_dir, jobs, &std::cerr});
      std::cerr << "computed " << r.computed << " cells, reused " << r.reused << '\n';
      write_csv(r.summary, std::cout);
      return 0;
    }

    if (verify->parsed()) {
      const LoadedGraph g = load_graph(graph_path, grouping_path, groups);
      const SamplingPlan plan = plan_from_flags(g, vplan.strategy, vplan.pstar, vplan.budget, vplan.layer_samples);
      const bool symmetric = plan.strategy == Strategy::Symmetric;
      const Index L = g.grouping.groups();
      std::cout << "check,group,value,threshold,pass\n";
      if (plan.strategy != Strategy::FastGcn) {
        const auto ps = psi(g.grouping);
        const GroupCheck bound = check_pstar_bound(plan.pstar, ps, L, c1, symmetric);
        std::vector<Index> sizes;
        for (Index l = 0; l < L; ++l) sizes.push_back(g.grouping.size(l));
        const GroupCheck budget = check_sample_budget(plan.budget, sizes, plan.pstar, ps, L, c1, eps_poly, symmetric);
        for (Index l = 0; l < L; ++l) {
          const auto u = static_cast<std::size_t>(l);
          std::cout << "psi," << l << ',' << format_double(ps[u]) << ",,\n";
          std::cout << "pstar_bound," << l << ',' << format_double(plan.pstar[u]) << ','
                    << format_double(bound.threshold[u]) << ',' << (bound.pass[u] ? "pass" : "fail") << '\n';
          std::cout << "sample_budget," << l << ',' << format_double(double(plan.budget[u]) / double(sizes[u])) << ','
                    << format_double(budget.threshold[u]) << ',' << (budget.pass[u] ? "pass" : "fail") << '\n';
        }
        for (const auto& w : budget.warnings) std::cerr << "warning: " << w << '\n';
      }
      const EffectiveAdjacency astar = effective_adjacency(g.a, g.grouping, plan);
      const DeviationStats st = estimate_sampling_deviation(g.a, g.grouping, plan, trials, seed);
      const double limit = eps_poly * astar.inf_norm;
      std::cout << "astar_inf,all," << format_double(astar.inf_norm) << ",,\n";
      std::cout << "mean_deviation,all," << format_double(st.mean) << ',' << format_double(limit) << ','
                << (st.mean <= limit ? "pass" : "fail") << '\n';
      std::cout << "max_deviation,all," << format_double(st.max) << ",,\n";
      return 0;
    }

    if (complexity->parsed()) {
      const PowerSeries s = poly.empty() ? builtin_series(phi) : polynomial_series(poly);
      const double ce = c_eps(s, R, eps, cstar);
      const double cs = c_s(s, R, cstar);
      std::cout << "phi,R,eps,cstar,c_eps,c_s\n"
                << s.name << ',' << format_double(R) << ',' << format_double(eps) << ',' << format_double(cstar) << ','
                << format_double(ce) << ',' << format_double(cs) << '\n';
      return 0;
    }

    if (plot->parsed()) {
      auto in = open_in(plot_in);
      const CsvTable t = read_csv(in);
      const SvgChart chart = chart_from_table(t, x_col, y_col, series_cols, title);
      auto o = open_out(plot_out);
      o << render_svg(chart);
      return 0;
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
