#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gcnsamp/experiments.hpp"
#include "gcnsamp/svg.hpp"

using namespace gcnsamp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("gcnsamp_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  return d;
}

ExperimentConfig tiny_training_config() {
  return parse_experiment_config(KeyValueConfig::parse_string(
      "experiment = sample_complexity\n"
      "graphs = small:20:60:6:2, wide:20:60:12:1\n"
      "omega = 20, 40\n"
      "widths = 8\n"
      "d = 4\np = 4\n"
      "iters_per_label = 1\nouter = 2\n"
      "seeds = 1, 2\n"));
}

ExperimentConfig tiny_deviation_config() {
  return parse_experiment_config(KeyValueConfig::parse_string(
      "experiment = sampling_deviation\n"
      "graphs = g:30:90:8:2\n"
      "strategies = asymmetric, symmetric\n"
      "fractions = 0.5, 1.0\n"
      "trials = 20\n"
      "seeds = 3\n"));
}

}  // namespace

TEST_CASE("key-value config") {
  const auto kv = KeyValueConfig::parse_string("# comment\n a = 1 \nb=x, y ,z # trailing\n\nflag = true\n");
  CHECK(kv.get_int("a", 0) == 1);
  CHECK(kv.get_list("b") == std::vector<std::string>{"x", "y", "z"});
  CHECK(kv.get_bool("flag", false));
  CHECK(kv.get_double("missing", 2.5) == 2.5);
  CHECK(kv.unused_keys().empty());
  CHECK_THROWS_AS(KeyValueConfig::parse_string("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse_string("no equals sign\n"), ConfigError);
  const auto bad = KeyValueConfig::parse_string("n = 1.5\nflag = maybe\n");
  CHECK_THROWS_AS(bad.get_int("n", 0), ConfigError);
  CHECK_THROWS_AS(bad.get_bool("flag", false), ConfigError);
  CHECK(trim("  x \t") == "x");
  CHECK(split("a:b::c", ':') == std::vector<std::string>{"a", "b", "", "c"});
}

TEST_CASE("experiment config parsing") {
  const auto c = tiny_training_config();
  CHECK(c.kind == ExperimentKind::SampleComplexity);
  REQUIRE(c.graphs.size() == 2);
  CHECK(c.graphs[1].name == "wide");
  CHECK(c.graphs[1].d1 == 12.0);
  CHECK(c.omega == std::vector<Index>{20, 40});
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK_THROWS_AS(parse_experiment_config(KeyValueConfig::parse_string("experiment = sample_complexity\n"
                                                                       "graphs = g:10:10:2:1\nbogus = 1\n")),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(KeyValueConfig::parse_string("experiment = nope\ngraphs = g:1:1:1:1\n")),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(KeyValueConfig::parse_string("experiment = width_sweep\ngraphs = g:1:1\n")),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(KeyValueConfig::parse_string("experiment = astar_match\n"
                                                                       "graphs = g:10:10:2:1\n")),
                  ConfigError);
}

TEST_CASE("fnv1a64") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("cell enumeration") {
  const auto c = tiny_training_config();
  const auto cells = enumerate_cells(c);
  CHECK(cells.size() == 2 * 2 * 2);
  CHECK(cells[0].key == cells[1].key);
  CHECK(cells[0].seed == 1);
  CHECK(cells[1].seed == 2);
  CHECK(cells[0].key != cells[2].key);
  CHECK(cells[0].key.size() == 16);
  // A changed hyper-parameter changes every key.
  auto other = c;
  other.eta = 2e-3;
  CHECK(enumerate_cells(other)[0].key != cells[0].key);
  // Keys do not depend on the seed list.
  auto fewer = c;
  fewer.seeds = {2};
  CHECK(enumerate_cells(fewer)[0].key == cells[0].key);
}

TEST_CASE("sweep output is resumable and independent of the job count") {
  const auto cfg = tiny_training_config();
  const fs::path a = fresh_dir("resume_a"), b = fresh_dir("resume_b");
  const auto first = run_sweep(cfg, {a.string(), 1, nullptr});
  CHECK(first.computed == 8);
  CHECK(first.reused == 0);
  for (const auto& r : first.cells) CHECK(r.status == "ok");
  const std::string cells = slurp(a / "cells.csv");
  const std::string summary = slurp(a / "summary.csv");

  SUBCASE("rerun reuses everything") {
    const auto again = run_sweep(cfg, {a.string(), 1, nullptr});
    CHECK(again.computed == 0);
    CHECK(again.reused == 8);
    CHECK(slurp(a / "cells.csv") == cells);
    CHECK(slurp(a / "summary.csv") == summary);
  }
  SUBCASE("deleted rows are recomputed byte for byte") {
    std::istringstream in(cells);
    std::string line, kept;
    int n = 0;
    while (std::getline(in, line))
      if (n++ != 3 && n != 7) kept += line + "\n";
    std::ofstream(a / "cells.csv", std::ios::trunc) << kept;
    fs::remove(a / "summary.csv");
    const auto again = run_sweep(cfg, {a.string(), 2, nullptr});
    CHECK(again.computed == 2);
    CHECK(slurp(a / "cells.csv") == cells);
    CHECK(slurp(a / "summary.csv") == summary);
  }
  SUBCASE("a truncated last line is recomputed") {
    std::ofstream(a / "cells.csv", std::ios::trunc) << cells.substr(0, cells.size() - 5);
    const auto again = run_sweep(cfg, {a.string(), 1, nullptr});
    CHECK(again.computed == 1);
    CHECK(slurp(a / "cells.csv") == cells);
  }
  SUBCASE("three jobs give identical files") {
    run_sweep(cfg, {b.string(), 3, nullptr});
    CHECK(slurp(b / "cells.csv") == cells);
    CHECK(slurp(b / "summary.csv") == summary);
  }
  SUBCASE("summary layout") {
    const CsvTable t = first.summary;
    CHECK(t.header == std::vector<std::string>{"series", "sampler", "astar_inf", "x", "mean", "std", "n"});
    CHECK(t.rows.size() == 4);
    CHECK(t.rows[0][0] == "small");
    CHECK(t.rows[0][3] == "20");
    CHECK(t.rows[0][6] == "2");
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("sampling deviation sweep") {
  const auto cfg = tiny_deviation_config();
  const auto r = run_sweep(cfg, {"", 2, nullptr});
  REQUIRE(r.cells.size() == 4);
  CHECK(parse_double(r.cells[1].value) < 1e-15);  // full budget
  CHECK(parse_double(r.cells[0].value) > 0.0);
  CHECK(parse_double(r.cells[0].baseline) >= parse_double(r.cells[0].value));
  CHECK(r.cells[2].sampler == "symmetric");
}

TEST_CASE("astar_match argmin table") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::AstarMatch;
  cfg.seeds = {1, 2};
  auto rec = [](std::string ds, std::uint64_t seed, std::string v) {
    CellRecord r;
    r.series = "g";
    r.sampler = "ours";
    r.dataset = std::move(ds);
    r.seed = seed;
    r.value = std::move(v);
    return r;
  };
  const std::vector<CellRecord> cells{rec("0.5:0.5", 1, "3"), rec("0.5:0.5", 2, "1"), rec("0.7:0.3", 1, "2"),
                                      rec("0.7:0.3", 2, "4")};
  const CsvTable t = argmin_table(cfg, cells);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0] == std::vector<std::string>{"g", "ours", "1", "0.7:0.3"});
  CHECK(t.rows[1] == std::vector<std::string>{"g", "ours", "2", "0.5:0.5"});
  CHECK(t.rows[2] == std::vector<std::string>{"g", "ours", "mean", "0.5:0.5"});
}

TEST_CASE("svg rendering") {
  CHECK_THROWS_AS(render_svg(SvgChart{}), ConfigError);
  SvgChart c;
  c.series.push_back({"s", {{0.0, 0.0}, {1.0, 1.0}}});
  const std::string svg = render_svg(c);
  CHECK(svg.find("points=\"70.00,365.00 480.00,40.00\"") != std::string::npos);
  CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
  CHECK(render_svg(c) == svg);
  c.series.push_back({"bad", {{0.0, std::nan("")}}});
  CHECK_THROWS_AS(render_svg(c), ConfigError);

  CsvTable t;
  t.header = {"series", "x", "mean"};
  t.rows = {{"a", "10", "1"}, {"a", "20", "0.5"}, {"b", "10", "2"}};
  const auto chart = chart_from_table(t, "x", "mean", {"series"}, "title");
  REQUIRE(chart.series.size() == 2);
  CHECK(chart.series[0].points.size() == 2);
  CHECK(chart.series[1].name == "b");
  t.rows = {{"a", "0.5:0.5", "1"}, {"a", "0.9:0.1", "2"}};
  const auto cat = chart_from_table(t, "x", "mean", {"series"}, "title");
  CHECK(cat.series[0].points[1].first == 2.0);
}
