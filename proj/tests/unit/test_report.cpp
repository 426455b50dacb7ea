#include <doctest.h>
#include <algorithm>

#include "helpers.hpp"
#include "lexcnn/report.hpp"

using namespace lexcnn;

namespace {

Provenance sample_provenance() {
  Provenance p;
  p.config = {{"seed", "1"}, {"variant", "sc-eav"}};
  p.inputs = {{"trn.tsv", "0123456789abcdef"}};
  return p;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("csv fields") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(format_number(0.1) == "0.1");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("provenance header") {
  const auto lines = sample_provenance().lines();
  CHECK(lines.front() == std::string("# tool: ") + kToolVersion);
  CHECK(lines[1] == "# config: seed = 1");
  CHECK(lines.back() == "# input: trn.tsv fnv1a64=0123456789abcdef");
}

TEST_CASE("metrics csv round-trips") {
  const auto dir = testing::temp_dir("report");
  const std::vector<MetricRow> rows = {{"sc-eav", 1, "avgf1", 0.6123456789012345}, {"base", 10, "acc", 1.0 / 3.0}};
  metrics_export(rows, dir / "m.csv", sample_provenance());
  const auto t = read_csv(dir / "m.csv");
  CHECK(t.comments.front() == std::string("tool: ") + kToolVersion);
  CHECK(t.header == std::vector<std::string>{"variant", "seed", "metric", "value"});
  REQUIRE(t.rows.size() == 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(t.rows[i][0] == rows[i].variant);
    CHECK(std::stoull(t.rows[i][1]) == rows[i].seed);
    CHECK(t.rows[i][2] == rows[i].metric);
    CHECK(std::stod(t.rows[i][3]) == rows[i].value);
  }
}

TEST_CASE("history csv round-trips and omits wall-clock time") {
  const auto dir = testing::temp_dir("report-history");
  TrainHistory h;
  h.epochs = {{1, 1.0986122886681098, 0.25, 3.5}, {2, 0.9, 0.5, 7.25}, {3, 0.8, 0.5, 1.0}};
  h.best_epoch = 2;
  h.best_dev_metric = 0.5;
  history_export(h, dir / "h.csv", sample_provenance());
  const auto t = read_csv(dir / "h.csv");
  CHECK(t.header == std::vector<std::string>{"epoch", "train_loss", "dev_metric", "best"});
  REQUIRE(t.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::stoi(t.rows[i][0]) == h.epochs[i].epoch);
    CHECK(std::stod(t.rows[i][1]) == h.epochs[i].train_loss);
    CHECK(std::stod(t.rows[i][2]) == h.epochs[i].dev_metric);
  }
  CHECK(t.rows[1][3] == "1");
  CHECK(t.rows[2][3] == "0");
  history_export(h, dir / "h2.csv", sample_provenance());
  CHECK(testing::read_file(dir / "h.csv") == testing::read_file(dir / "h2.csv"));
}

TEST_CASE("box statistics csv") {
  const auto dir = testing::temp_dir("report-box");
  GroupStats gs;
  VariantStats v;
  v.variant = parse_variant("sc-eav");
  for (double s : {1.0, 2.0, 3.0, 4.0, 100.0}) v.scores.push_back({v.scores.size() + 1, s});
  v.box = box_stats({1, 2, 3, 4, 100});
  gs.variants.push_back(v);
  boxstats_export(gs, dir / "b.csv", sample_provenance());
  const auto t = read_csv(dir / "b.csv");
  CHECK(t.header == std::vector<std::string>{"variant", "median", "q25", "q75", "outliers", "n"});
  CHECK(t.rows.at(0) == std::vector<std::string>{"sc-eav", "3", "2", "4", "100", "5"});

  scores_export(gs, "avgf1", dir / "s.csv", sample_provenance());
  const auto s = read_csv(dir / "s.csv");
  CHECK(s.rows.size() == 5);
  CHECK(s.rows.back() == std::vector<std::string>{"sc-eav", "5", "avgf1", "100"});
}

TEST_CASE("learning curves") {
  const auto dir = testing::temp_dir("report-curves");
  TrainHistory a, b;
  a.epochs = {{1, 1.0, 60, 0}, {2, 0.9, 61, 0}};
  b.epochs = {{1, 1.0, 62, 0}};
  SUBCASE("one history: the mean is that history") {
    curves_export({{Variant{}, {1}, {a}}}, dir / "one.csv", {});
    const auto t = read_csv(dir / "one.csv");
    CHECK(t.rows.size() == 2);
    CHECK(t.rows[1] == std::vector<std::string>{"base", "2", "61", "61"});
  }
  SUBCASE("two histories are averaged and truncated to the shortest") {
    curves_export({{Variant{}, {1, 2}, {a, b}}}, dir / "two.csv", {});
    const auto t = read_csv(dir / "two.csv");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0] == std::vector<std::string>{"base", "1", "61", "60;62"});
    CHECK(std::any_of(t.comments.begin(), t.comments.end(),
                      [](const std::string& c) { return c.find("truncated") != std::string::npos; }));
  }
}

TEST_CASE("sweep csv") {
  const auto dir = testing::temp_dir("report-sweep");
  SweepResult s;
  s.sizes = {8, 16};
  s.rows.push_back({Variant{}, {{60.0}, {62.0}}, {60.0, 62.0}, 1.0});
  sweep_export(s, dir / "s.csv", {});
  const auto t = read_csv(dir / "s.csv");
  CHECK(t.rows.size() == 3);
  CHECK(t.rows[2] == std::vector<std::string>{"base", "all", "", "", "1"});
}

TEST_CASE("heatmaps") {
  const auto dir = testing::temp_dir("report-heat");
  HeatmapDocument doc;
  doc.id = "d1";
  doc.attention.tokens = {"so", "<bad>", "movie"};
  doc.attention.word_weights = {0.9, -0.1, 0.0};
  doc.predicted = 2;
  doc.gold = 0;

  SUBCASE("csv passes weights through") {
    heatmap_export({doc}, LabelScheme::ThreeClass, dir / "h.csv", HeatmapFormat::Csv, sample_provenance());
    const auto t = read_csv(dir / "h.csv");
    CHECK(t.header == std::vector<std::string>{"doc", "position", "token", "channel", "weight", "predicted", "gold"});
    REQUIRE(t.rows.size() == 3);
    CHECK(std::stod(t.rows[0][4]) == 0.9);
    CHECK(std::stod(t.rows[1][4]) == -0.1);
    CHECK(std::stod(t.rows[2][4]) == 0.0);
    CHECK(t.rows[0][5] == "negative");
    CHECK(t.rows[0][6] == "positive");
  }
  SUBCASE("html has one colored span per token, in order") {
    doc.attention.lexicon_weights = std::vector<double>{0.2, 0.3, 0.4};
    heatmap_export({doc, doc}, LabelScheme::ThreeClass, dir / "h.html", HeatmapFormat::Html, sample_provenance());
    const auto html = testing::read_file(dir / "h.html");
    CHECK(count(html, "class=\"tok\"") == 6);
    const auto so = html.find(">so</span>");
    const auto bad = html.find(">&lt;bad&gt;</span>");
    const auto movie = html.find(">movie</span>");
    CHECK(so < bad);
    CHECK(bad < movie);
    CHECK(html.find("lexicon=0.3") != std::string::npos);
    CHECK(html.find("<script") == std::string::npos);
    CHECK(html.find("tool: ") != std::string::npos);
  }
  SUBCASE("color scale") {
    CHECK(heat_color(0.0) == "rgb(210,210,210)");
    CHECK(heat_color(1.0) == "rgb(214,39,40)");
    CHECK(heat_color(-1.0) == "rgb(31,119,180)");
    CHECK(heat_color(0.5) == "rgb(212,125,125)");
  }
  SUBCASE("format names") {
    CHECK(parse_heatmap_format("html") == HeatmapFormat::Html);
    CHECK_THROWS(parse_heatmap_format("png"));
  }
}

TEST_CASE("heatmap documents need an EAV model") {
  ModelConfig cfg;
  const auto p = zero_parameters<double>(cfg, 4, 0);
  Dataset ds;
  ds.documents = {{"a", {"x", "y"}, 0}};
  WordEmbeddingTable words(4, 1);
  CHECK_THROWS_WITH(heatmap_documents(p, ds, words, nullptr), "attention unavailable for this model");
}
