#include <doctest.h>

#include <numeric>

#include "helpers.hpp"
#include "lexcnn/config.hpp"
#include "lexcnn/error.hpp"
#include "lexcnn/util.hpp"

using namespace lexcnn;

TEST_CASE("variant names") {
  CHECK(all_variants().size() == 7);
  for (const auto& v : all_variants()) CHECK(parse_variant(variant_name(v)) == v);
  CHECK(variant_name(parse_variant("sc-eav")) == "sc-eav");
  CHECK(parse_variant_list("base,nc,mc,sc,nc-eav,mc-eav,sc-eav") == all_variants());
  CHECK_THROWS_AS(parse_variant("xx"), UsageError);
}

TEST_CASE("defaults") {
  TrainConfig cfg;
  CHECK(cfg.learning_rate == 1e-3);
  CHECK(cfg.batch_size == 50);
  CHECK(cfg.max_epochs == 200);
  CHECK(cfg.patience == 25);
  CHECK(cfg.dropout == 0.5);
  CHECK(cfg.seed == 1);
  CHECK(cfg.effective_metric() == Metric::AvgF1);
  cfg.scheme = LabelScheme::FiveClass;
  CHECK(cfg.effective_metric() == Metric::Accuracy);
}

TEST_CASE("config entries round-trip through apply_setting") {
  TrainConfig cfg;
  apply_setting(cfg, "variant", "mc-eav");
  apply_setting(cfg, "word_filter_lengths", "3,4");
  apply_setting(cfg, "learning_rate", "0.0123");
  apply_setting(cfg, "scheme", "5");
  apply_setting(cfg, "precision", "float");
  TrainConfig back;
  for (const auto& [k, v] : config_entries(cfg)) apply_setting(back, k, v);
  CHECK(config_entries(back) == config_entries(cfg));
  CHECK(back.model.num_classes == 5);
  CHECK(back.model.word_filter_lengths == std::vector<int>{3, 4});
}

TEST_CASE("bad settings") {
  TrainConfig cfg;
  CHECK_THROWS_AS(apply_setting(cfg, "nonsense", "1"), UsageError);
  CHECK_THROWS_AS(apply_setting(cfg, "batch_size", "many"), UsageError);
  apply_setting(cfg, "dropout", "1.5");
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  CHECK_THROWS_AS(apply_setting(cfg, "word_filter_lengths", ""), UsageError);
}

TEST_CASE("bundled tweet configuration") {
  TrainConfig cfg;
  apply_config_file(cfg, std::filesystem::path(LEXCNN_SOURCE_DIR) / "configs" / "paper-s16.cfg");
  CHECK(cfg.model.word_filter_lengths == std::vector<int>{2, 3, 4, 5});
  CHECK(cfg.model.lexicon_filter_lengths == std::vector<int>{2, 3, 4, 5});
  CHECK(cfg.model.word_filters == 64);
  CHECK(cfg.model.lexicon_filters == 9);
  CHECK(cfg.model.word_attention_filters == 50);
  CHECK(cfg.model.lexicon_attention_filters == 20);
  CHECK(cfg.seed == 1);
  CHECK(cfg.effective_metric() == Metric::AvgF1);
}

TEST_CASE("random helpers") {
  std::mt19937_64 a(4), b(4);
  std::vector<int> xs(20), ys(20);
  std::iota(xs.begin(), xs.end(), 0);
  ys = xs;
  shuffle(xs.begin(), xs.end(), a);
  shuffle(ys.begin(), ys.end(), b);
  CHECK(xs == ys);
  auto sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted[19] == 19);
  for (int i = 0; i < 1000; ++i) {
    CHECK(uniform_index(a, 7) < 7);
    const double u = unit_uniform(a);
    CHECK((u >= 0.0 && u < 1.0));
  }
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(255) == "00000000000000ff");
}
