#include <doctest.h>

#include "helpers.hpp"
#include "lexcnn/checkpoint.hpp"
#include "lexcnn/error.hpp"

using namespace lexcnn;

namespace {

template <typename Scalar>
ModelParameters<Scalar> sample(IntegrationMode mode, bool eav) {
  ModelConfig cfg;
  cfg.mode = mode;
  cfg.eav = eav;
  cfg.word_filters = 3;
  cfg.lexicon_filters = 2;
  cfg.word_attention_filters = 4;
  cfg.lexicon_attention_filters = 2;
  std::mt19937_64 gen(9);
  auto p = init_parameters<Scalar>(cfg, 6, mode == IntegrationMode::Base ? 0 : 3, gen, 0.7);
  p.tuned.words = {"a", "b"};
  p.tuned.index = {{"a", 0}, {"b", 1}};
  p.tuned.rows = RowMatrix<Scalar>::Random(2, 6);
  p.tuned.rows(0, 0) = static_cast<Scalar>(1.0 / 3.0);
  return p;
}

template <typename Scalar>
void check_round_trip(IntegrationMode mode, bool eav, Precision precision) {
  const auto dir = testing::temp_dir("ckpt");
  Checkpoint<Scalar> c;
  c.config.model = sample<Scalar>(mode, eav).config;
  c.config.precision = precision;
  c.config.seed = 42;
  c.tables = {"emb.txt", "00ff", {"a.tsv", "b.tsv"}, {"01", "02"}};
  c.params = sample<Scalar>(mode, eav);
  save_checkpoint(c, dir / "m.ckpt");
  const auto back = load_checkpoint<Scalar>(dir / "m.ckpt");
  CHECK(config_entries(back.config) == config_entries(c.config));
  CHECK(back.tables.embeddings_path == "emb.txt");
  CHECK(back.tables.lexicon_digests == c.tables.lexicon_digests);
  const auto a = dense_tensors(c.params);
  const auto b = dense_tensors(back.params);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].name == b[k].name);
    REQUIRE(a[k].size == b[k].size);
    CHECK(std::equal(a[k].data, a[k].data + a[k].size, b[k].data));
  }
  CHECK(back.params.tuned.words == c.params.tuned.words);
  CHECK(back.params.tuned.rows == c.params.tuned.rows);
  CHECK(read_checkpoint_config(dir / "m.ckpt").seed == 42);
}

}  // namespace

TEST_CASE("checkpoints round-trip bit for bit") {
  check_round_trip<double>(IntegrationMode::SeparateConv, true, Precision::Float64);
  check_round_trip<double>(IntegrationMode::Base, false, Precision::Float64);
  check_round_trip<double>(IntegrationMode::Multichannel, true, Precision::Float64);
  check_round_trip<float>(IntegrationMode::NaiveConcat, true, Precision::Float32);
}

TEST_CASE("checkpoint errors") {
  const auto dir = testing::temp_dir("ckpt-err");
  Checkpoint<double> c;
  c.params = sample<double>(IntegrationMode::Base, false);
  c.config.model = c.params.config;
  save_checkpoint(c, dir / "m.ckpt");
  CHECK_THROWS_AS(load_checkpoint<float>(dir / "m.ckpt"), DataError);
  CHECK_THROWS_AS(load_checkpoint<double>(testing::write_file(dir / "junk.ckpt", "{ nope")), DataError);
  CHECK_THROWS_AS(load_checkpoint<double>(dir / "missing.ckpt"), DataError);

  auto text = testing::read_file(dir / "m.ckpt");
  const auto at = text.find("\"vocabulary_hash\"");
  REQUIRE(at != std::string::npos);
  const auto quote = text.find('"', text.find(':', at) + 1);
  text[quote + 1] = text[quote + 1] == '0' ? '1' : '0';
  CHECK_THROWS_AS(load_checkpoint<double>(testing::write_file(dir / "tampered.ckpt", text)), DataError);
}

TEST_CASE("vocabulary hash depends on order and content") {
  CHECK(vocabulary_hash({"a", "b"}) == vocabulary_hash({"a", "b"}));
  CHECK(vocabulary_hash({"a", "b"}) != vocabulary_hash({"b", "a"}));
  CHECK(vocabulary_hash({"ab"}) != vocabulary_hash({"a", "b"}));
}
