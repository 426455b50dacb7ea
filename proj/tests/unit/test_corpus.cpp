#include <doctest.h>

#include "helpers.hpp"
#include "lexcnn/corpus.hpp"
#include "lexcnn/error.hpp"

using namespace lexcnn;
using Tokens = std::vector<std::string>;

TEST_CASE("tokenize examples") {
  CHECK(tokenize("Good movie!") == Tokens{"good", "movie", "!"});
  CHECK(tokenize("can't stop") == Tokens{"ca", "n't", "stop"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("   \t ").empty());
  CHECK(tokenize("it's #great @you") == Tokens{"it", "'s", "#great", "@you"});
  CHECK(tokenize("well...ok") == Tokens{"well", ".", ".", ".", "ok"});
  CHECK(tokenize("'quoted'") == Tokens{"'quoted", "'"});
  CHECK(tokenize("say '9") == Tokens{"say", "'", "9"});
  CHECK(tokenize("snake_case") == Tokens{"snake_case"});
}

TEST_CASE("tokenize is idempotent on its joined output") {
  const std::vector<std::string> inputs = {
      "Good movie!",   "can't stop, won't stop", "it's 5:30pm...", "'tis the \"season\"",
      "rock'n'roll",   "I'M NOT SURE!!1",        "don't' x'",      "a-b/c (d) [e] {f}",
      "naïve café",    "@user #tag http://x.y",  "''",             "n't",
  };
  for (const auto& text : inputs) {
    const auto once = tokenize(text);
    std::string joined;
    for (const auto& t : once) joined += (joined.empty() ? "" : " ") + t;
    CHECK_MESSAGE(tokenize(joined) == once, text);
  }
}

TEST_CASE("labels and schemes") {
  CHECK(num_classes(LabelScheme::ThreeClass) == 3);
  CHECK(num_classes(LabelScheme::FiveClass) == 5);
  CHECK(label_index(LabelScheme::ThreeClass, "negative") == 2);
  CHECK(label_index(LabelScheme::FiveClass, "verynegative") == 4);
  CHECK_FALSE(label_index(LabelScheme::ThreeClass, "happy").has_value());
  CHECK(parse_scheme("5") == LabelScheme::FiveClass);
  CHECK_THROWS_AS(parse_scheme("4"), UsageError);
}

TEST_CASE("load_dataset") {
  const auto dir = testing::temp_dir("corpus");
  SUBCASE("well-formed file") {
    const auto p = testing::write_file(dir / "ok.tsv",
                                       "# comment\n"
                                       "a\tpositive\tGood movie!\n"
                                       "b\tneutral\tit is a movie\n"
                                       "c\tnegative\tcan't stand it\n");
    const auto ds = load_dataset(p, LabelScheme::ThreeClass);
    REQUIRE(ds.size() == 3);
    CHECK(ds.documents[0].id == "a");
    CHECK(ds.documents[0].tokens == Tokens{"good", "movie", "!"});
    CHECK(ds.documents[2].label == 2);
  }
  SUBCASE("unknown label names line and label") {
    const auto p = testing::write_file(dir / "bad.tsv", "a\tpositive\tfine\nb\thappy\tyay\n");
    try {
      load_dataset(p, LabelScheme::ThreeClass);
      FAIL("expected a DataError");
    } catch (const DataError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("line 2") != std::string::npos);
      CHECK(msg.find("happy") != std::string::npos);
    }
  }
  SUBCASE("malformed and empty rows") {
    const auto p = testing::write_file(dir / "bad2.tsv", "a\tpositive\n b\tneutral\t  \n");
    CHECK_THROWS_AS(load_dataset(p, LabelScheme::ThreeClass), DataError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_dataset(dir / "nope.tsv", LabelScheme::ThreeClass), DataError); }
}

TEST_CASE("dataset_stats") {
  Dataset empty;
  const auto s0 = dataset_stats(empty);
  CHECK(s0.total == 0);
  CHECK(s0.counts == std::vector<std::size_t>{0, 0, 0});

  Dataset ds;
  ds.documents = {{"1", {"a"}, 0}, {"2", {"b"}, 0}, {"3", {"c"}, 2}};
  const auto s = dataset_stats(ds);
  CHECK(s.counts == std::vector<std::size_t>{2, 0, 1});
  CHECK(s.total == 3);
}

TEST_CASE("dataset_stats at the scale of the tweet training split") {
  const auto dir = testing::temp_dir("corpus-scale");
  std::string text;
  const std::vector<std::pair<std::string, int>> labels = {{"positive", 6480}, {"neutral", 6577}, {"negative", 2328}};
  int id = 0;
  for (const auto& [label, n] : labels) {
    for (int i = 0; i < n; ++i) text += std::to_string(id++) + "\t" + label + "\tsome words here\n";
  }
  const auto ds = load_dataset(testing::write_file(dir / "trn.tsv", text), LabelScheme::ThreeClass);
  const auto s = dataset_stats(ds);
  CHECK(s.counts == std::vector<std::size_t>{6480, 6577, 2328});
  CHECK(s.total == 15385);
}
