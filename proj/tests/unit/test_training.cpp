#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "lexcnn/error.hpp"
#include "lexcnn/synthetic.hpp"
#include "lexcnn/training.hpp"

using namespace lexcnn;

namespace {

struct SmallTask {
  SyntheticFiles files;
  Dataset trn, dev, tst;
  WordEmbeddingTable words;
  LexiconTable lexicon;
  std::filesystem::path dir;
};

const SmallTask& small_task() {
  static const SmallTask task = [] {
    SmallTask t;
    SyntheticSpec spec;
    spec.train_documents = 30;
    spec.dev_documents = 15;
    spec.test_documents = 15;
    t.dir = testing::temp_dir("training");
    t.files = write_synthetic_task(spec, t.dir);
    t.trn = load_dataset(t.files.train, LabelScheme::ThreeClass, Split::Train);
    t.dev = load_dataset(t.files.dev, LabelScheme::ThreeClass, Split::Dev);
    t.tst = load_dataset(t.files.test, LabelScheme::ThreeClass, Split::Test);
    t.words = load_word_embeddings(write_synthetic_embeddings(spec, 8, t.dir / "emb8.txt"), 7);
    t.lexicon = build_lexicon_table(t.files.lexicon_sources);
    return t;
  }();
  return task;
}

TrainConfig quick(IntegrationMode mode, bool eav = false) {
  TrainConfig cfg;
  cfg.model.mode = mode;
  cfg.model.eav = eav;
  cfg.model.word_filters = 4;
  cfg.model.lexicon_filters = 2;
  cfg.model.word_attention_filters = 3;
  cfg.model.lexicon_attention_filters = 2;
  cfg.batch_size = 8;
  cfg.max_epochs = 6;
  cfg.patience = 3;
  return cfg;
}

}  // namespace

TEST_CASE("mini-batch gradient is the mean of per-document gradients") {
  const auto& t = small_task();
  const auto cfg = quick(IntegrationMode::SeparateConv, true);
  std::mt19937_64 gen(3);
  auto params = init_parameters<double>(cfg.model, 8, t.lexicon.width(), gen, 0.3);
  params.tuned = make_tuned_embeddings<double>(t.words, {&t.trn});
  auto docs = prepare_documents(t.trn, t.words, &t.lexicon, params);
  const std::vector<std::size_t> batch = {0, 3, 5, 9};

  const auto together = batch_gradients(params, docs, batch, {});
  auto sum = zero_parameters<double>(cfg.model, 8, t.lexicon.width());
  auto sum_views = dense_tensors(sum);
  double loss = 0.0;
  std::map<Index, Eigen::VectorXd> rows;
  for (const auto i : batch) {
    const auto single = batch_gradients(params, docs, {i}, {});
    loss += single.mean_loss;
    const auto views = dense_tensors(single.dense);
    for (std::size_t k = 0; k < views.size(); ++k) {
      for (Index j = 0; j < views[k].size; ++j) sum_views[k].data[j] += views[k].data[j];
    }
    for (const auto& [row, g] : single.embedding_rows) {
      auto [it, fresh] = rows.emplace(row, g);
      if (!fresh) it->second += g;
    }
  }
  CHECK(together.mean_loss == doctest::Approx(loss / 4).epsilon(1e-12));
  const auto views = dense_tensors(together.dense);
  double worst = 0.0;
  for (std::size_t k = 0; k < views.size(); ++k) {
    for (Index j = 0; j < views[k].size; ++j) worst = std::max(worst, std::abs(views[k].data[j] - sum_views[k].data[j] / 4));
  }
  CHECK(worst <= 1e-12);
  REQUIRE(rows.size() == together.embedding_rows.size());
  for (const auto& [row, g] : rows) CHECK((together.embedding_rows.at(row) - g / 4).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("training is deterministic and seed-sensitive") {
  const auto& t = small_task();
  auto cfg = quick(IntegrationMode::SeparateConv, true);
  const auto a = train<double>(t.trn, t.dev, t.words, &t.lexicon, cfg);
  const auto b = train<double>(t.trn, t.dev, t.words, &t.lexicon, cfg);
  REQUIRE(a.history.epochs.size() == b.history.epochs.size());
  for (std::size_t i = 0; i < a.history.epochs.size(); ++i) {
    CHECK(a.history.epochs[i].train_loss == b.history.epochs[i].train_loss);
    CHECK(a.history.epochs[i].dev_metric == b.history.epochs[i].dev_metric);
  }
  const auto va = dense_tensors(a.params);
  const auto vb = dense_tensors(b.params);
  for (std::size_t k = 0; k < va.size(); ++k) {
    CHECK(std::equal(va[k].data, va[k].data + va[k].size, vb[k].data));
  }
  CHECK(a.params.tuned.rows == b.params.tuned.rows);

  cfg.seed = 2;
  const auto c = train<double>(t.trn, t.dev, t.words, &t.lexicon, cfg);
  CHECK(c.history.epochs.front().train_loss != a.history.epochs.front().train_loss);
}

TEST_CASE("early stopping returns the best dev epoch") {
  const auto& t = small_task();
  for (auto mode : {IntegrationMode::Base, IntegrationMode::Multichannel}) {
    auto cfg = quick(mode);
    cfg.max_epochs = 12;
    const auto r = train<double>(t.trn, t.dev, t.words, &t.lexicon, cfg);
    double best = -1.0;
    int first = 0;
    for (const auto& e : r.history.epochs) {
      if (e.dev_metric > best) {
        best = e.dev_metric;
        first = e.epoch;
      }
    }
    CHECK(r.history.best_dev_metric == best);
    CHECK(r.history.best_epoch == first);
    auto docs = prepare_documents(t.dev, t.words, &t.lexicon, r.params);
    CHECK(metric_value(evaluate(r.params, docs, LabelScheme::ThreeClass), cfg.effective_metric()) == best);
    CHECK(static_cast<int>(r.history.epochs.size()) <= std::min(cfg.max_epochs, first + cfg.patience));
  }
}

TEST_CASE("32-bit training runs") {
  const auto& t = small_task();
  auto cfg = quick(IntegrationMode::NaiveConcat, true);
  cfg.precision = Precision::Float32;
  const auto r = train<float>(t.trn, t.dev, t.words, &t.lexicon, cfg);
  CHECK(r.history.epochs.size() >= 1);
  CHECK(std::isfinite(r.history.epochs.back().train_loss));
}

TEST_CASE("training preconditions") {
  const auto& t = small_task();
  CHECK_THROWS_AS(train<double>(t.trn, t.dev, t.words, nullptr, quick(IntegrationMode::SeparateConv)), DataError);
  auto cfg = quick(IntegrationMode::Base);
  cfg.scheme = LabelScheme::FiveClass;
  cfg.model.num_classes = 5;
  CHECK_THROWS_AS(train<double>(t.trn, t.dev, t.words, nullptr, cfg), DataError);
  CHECK_THROWS_AS(train<double>(t.trn, Dataset{}, t.words, nullptr, quick(IntegrationMode::Base)), DataError);
}

TEST_CASE("divergence is reported as a numeric error") {
  const auto& t = small_task();
  auto cfg = quick(IntegrationMode::Base);
  cfg.learning_rate = 1e300;
  CHECK_THROWS_AS(train<double>(t.trn, t.dev, t.words, nullptr, cfg), NumericError);
}

TEST_CASE("finite-difference harness") {
  // f(x) = sum a_i x_i^2 + b x_0 x_1; gradient exact
  Eigen::VectorXd a(3);
  a << 1.5, -2.0, 0.25;
  auto f = [&](const Eigen::VectorXd& x) { return (a.array() * x.array().square()).sum() + 3.0 * x[0] * x[1]; };
  Eigen::VectorXd x(3);
  x << 0.7, -1.3, 2.0;
  Eigen::VectorXd g = 2.0 * a.cwiseProduct(x);
  g[0] += 3.0 * x[1];
  g[1] += 3.0 * x[0];
  CHECK(max_relative_error(f, x, g, 1e-3) <= 1e-10);
  CHECK_THROWS_AS(max_relative_error(f, x, g, 0.0), UsageError);
  CHECK_THROWS_AS(grad_check(TrainConfig{}, GradCheckProbe{}, 0.0), UsageError);
  CHECK(relative_error(1.0, 1.0) == 0.0);
  CHECK(relative_error(0.0, 1e-12) == doctest::Approx(1e-4));
}

TEST_CASE("micro-model gradients") {
  for (auto mode : {IntegrationMode::Base, IntegrationMode::NaiveConcat, IntegrationMode::Multichannel,
                    IntegrationMode::SeparateConv}) {
    for (bool eav : {false, true}) {
      TrainConfig cfg;
      cfg.model.mode = mode;
      cfg.model.eav = eav;
      const auto report = grad_check(cfg, GradCheckProbe{}, 1e-5);
      CAPTURE(variant_name({mode, eav}));
      CHECK(report.max_error <= 1e-4);
      CHECK(std::any_of(report.groups.begin(), report.groups.end(),
                        [](const auto& g) { return g.first == "embeddings"; }));
    }
  }
  TrainConfig f32;
  f32.precision = Precision::Float32;
  CHECK_THROWS_AS(grad_check(f32, GradCheckProbe{}, 1e-5), UsageError);
}

TEST_CASE("group runs") {
  const auto& t = small_task();
  auto cfg = quick(IntegrationMode::Base);
  cfg.max_epochs = 3;
  ExperimentData data{&t.trn, &t.dev, &t.tst, &t.words, &t.lexicon};
  const auto variants = parse_variant_list("base,sc-eav");

  SUBCASE("thread count does not change results") {
    const auto serial = group_run(cfg, {1, 2, 3}, variants, data, 1);
    const auto parallel = group_run(cfg, {1, 2, 3}, variants, data, 4);
    REQUIRE(serial.variants.size() == 2);
    for (std::size_t v = 0; v < 2; ++v) {
      CHECK(serial.variants[v].scores == parallel.variants[v].scores);
      CHECK(serial.variants[v].box.median == parallel.variants[v].box.median);
    }
    CHECK(serial.warnings.empty());
  }
  SUBCASE("seed order does not change per-seed scores") {
    const auto a = group_run(cfg, {1, 2}, variants, data);
    const auto b = group_run(cfg, {2, 1}, variants, data);
    for (std::size_t v = 0; v < 2; ++v) {
      auto sa = a.variants[v].scores;
      auto sb = b.variants[v].scores;
      std::sort(sa.begin(), sa.end());
      std::sort(sb.begin(), sb.end());
      CHECK(sa == sb);
    }
  }
  SUBCASE("aborted runs are excluded with a warning") {
    auto bad = cfg;
    bad.learning_rate = 1e300;
    const auto r = group_run(bad, {1, 2}, {Variant{}}, data);
    CHECK(r.variants[0].scores.empty());
    CHECK(r.warnings.size() == 3);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(group_run(cfg, {1}, variants, data), UsageError);
    CHECK(default_seeds() == std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  }
}

TEST_CASE("embedding size sweep") {
  const auto& t = small_task();
  auto cfg = quick(IntegrationMode::Base);
  cfg.max_epochs = 2;
  SyntheticSpec spec;
  std::vector<std::filesystem::path> files;
  for (Index d : {4, 8}) files.push_back(write_synthetic_embeddings(spec, d, t.dir / ("sweep" + std::to_string(d) + ".txt")));
  ExperimentData data{&t.trn, &t.dev, &t.tst, nullptr, &t.lexicon};
  const auto sweep = embedding_size_sweep(cfg, data, files, {Variant{}}, 2);
  CHECK(sweep.sizes == std::vector<Index>{4, 8});
  REQUIRE(sweep.rows.size() == 1);
  CHECK(sweep.rows[0].scores[0].size() == 2);
  CHECK(sweep.rows[0].stddev == population_stddev(sweep.rows[0].means));

  // one file twice: identical per-size means, zero spread
  const auto same = embedding_size_sweep(cfg, data, {files[0], files[0]}, {Variant{}}, 1);
  CHECK(same.rows[0].stddev == 0.0);

  CHECK_THROWS_AS(embedding_size_sweep(cfg, data, {t.dir / "missing.txt"}, {Variant{}}, 1), DataError);
}
