#include "lexcnn/training.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "lexcnn/error.hpp"
#include "lexcnn/util.hpp"

namespace lexcnn {

template <typename Scalar>
std::vector<PreparedDocument<Scalar>> prepare_documents(const Dataset& ds, const WordEmbeddingTable& words,
                                                        const LexiconTable* lexicon,
                                                        const ModelParameters<Scalar>& params) {
  const auto& cfg = params.config;
  if (uses_lexicon(cfg.mode) && params.lexicon_dim > 0 && lexicon == nullptr) {
    throw DataError("this model variant needs a lexicon table");
  }
  if (lexicon != nullptr && uses_lexicon(cfg.mode) && lexicon->width() != params.lexicon_dim) {
    throw DataError(fmt::format("lexicon width {} does not match the model ({})", lexicon->width(),
                                params.lexicon_dim));
  }
  const LexiconTable* lex = params.lexicon_dim > 0 ? lexicon : nullptr;
  std::vector<PreparedDocument<Scalar>> out;
  out.reserve(ds.size());
  for (const auto& doc : ds.documents) {
    out.push_back({document_matrices<Scalar>(doc, words, lex, cfg.mode, cfg.max_filter_length(),
                                             params.tuned.empty() ? nullptr : &params.tuned),
                   doc.label});
  }
  return out;
}

template <typename Scalar>
void refresh_tuned_rows(DocumentMatrices<Scalar>& dm, const TunedEmbeddings<Scalar>& tuned) {
  if (tuned.empty()) return;
  for (std::size_t i = 0; i < dm.tuned_rows.size(); ++i) {
    const Index row = dm.tuned_rows[i];
    if (row >= 0) dm.word.row(static_cast<Index>(i)) = tuned.rows.row(row);
  }
}

template <typename Scalar>
BatchGradients<Scalar> batch_gradients(const ModelParameters<Scalar>& params,
                                       std::vector<PreparedDocument<Scalar>>& docs,
                                       const std::vector<std::size_t>& batch, DropoutOptions dropout) {
  if (batch.empty()) throw UsageError("empty mini-batch");
  BatchGradients<Scalar> out;
  out.dense = zero_parameters<Scalar>(params.config, params.word_dim, params.lexicon_dim);
  auto sum_views = dense_tensors(out.dense);
  double loss_sum = 0.0;
  for (const auto idx : batch) {
    auto& doc = docs.at(idx);
    refresh_tuned_rows(doc.matrices, params.tuned);
    const auto trace = forward(doc.matrices, params, dropout);
    auto lg = loss_and_gradients(trace, doc.label, params);
    loss_sum += static_cast<double>(lg.loss);
    auto views = dense_tensors(lg.grads.params);
    for (std::size_t t = 0; t < views.size(); ++t) {
      Eigen::Map<Vector<Scalar>>(sum_views[t].data, sum_views[t].size) +=
          Eigen::Map<const Vector<Scalar>>(views[t].data, views[t].size);
    }
    for (std::size_t i = 0; i < doc.matrices.tuned_rows.size(); ++i) {
      const Index row = doc.matrices.tuned_rows[i];
      if (row < 0) continue;
      auto [it, inserted] = out.embedding_rows.try_emplace(row, Vector<Scalar>::Zero(params.word_dim));
      it->second += lg.grads.word_input.row(static_cast<Index>(i)).transpose();
    }
  }
  const Scalar scale = Scalar(1) / static_cast<Scalar>(batch.size());
  for (auto& v : sum_views) Eigen::Map<Vector<Scalar>>(v.data, v.size) *= scale;
  for (auto& [row, g] : out.embedding_rows) g *= scale;
  out.mean_loss = loss_sum / static_cast<double>(batch.size());
  return out;
}

template <typename Scalar>
AdamOptimizer<Scalar>::AdamOptimizer(const ModelParameters<Scalar>& params, double learning_rate,
                                     double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
  auto shape = zero_parameters<Scalar>(params.config, params.word_dim, params.lexicon_dim);
  for (const auto& t : dense_tensors(shape)) {
    m_.push_back(Vector<Scalar>::Zero(t.size));
    v_.push_back(Vector<Scalar>::Zero(t.size));
  }
  m_rows_ = RowMatrix<Scalar>::Zero(params.tuned.rows.rows(), params.tuned.rows.cols());
  v_rows_ = m_rows_;
}

template <typename Scalar>
void AdamOptimizer<Scalar>::step(ModelParameters<Scalar>& params, const BatchGradients<Scalar>& grads) {
  ++step_;
  const Scalar b1 = static_cast<Scalar>(beta1_);
  const Scalar b2 = static_cast<Scalar>(beta2_);
  const Scalar c1 = static_cast<Scalar>(1.0 - std::pow(beta1_, static_cast<double>(step_)));
  const Scalar c2 = static_cast<Scalar>(1.0 - std::pow(beta2_, static_cast<double>(step_)));
  const Scalar lr = static_cast<Scalar>(lr_);
  const Scalar eps = static_cast<Scalar>(eps_);

  auto update = [&](auto&& theta, const auto& g, auto&& m, auto&& v) {
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.cwiseProduct(g);
    theta.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };

  auto views = dense_tensors(params);
  const auto gviews = dense_tensors(grads.dense);
  for (std::size_t t = 0; t < views.size(); ++t) {
    update(Eigen::Map<Vector<Scalar>>(views[t].data, views[t].size),
           Eigen::Map<const Vector<Scalar>>(gviews[t].data, gviews[t].size), m_[t], v_[t]);
  }
  for (const auto& [row, g] : grads.embedding_rows) {
    update(params.tuned.rows.row(row).transpose(), g, m_rows_.row(row).transpose(),
           v_rows_.row(row).transpose());
  }
}

template <typename Scalar>
ConfusionMatrix evaluate(const ModelParameters<Scalar>& params, std::vector<PreparedDocument<Scalar>>& docs,
                         LabelScheme scheme) {
  std::vector<int> predicted;
  std::vector<int> gold;
  predicted.reserve(docs.size());
  gold.reserve(docs.size());
  for (auto& doc : docs) {
    refresh_tuned_rows(doc.matrices, params.tuned);
    predicted.push_back(forward(doc.matrices, params).predicted());
    gold.push_back(doc.label);
  }
  return confusion(predicted, gold, scheme);
}

template <typename Scalar>
TrainResult<Scalar> train(const Dataset& trn, const Dataset& dev, const WordEmbeddingTable& words,
                          const LexiconTable* lexicon, const TrainConfig& cfg) {
  cfg.validate();
  if (trn.scheme != cfg.scheme || dev.scheme != cfg.scheme) {
    throw DataError("training and dev data must use the configured label scheme");
  }
  if (trn.empty() || dev.empty()) throw DataError("training and dev data must be nonempty");
  if (uses_lexicon(cfg.model.mode) && cfg.model.mode != IntegrationMode::NaiveConcat && lexicon == nullptr) {
    throw DataError(fmt::format("variant '{}' needs a lexicon table", variant_name(cfg.model.variant())));
  }
  const Index e = (lexicon != nullptr && uses_lexicon(cfg.model.mode)) ? lexicon->width() : 0;

  std::mt19937_64 gen(cfg.seed);
  TrainResult<Scalar> result;
  auto params = init_parameters<Scalar>(cfg.model, words.dimension(), e, gen, cfg.init_range);
  if (cfg.fine_tune) params.tuned = make_tuned_embeddings<Scalar>(words, {&trn});

  auto trn_docs = prepare_documents(trn, words, lexicon, params);
  auto dev_docs = prepare_documents(dev, words, lexicon, params);
  AdamOptimizer<Scalar> adam(params, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon);
  const Metric metric = cfg.effective_metric();

  std::vector<std::size_t> order(trn_docs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);

  auto& history = result.history;
  bool have_best = false;
  int since_best = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    shuffle(order.begin(), order.end(), gen);
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size, ++batch_index) {
      const std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(
                                                               std::min(order.size(), start + batch_size)));
      const auto grads = batch_gradients(params, trn_docs, batch, {cfg.dropout, &gen});
      if (!std::isfinite(grads.mean_loss)) {
        throw NumericError(fmt::format("non-finite loss at epoch {}, batch {}", epoch, batch_index + 1));
      }
      loss_sum += grads.mean_loss * static_cast<double>(batch.size());
      adam.step(params, grads);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.dev_metric = metric_value(evaluate(params, dev_docs, cfg.scheme), metric);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    history.epochs.push_back(rec);

    if (!have_best || rec.dev_metric > history.best_dev_metric) {
      have_best = true;
      history.best_dev_metric = rec.dev_metric;
      history.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

double max_relative_error(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& theta, const Eigen::VectorXd& analytic, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw UsageError("epsilon must be positive and finite");
  if (theta.size() != analytic.size()) throw UsageError("gradient size does not match the parameters");
  double worst = 0.0;
  Eigen::VectorXd probe = theta;
  for (Index i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + epsilon;
    const double up = f(probe);
    probe[i] = theta[i] - epsilon;
    const double down = f(probe);
    probe[i] = theta[i];
    if (!std::isfinite(up) || !std::isfinite(down)) throw NumericError("non-finite objective at probe");
    worst = std::max(worst, relative_error(analytic[i], (up - down) / (2.0 * epsilon)));
  }
  return worst;
}

GradCheckReport grad_check(const TrainConfig& cfg, const GradCheckProbe& probe, double epsilon) {
  if (cfg.precision != Precision::Float64) throw UsageError("gradient checks require 64-bit precision");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw UsageError("epsilon must be positive and finite");

  ModelConfig mc = cfg.model;
  mc.word_filters = probe.word_filters;
  mc.lexicon_filters = probe.lexicon_filters;
  mc.word_attention_filters = probe.attention_filters;
  mc.lexicon_attention_filters = probe.attention_filters;
  mc.num_classes = probe.classes;

  std::mt19937_64 gen(probe.seed);
  const Index d = probe.word_dim;
  const Index e = uses_lexicon(mc.mode) ? probe.lexicon_dim : 0;
  auto params = init_parameters<double>(mc, d, e, gen, 0.5);
  for (auto& t : dense_tensors(params)) {
    if (!t.bias) continue;
    for (Index i = 0; i < t.size; ++i) t.data[i] = uniform(gen, -0.5, 0.5);
  }

  DocumentMatrices<double> dm;
  dm.tokens = probe.tokens;
  dm.lexicon_width = e;
  const Index rows = std::max<Index>(probe.tokens, mc.max_filter_length());
  dm.word = RowMatrix<double>::Zero(rows, d);
  dm.lexicon = RowMatrix<double>::Zero(rows, mc.mode == IntegrationMode::Multichannel && e > 0 ? d : e);
  for (Index i = 0; i < probe.tokens; ++i) {
    for (Index k = 0; k < d; ++k) dm.word(i, k) = uniform(gen, -1.0, 1.0);
    for (Index k = 0; k < e; ++k) dm.lexicon(i, k) = uniform(gen, -1.0, 1.0);
  }
  const int gold = static_cast<int>(uniform_index(gen, static_cast<std::uint64_t>(probe.classes)));

  const auto trace = forward(dm, params);
  if (!std::isfinite(trace.probabilities.sum())) throw NumericError("non-finite loss at probe");
  auto lg = loss_and_gradients(trace, gold, params);

  // Flatten every dense tensor followed by the token rows of the word matrix.
  auto views = dense_tensors(params);
  auto gviews = dense_tensors(lg.grads.params);
  std::vector<std::pair<std::string, std::pair<Index, Index>>> ranges;
  Index total = 0;
  for (const auto& v : views) total += v.size;
  const Index input_size = probe.tokens * d;
  Eigen::VectorXd theta(total + input_size);
  Eigen::VectorXd analytic(total + input_size);
  Index offset = 0;
  for (std::size_t t = 0; t < views.size(); ++t) {
    theta.segment(offset, views[t].size) = Eigen::Map<const Eigen::VectorXd>(views[t].data, views[t].size);
    analytic.segment(offset, views[t].size) = Eigen::Map<const Eigen::VectorXd>(gviews[t].data, gviews[t].size);
    ranges.push_back({views[t].group, {offset, views[t].size}});
    offset += views[t].size;
  }
  for (Index i = 0; i < probe.tokens; ++i) {
    theta.segment(offset + i * d, d) = dm.word.row(i).transpose();
    analytic.segment(offset + i * d, d) = lg.grads.word_input.row(i).transpose();
  }
  ranges.push_back({"embeddings", {offset, input_size}});

  auto objective = [&](const Eigen::VectorXd& x) {
    auto p = params;
    auto m = dm;
    auto pv = dense_tensors(p);
    Index off = 0;
    for (auto& v : pv) {
      Eigen::Map<Eigen::VectorXd>(v.data, v.size) = x.segment(off, v.size);
      off += v.size;
    }
    for (Index i = 0; i < probe.tokens; ++i) m.word.row(i) = x.segment(off + i * d, d).transpose();
    const auto t = forward(m, p);
    return loss_and_gradients(t, gold, p).loss;
  };

  GradCheckReport report;
  std::map<std::string, double> worst;
  std::vector<std::string> order;
  Eigen::VectorXd probe_theta = theta;
  for (const auto& [group, range] : ranges) {
    if (worst.emplace(group, 0.0).second) order.push_back(group);
    for (Index i = range.first; i < range.first + range.second; ++i) {
      probe_theta[i] = theta[i] + epsilon;
      const double up = objective(probe_theta);
      probe_theta[i] = theta[i] - epsilon;
      const double down = objective(probe_theta);
      probe_theta[i] = theta[i];
      if (!std::isfinite(up) || !std::isfinite(down)) throw NumericError("non-finite loss at probe");
      const double err = relative_error(analytic[i], (up - down) / (2.0 * epsilon));
      worst[group] = std::max(worst[group], err);
    }
  }
  for (const auto& g : order) {
    report.groups.push_back({g, worst[g]});
    report.max_error = std::max(report.max_error, worst[g]);
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

template <typename Scalar>
RunOutcome run_typed(const TrainConfig& cfg, const ExperimentData& data) {
  RunOutcome out;
  out.variant = cfg.model.variant();
  out.seed = cfg.seed;
  auto result = train<Scalar>(*data.trn, *data.dev, *data.words, data.lexicon, cfg);
  const Dataset& scored = data.tst != nullptr ? *data.tst : *data.dev;
  auto docs = prepare_documents(scored, *data.words, data.lexicon, result.params);
  out.score = 100.0 * metric_value(evaluate(result.params, docs, cfg.scheme), cfg.effective_metric());
  out.history = std::move(result.history);
  return out;
}

}  // namespace

RunOutcome run_experiment(const TrainConfig& cfg, const ExperimentData& data) {
  if (data.trn == nullptr || data.dev == nullptr || data.words == nullptr) {
    throw UsageError("experiments need training data, dev data and word embeddings");
  }
  try {
    return cfg.precision == Precision::Float64 ? run_typed<double>(cfg, data) : run_typed<float>(cfg, data);
  } catch (const NumericError& err) {
    RunOutcome out;
    out.variant = cfg.model.variant();
    out.seed = cfg.seed;
    out.error = err.what();
    return out;
  }
}

std::vector<std::uint64_t> default_seeds() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; }

GroupStats group_run(const TrainConfig& base, const std::vector<std::uint64_t>& seeds,
                     const std::vector<Variant>& variants, const ExperimentData& data, int threads) {
  if (seeds.size() < 2) throw UsageError("group runs need at least two seeds");
  if (variants.empty()) throw UsageError("group runs need at least one variant");

  std::vector<TrainConfig> jobs;
  for (const auto& v : variants) {
    for (const auto seed : seeds) {
      TrainConfig cfg = base;
      cfg.model.mode = v.mode;
      cfg.model.eav = v.eav;
      cfg.seed = seed;
      cfg.validate();
      jobs.push_back(cfg);
    }
  }

  GroupStats stats;
  stats.runs.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        stats.runs[i] = run_experiment(jobs[i], data);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t vi = 0; vi < variants.size(); ++vi) {
    VariantStats vs;
    vs.variant = variants[vi];
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const auto& run = stats.runs[vi * seeds.size() + si];
      if (run.score) {
        vs.scores.push_back({run.seed, *run.score});
      } else {
        stats.warnings.push_back(fmt::format("{} seed {} aborted: {}", variant_name(run.variant), run.seed,
                                             run.error));
      }
    }
    if (!vs.scores.empty()) {
      std::vector<double> values;
      for (const auto& [seed, score] : vs.scores) values.push_back(score);
      vs.box = box_stats(values);
    } else {
      stats.warnings.push_back(fmt::format("{}: every run aborted", variant_name(vs.variant)));
    }
    stats.variants.push_back(std::move(vs));
  }
  return stats;
}

SweepResult embedding_size_sweep(const TrainConfig& base, const ExperimentData& data,
                                 const std::vector<std::filesystem::path>& embedding_files,
                                 const std::vector<Variant>& variants, int runs) {
  if (embedding_files.empty()) throw UsageError("the sweep needs at least one embedding file");
  if (runs < 1) throw UsageError("runs per size must be positive");
  for (const auto& f : embedding_files) {
    if (!std::filesystem::exists(f)) throw DataError(fmt::format("missing embedding file '{}'", f.string()));
  }
  SweepResult result;
  for (const auto& v : variants) result.rows.push_back({v, {}, {}, 0.0});

  for (const auto& file : embedding_files) {
    const auto words = load_word_embeddings(file, base.oov_seed);
    result.sizes.push_back(words.dimension());
    ExperimentData sized = data;
    sized.words = &words;
    for (auto& row : result.rows) {
      std::vector<double> scores;
      for (int r = 1; r <= runs; ++r) {
        TrainConfig cfg = base;
        cfg.model.mode = row.variant.mode;
        cfg.model.eav = row.variant.eav;
        cfg.seed = static_cast<std::uint64_t>(r);
        const auto out = run_experiment(cfg, sized);
        if (out.score) {
          scores.push_back(*out.score);
        } else {
          result.warnings.push_back(fmt::format("{} d={} seed {} aborted: {}", variant_name(row.variant),
                                                words.dimension(), r, out.error));
        }
      }
      row.means.push_back(scores.empty() ? std::nan("") : mean(scores));
      row.scores.push_back(std::move(scores));
    }
  }
  for (auto& row : result.rows) {
    std::vector<double> finite;
    for (double m : row.means) {
      if (std::isfinite(m)) finite.push_back(m);
    }
    row.stddev = finite.empty() ? std::nan("") : population_stddev(finite);
  }
  return result;
}

// ---------------------------------------------------------------------------

#define LEXCNN_INSTANTIATE(Scalar)                                                                        \
  template std::vector<PreparedDocument<Scalar>> prepare_documents(                                      \
      const Dataset&, const WordEmbeddingTable&, const LexiconTable*, const ModelParameters<Scalar>&);    \
  template void refresh_tuned_rows(DocumentMatrices<Scalar>&, const TunedEmbeddings<Scalar>&);             \
  template BatchGradients<Scalar> batch_gradients(const ModelParameters<Scalar>&,                         \
                                                  std::vector<PreparedDocument<Scalar>>&,                 \
                                                  const std::vector<std::size_t>&, DropoutOptions);       \
  template class AdamOptimizer<Scalar>;                                                                   \
  template ConfusionMatrix evaluate(const ModelParameters<Scalar>&, std::vector<PreparedDocument<Scalar>>&, \
                                    LabelScheme);                                                         \
  template TrainResult<Scalar> train(const Dataset&, const Dataset&, const WordEmbeddingTable&,           \
                                     const LexiconTable*, const TrainConfig&);

LEXCNN_INSTANTIATE(double)
LEXCNN_INSTANTIATE(float)

#undef LEXCNN_INSTANTIATE

}  // namespace lexcnn
