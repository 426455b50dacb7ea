#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lexcnn/config.hpp"
#include "lexcnn/corpus.hpp"
#include "lexcnn/embeddings.hpp"
#include "lexcnn/eval.hpp"
#include "lexcnn/model.hpp"
#include "lexcnn/stats.hpp"

namespace lexcnn {

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_metric = 0.0;
  double seconds = 0.0;  // wall clock, never serialized
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;  // 1-based; earliest epoch with the maximal dev metric
  double best_dev_metric = 0.0;
};

template <typename Scalar>
struct TrainResult {
  ModelParameters<Scalar> params;
  TrainHistory history;
};

/// A document's inputs plus its gold label, built once per training run.
template <typename Scalar>
struct PreparedDocument {
  DocumentMatrices<Scalar> matrices;
  int label = 0;
};

template <typename Scalar>
std::vector<PreparedDocument<Scalar>> prepare_documents(const Dataset& ds, const WordEmbeddingTable& words,
                                                        const LexiconTable* lexicon,
                                                        const ModelParameters<Scalar>& params);

/// Copies the current tuned embedding rows into the document's word matrix.
template <typename Scalar>
void refresh_tuned_rows(DocumentMatrices<Scalar>& dm, const TunedEmbeddings<Scalar>& tuned);

/// Averaged gradient of a mini-batch, with the tuned-embedding part kept sparse.
template <typename Scalar>
struct BatchGradients {
  double mean_loss = 0.0;
  ModelParameters<Scalar> dense;
  std::map<Index, Vector<Scalar>> embedding_rows;
};

/// Mean over `batch` of per-document losses and gradients. Dropout masks are drawn
/// in batch order from `dropout.gen`.
template <typename Scalar>
BatchGradients<Scalar> batch_gradients(const ModelParameters<Scalar>& params,
                                       std::vector<PreparedDocument<Scalar>>& docs,
                                       const std::vector<std::size_t>& batch, DropoutOptions dropout);

/// Adaptive first/second moment optimizer. Tuned embedding rows are updated
/// only when they receive a gradient.
template <typename Scalar>
class AdamOptimizer {
 public:
  AdamOptimizer(const ModelParameters<Scalar>& params, double learning_rate, double beta1, double beta2,
                double epsilon);
  void step(ModelParameters<Scalar>& params, const BatchGradients<Scalar>& grads);
  long long steps() const { return step_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long long step_ = 0;
  std::vector<Vector<Scalar>> m_, v_;
  RowMatrix<Scalar> m_rows_, v_rows_;
};

template <typename Scalar>
ConfusionMatrix evaluate(const ModelParameters<Scalar>& params, std::vector<PreparedDocument<Scalar>>& docs,
                         LabelScheme scheme);

/// Seeded mini-batch training with early stopping on the dev metric. Returns the
/// parameters of the best dev epoch. Deterministic in (data, tables, cfg).
template <typename Scalar>
TrainResult<Scalar> train(const Dataset& trn, const Dataset& dev, const WordEmbeddingTable& words,
                          const LexiconTable* lexicon, const TrainConfig& cfg);

// ---------------------------------------------------------------------------
// Gradient checking
// ---------------------------------------------------------------------------

/// |a - b| / max(|a|, |b|, 1e-8)
double relative_error(double analytic, double numeric);

/// Largest relative error between `analytic` and central differences of `f` at `theta`.
double max_relative_error(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& theta, const Eigen::VectorXd& analytic, double epsilon);

/// Random micro-instance used by grad_check.
struct GradCheckProbe {
  Index tokens = 7;
  Index word_dim = 5;
  Index lexicon_dim = 3;
  int word_filters = 4;
  int lexicon_filters = 2;
  int attention_filters = 3;
  int classes = 3;
  std::uint64_t seed = 1;
};

struct GradCheckReport {
  double max_error = 0.0;
  std::vector<std::pair<std::string, double>> groups;  // group -> max relative error
};

/// Compares analytic gradients with central differences for every parameter
/// group (and the word input rows) of a micro-model in cfg's mode.
GradCheckReport grad_check(const TrainConfig& cfg, const GradCheckProbe& probe, double epsilon);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct ExperimentData {
  const Dataset* trn = nullptr;
  const Dataset* dev = nullptr;
  const Dataset* tst = nullptr;  // scores use dev when absent
  const WordEmbeddingTable* words = nullptr;
  const LexiconTable* lexicon = nullptr;
};

struct RunOutcome {
  Variant variant;
  std::uint64_t seed = 0;
  std::optional<double> score;  // percent
  std::string error;
  TrainHistory history;
};

/// Trains one model in the configured precision and scores it (x100).
RunOutcome run_experiment(const TrainConfig& cfg, const ExperimentData& data);

struct VariantStats {
  Variant variant;
  std::vector<std::pair<std::uint64_t, double>> scores;  // (seed, score), seed order
  BoxStats box;
};

struct GroupStats {
  std::vector<VariantStats> variants;
  std::vector<RunOutcome> runs;  // (variant, seed) order
  std::vector<std::string> warnings;
};

std::vector<std::uint64_t> default_seeds();

/// Trains every (variant, seed) pair independently. Failed runs are excluded and
/// reported in `warnings`. `threads` > 1 runs members concurrently.
GroupStats group_run(const TrainConfig& base, const std::vector<std::uint64_t>& seeds,
                     const std::vector<Variant>& variants, const ExperimentData& data, int threads = 1);

struct SweepResult {
  std::vector<Index> sizes;
  struct Row {
    Variant variant;
    std::vector<std::vector<double>> scores;  // [size][run]
    std::vector<double> means;                // per size
    double stddev = 0.0;                      // population std of the per-size means
  };
  std::vector<Row> rows;
  std::vector<std::string> warnings;
};

/// One embedding file per size; each size is trained `runs` times (seeds 1..runs).
SweepResult embedding_size_sweep(const TrainConfig& base, const ExperimentData& data,
                                 const std::vector<std::filesystem::path>& embedding_files,
                                 const std::vector<Variant>& variants, int runs);

}  // namespace lexcnn
