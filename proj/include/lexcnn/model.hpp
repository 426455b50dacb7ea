#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <vector>

#include <fmt/format.h>

#include "lexcnn/config.hpp"
#include "lexcnn/embeddings.hpp"
#include "lexcnn/error.hpp"
#include "lexcnn/types.hpp"
#include "lexcnn/util.hpp"

namespace lexcnn {

// ---------------------------------------------------------------------------
// Parameter blocks
// ---------------------------------------------------------------------------

/// Convolution filters grouped by length. For length l, `weights[i]` is
/// filters x (l*width): row k is filter k flattened row by row, matching the
/// memory layout of an l-row window of a row-major document matrix.
template <typename Scalar>
struct ConvBlock {
  std::vector<int> lengths;
  Index width = 0;
  int filters = 0;
  std::vector<Matrix<Scalar>> weights;
  std::vector<Vector<Scalar>> biases;

  static ConvBlock zeros(const std::vector<int>& lengths, Index width, int filters) {
    ConvBlock b;
    b.lengths = lengths;
    b.width = width;
    b.filters = filters;
    for (int l : lengths) {
      b.weights.push_back(Matrix<Scalar>::Zero(filters, l * width));
      b.biases.push_back(Vector<Scalar>::Zero(filters));
    }
    return b;
  }

  Index output_size() const { return static_cast<Index>(filters) * static_cast<Index>(lengths.size()); }
  int max_length() const { return *std::max_element(lengths.begin(), lengths.end()); }
};

/// Length-1 filters producing the attention matrix.
template <typename Scalar>
struct AttentionBlock {
  Matrix<Scalar> weights;  // filters x width
  Vector<Scalar> biases;

  static AttentionBlock zeros(int filters, Index width) {
    return {Matrix<Scalar>::Zero(filters, width), Vector<Scalar>::Zero(filters)};
  }
  Index width() const { return weights.cols(); }
};

template <typename Scalar>
struct ModelParameters {
  ModelConfig config;
  Index word_dim = 0;     // d
  Index lexicon_dim = 0;  // e, 0 when no lexicon is used
  ConvBlock<Scalar> word_conv;
  std::optional<ConvBlock<Scalar>> lexicon_conv;
  std::optional<AttentionBlock<Scalar>> word_attention;
  std::optional<AttentionBlock<Scalar>> lexicon_attention;
  Matrix<Scalar> softmax_weights;  // penultimate x classes
  Vector<Scalar> softmax_bias;
  TunedEmbeddings<Scalar> tuned;

  Index penultimate_size() const { return softmax_weights.rows(); }
};

/// Width of the matrix the word convolution runs over.
inline Index word_input_width(IntegrationMode mode, Index d, Index e) {
  return mode == IntegrationMode::NaiveConcat ? d + e : d;
}

inline bool has_lexicon_attention(const ModelConfig& cfg, Index e) {
  return cfg.eav && e > 0 &&
         (cfg.mode == IntegrationMode::Multichannel || cfg.mode == IntegrationMode::SeparateConv);
}

/// Pooled features (one per filter) plus any attention vectors.
inline Index penultimate_size(const ModelConfig& cfg, Index d, Index e) {
  Index size = static_cast<Index>(cfg.word_filters) * static_cast<Index>(cfg.word_filter_lengths.size());
  if (cfg.mode == IntegrationMode::SeparateConv) {
    size += static_cast<Index>(cfg.lexicon_filters) * static_cast<Index>(cfg.lexicon_filter_lengths.size());
  }
  if (cfg.eav) {
    size += word_input_width(cfg.mode, d, e);
    if (has_lexicon_attention(cfg, e)) size += e;
  }
  return size;
}

/// All-zero parameters with the shapes implied by (cfg, d, e).
template <typename Scalar>
ModelParameters<Scalar> zero_parameters(const ModelConfig& cfg, Index d, Index e) {
  cfg.validate();
  if (d <= 0) throw DataError("word embedding dimension must be positive");
  if (!uses_lexicon(cfg.mode)) e = 0;
  if (cfg.mode == IntegrationMode::Multichannel && e > d) {
    throw DataError(fmt::format("lexicon width exceeds embedding width ({} > {})", e, d));
  }
  if (cfg.mode == IntegrationMode::SeparateConv && e == 0) {
    throw DataError("separate convolution requires a lexicon table");
  }
  ModelParameters<Scalar> p;
  p.config = cfg;
  p.word_dim = d;
  p.lexicon_dim = e;
  p.word_conv = ConvBlock<Scalar>::zeros(cfg.word_filter_lengths, word_input_width(cfg.mode, d, e),
                                         cfg.word_filters);
  if (cfg.mode == IntegrationMode::SeparateConv) {
    p.lexicon_conv = ConvBlock<Scalar>::zeros(cfg.lexicon_filter_lengths, e, cfg.lexicon_filters);
  }
  if (cfg.eav) {
    p.word_attention =
        AttentionBlock<Scalar>::zeros(cfg.word_attention_filters, word_input_width(cfg.mode, d, e));
    if (has_lexicon_attention(cfg, e)) {
      p.lexicon_attention = AttentionBlock<Scalar>::zeros(cfg.lexicon_attention_filters, e);
    }
  }
  p.softmax_weights = Matrix<Scalar>::Zero(penultimate_size(cfg, d, e), cfg.num_classes);
  p.softmax_bias = Vector<Scalar>::Zero(cfg.num_classes);
  return p;
}

/// A named contiguous tensor inside a ModelParameters value.
template <typename Scalar>
struct TensorView {
  std::string name;
  std::string group;
  Scalar* data = nullptr;
  Index size = 0;
  bool bias = false;
};

/// Every dense tensor except the tuned embeddings, in a fixed order. Works on
/// const parameters too (views then hold `const Scalar*`).
template <typename Params>
auto dense_tensors(Params& p) {
  using Element = std::remove_pointer_t<decltype(p.softmax_bias.data())>;
  std::vector<TensorView<Element>> out;
  auto add = [&](std::string name, std::string group, auto& t, bool bias) {
    out.push_back({std::move(name), std::move(group), t.data(), t.size(), bias});
  };
  auto add_conv = [&](const char* group, auto& b) {
    for (std::size_t i = 0; i < b.lengths.size(); ++i) {
      add(fmt::format("{}.w{}", group, b.lengths[i]), group, b.weights[i], false);
      add(fmt::format("{}.b{}", group, b.lengths[i]), group, b.biases[i], true);
    }
  };
  add_conv("word_conv", p.word_conv);
  if (p.lexicon_conv) add_conv("lexicon_conv", *p.lexicon_conv);
  if (p.word_attention) {
    add("word_attention.w", "word_attention", p.word_attention->weights, false);
    add("word_attention.b", "word_attention", p.word_attention->biases, true);
  }
  if (p.lexicon_attention) {
    add("lexicon_attention.w", "lexicon_attention", p.lexicon_attention->weights, false);
    add("lexicon_attention.b", "lexicon_attention", p.lexicon_attention->biases, true);
  }
  add("softmax.w", "softmax", p.softmax_weights, false);
  add("softmax.b", "softmax", p.softmax_bias, true);
  return out;
}

/// Weights uniform in [-range, range] drawn in dense_tensors order; biases zero.
template <typename Scalar>
ModelParameters<Scalar> init_parameters(const ModelConfig& cfg, Index d, Index e, std::mt19937_64& gen,
                                        double range) {
  auto p = zero_parameters<Scalar>(cfg, d, e);
  for (auto& t : dense_tensors(p)) {
    if (t.bias) continue;
    for (Index i = 0; i < t.size; ++i) t.data[i] = static_cast<Scalar>(uniform(gen, -range, range));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Layers
// ---------------------------------------------------------------------------

namespace detail {

template <typename Scalar>
using WindowMap =
    Eigen::Map<const Matrix<Scalar>, Eigen::Unaligned, Eigen::OuterStride<>>;

/// Column j is the flattened window of rows j..j+l-1 (columns overlap in memory).
template <typename Scalar>
WindowMap<Scalar> windows(const RowMatrix<Scalar>& s, int l) {
  const Index count = s.rows() - l + 1;
  return WindowMap<Scalar>(s.data(), l * s.cols(), count, Eigen::OuterStride<>(s.cols()));
}

template <typename Scalar>
Scalar relu(Scalar x) {
  return x > Scalar(0) ? x : Scalar(0);
}

}  // namespace detail

/// Responses of all filters of one length: rows are window positions, columns filters.
template <typename Scalar>
struct ConvResponse {
  int length = 0;
  Matrix<Scalar> pre;   // (n-l+1) x filters, before rectification
  Matrix<Scalar> post;  // max(0, pre)
};

/// Filter responses without bias or activation. The rows of `s` must be contiguous.
template <typename Scalar>
Matrix<Scalar> conv_linear(const RowMatrix<Scalar>& s, const Matrix<Scalar>& weights, int length) {
  if (s.rows() < length) {
    throw DataError(fmt::format("document has {} rows, filter length {} needs at least that many",
                                s.rows(), length));
  }
  if (weights.cols() != length * s.cols()) throw DataError("filter width does not match the input");
  return (weights * detail::windows(s, length)).transpose();
}

/// Rectified convolution over every window; `extra` (multichannel) is a second
/// channel whose responses are summed with the first before bias and activation.
template <typename Scalar>
std::vector<ConvResponse<Scalar>> conv_forward(const RowMatrix<Scalar>& s, const ConvBlock<Scalar>& block,
                                               const RowMatrix<Scalar>* extra = nullptr) {
  std::vector<ConvResponse<Scalar>> out;
  out.reserve(block.lengths.size());
  for (std::size_t i = 0; i < block.lengths.size(); ++i) {
    const int l = block.lengths[i];
    ConvResponse<Scalar> r;
    r.length = l;
    r.pre = conv_linear(s, block.weights[i], l);
    if (extra != nullptr && extra->cols() > 0) r.pre += conv_linear(*extra, block.weights[i], l);
    r.pre.rowwise() += block.biases[i].transpose();
    r.post = r.pre.unaryExpr([](Scalar x) { return detail::relu(x); });
    out.push_back(std::move(r));
  }
  return out;
}

template <typename Scalar>
struct PoolResult {
  Scalar value{};
  Index index = 0;
};

/// Maximum element; ties go to the lowest index.
template <typename Derived>
PoolResult<typename Derived::Scalar> global_max_pool(const Eigen::DenseBase<Derived>& v) {
  if (v.size() == 0) throw DataError("max pooling over an empty vector");
  PoolResult<typename Derived::Scalar> r{v(0), 0};
  for (Index i = 1; i < v.size(); ++i) {
    if (v(i) > r.value) r = {v(i), i};
  }
  return r;
}

template <typename Scalar>
struct AttentionOutput {
  Matrix<Scalar> scores;       // s_a, n x filters, after tanh
  Vector<Scalar> weights;      // v_a, row-wise max of scores
  std::vector<Index> argmax;   // winning filter per row
  Vector<Scalar> summary;      // v_e = S^T v_a
};

/// Attention over the rows of `s`: tanh of length-1 filter responses, max per
/// row, then the attention-weighted column sum.
template <typename Derived, typename Scalar>
AttentionOutput<Scalar> embedding_attention(const Eigen::MatrixBase<Derived>& s,
                                            const AttentionBlock<Scalar>& block) {
  if (s.cols() != block.width()) throw DataError("attention filter width does not match the input");
  if (s.rows() < 1) throw DataError("attention needs at least one row");
  AttentionOutput<Scalar> a;
  a.scores = (s * block.weights.transpose()).rowwise() + block.biases.transpose();
  a.scores = a.scores.array().tanh();
  a.weights.resize(s.rows());
  a.argmax.resize(static_cast<std::size_t>(s.rows()));
  for (Index i = 0; i < s.rows(); ++i) {
    const auto r = global_max_pool(a.scores.row(i));
    a.weights[i] = r.value;
    a.argmax[static_cast<std::size_t>(i)] = r.index;
  }
  a.summary = s.transpose() * a.weights;
  return a;
}

// ---------------------------------------------------------------------------
// Forward / backward
// ---------------------------------------------------------------------------

template <typename Scalar>
struct PooledFeature {
  std::size_t length_slot = 0;  // index into ConvBlock::lengths
  Index filter = 0;
  Index position = 0;  // argmax window
  Scalar pre{};        // pre-activation at the argmax
};

struct AttentionRecord {
  std::vector<std::string> tokens;
  std::vector<double> word_weights;
  std::optional<std::vector<double>> lexicon_weights;
};

template <typename Scalar>
struct ForwardTrace {
  IntegrationMode mode = IntegrationMode::Base;
  bool eav = false;
  Index tokens = 0;
  Index word_dim = 0;
  Index lexicon_width = 0;

  RowMatrix<Scalar> word_input;     // NC: the concatenated n x (d+e) matrix
  RowMatrix<Scalar> lexicon_input;  // MC: padded second channel; SC: n x e
  std::vector<ConvResponse<Scalar>> word_conv;
  std::vector<ConvResponse<Scalar>> lexicon_conv;
  std::vector<PooledFeature<Scalar>> word_pool;
  std::vector<PooledFeature<Scalar>> lexicon_pool;
  std::optional<AttentionOutput<Scalar>> word_attention;
  std::optional<AttentionOutput<Scalar>> lexicon_attention;

  Vector<Scalar> penultimate;
  Vector<Scalar> dropout_mask;  // empty when dropout is off
  Vector<Scalar> logits;
  Vector<Scalar> probabilities;

  int predicted() const { return static_cast<int>(global_max_pool(probabilities).index); }
};

struct DropoutOptions {
  double rate = 0.0;
  std::mt19937_64* gen = nullptr;
};

namespace detail {

template <typename Scalar>
std::vector<PooledFeature<Scalar>> pool_all(const std::vector<ConvResponse<Scalar>>& responses,
                                           Vector<Scalar>& out, Index offset) {
  std::vector<PooledFeature<Scalar>> pooled;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const auto& r = responses[i];
    for (Index k = 0; k < r.post.cols(); ++k) {
      const auto best = global_max_pool(r.post.col(k));
      out[offset++] = best.value;
      pooled.push_back({i, k, best.index, r.pre(best.index, k)});
    }
  }
  return pooled;
}

template <typename Scalar>
Vector<Scalar> softmax(const Vector<Scalar>& logits) {
  const Scalar top = logits.maxCoeff();
  Vector<Scalar> p = (logits.array() - top).exp();
  return p / p.sum();
}

}  // namespace detail

template <typename Scalar>
ForwardTrace<Scalar> forward(const DocumentMatrices<Scalar>& dm, const ModelParameters<Scalar>& p,
                             DropoutOptions dropout = {}) {
  const auto& cfg = p.config;
  const Index d = p.word_dim;
  const Index e = p.lexicon_dim;
  if (dm.word.cols() != d) {
    throw DataError(fmt::format("word matrix has width {}, model expects {}", dm.word.cols(), d));
  }
  if (uses_lexicon(cfg.mode) && dm.lexicon_width != e) {
    throw DataError(fmt::format("lexicon matrix has width {}, model expects {}", dm.lexicon_width, e));
  }
  if (dm.rows() < cfg.max_filter_length()) {
    throw DataError("document matrices are shorter than the longest filter");
  }

  ForwardTrace<Scalar> t;
  t.mode = cfg.mode;
  t.eav = cfg.eav;
  t.tokens = dm.tokens;
  t.word_dim = d;
  t.lexicon_width = e;

  switch (cfg.mode) {
    case IntegrationMode::Base:
      t.word_input = dm.word;
      break;
    case IntegrationMode::NaiveConcat:
      t.word_input.resize(dm.rows(), d + e);
      t.word_input.leftCols(d) = dm.word;
      if (e > 0) t.word_input.rightCols(e) = dm.lexicon;
      break;
    case IntegrationMode::Multichannel:
      t.word_input = dm.word;
      if (e > 0) {
        if (dm.lexicon.cols() != d) throw DataError("multichannel lexicon channel must be padded to d");
        t.lexicon_input = dm.lexicon;
      }
      break;
    case IntegrationMode::SeparateConv:
      t.word_input = dm.word;
      t.lexicon_input = dm.lexicon;
      break;
  }

  t.penultimate = Vector<Scalar>::Zero(p.penultimate_size());
  Index offset = 0;
  const RowMatrix<Scalar>* second_channel =
      cfg.mode == IntegrationMode::Multichannel && e > 0 ? &t.lexicon_input : nullptr;
  t.word_conv = conv_forward(t.word_input, p.word_conv, second_channel);
  t.word_pool = detail::pool_all(t.word_conv, t.penultimate, offset);
  offset += p.word_conv.output_size();
  if (p.lexicon_conv) {
    t.lexicon_conv = conv_forward(t.lexicon_input, *p.lexicon_conv);
    t.lexicon_pool = detail::pool_all(t.lexicon_conv, t.penultimate, offset);
    offset += p.lexicon_conv->output_size();
  }
  // Attention sees only the token rows, never the trailing padding.
  if (p.word_attention) {
    t.word_attention = embedding_attention(t.word_input.topRows(t.tokens), *p.word_attention);
    t.penultimate.segment(offset, t.word_attention->summary.size()) = t.word_attention->summary;
    offset += t.word_attention->summary.size();
  }
  if (p.lexicon_attention) {
    t.lexicon_attention =
        embedding_attention(t.lexicon_input.topLeftCorner(t.tokens, e), *p.lexicon_attention);
    t.penultimate.segment(offset, e) = t.lexicon_attention->summary;
    offset += e;
  }

  Vector<Scalar> h = t.penultimate;
  if (dropout.rate > 0.0) {
    if (dropout.gen == nullptr) throw UsageError("dropout requires a random generator");
    const Scalar keep_scale = Scalar(1) / static_cast<Scalar>(1.0 - dropout.rate);
    t.dropout_mask.resize(h.size());
    for (Index i = 0; i < h.size(); ++i) {
      t.dropout_mask[i] = unit_uniform(*dropout.gen) >= dropout.rate ? keep_scale : Scalar(0);
    }
    h.array() *= t.dropout_mask.array();
  }
  t.logits = p.softmax_weights.transpose() * h + p.softmax_bias;
  t.probabilities = detail::softmax(t.logits);
  return t;
}

/// Gradient with respect to every dense tensor plus the word input matrix
/// (padded rows included; only token rows backed by tuned embeddings are used).
template <typename Scalar>
struct Gradients {
  ModelParameters<Scalar> params;
  RowMatrix<Scalar> word_input;
};

template <typename Scalar>
struct LossAndGradients {
  Scalar loss{};
  Gradients<Scalar> grads;
};

namespace detail {

template <typename Scalar>
void conv_backward(const std::vector<PooledFeature<Scalar>>& pooled, const Vector<Scalar>& dh, Index offset,
                   const ConvBlock<Scalar>& block, const RowMatrix<Scalar>& input,
                   const RowMatrix<Scalar>* extra, ConvBlock<Scalar>& grad, RowMatrix<Scalar>* dinput) {
  for (std::size_t f = 0; f < pooled.size(); ++f) {
    const auto& pf = pooled[f];
    const Scalar g = dh[offset + static_cast<Index>(f)];
    if (!(pf.pre > Scalar(0)) || g == Scalar(0)) continue;
    const int l = block.lengths[pf.length_slot];
    const Index span = l * input.cols();
    const Index start = pf.position * input.cols();
    Eigen::Map<const Vector<Scalar>> window(input.data() + start, span);
    grad.weights[pf.length_slot].row(pf.filter) += g * window.transpose();
    if (extra != nullptr && extra->cols() > 0) {
      Eigen::Map<const Vector<Scalar>> window2(extra->data() + start, span);
      grad.weights[pf.length_slot].row(pf.filter) += g * window2.transpose();
    }
    grad.biases[pf.length_slot][pf.filter] += g;
    if (dinput != nullptr) {
      Eigen::Map<Vector<Scalar>> dwindow(dinput->data() + start, span);
      dwindow += g * block.weights[pf.length_slot].row(pf.filter).transpose();
    }
  }
}

template <typename Derived, typename DerivedGrad, typename Scalar>
void attention_backward(const AttentionOutput<Scalar>& a, const Vector<Scalar>& dsummary,
                        const Eigen::MatrixBase<Derived>& s, const AttentionBlock<Scalar>& block,
                        AttentionBlock<Scalar>& grad, Eigen::MatrixBase<DerivedGrad>& ds) {
  // v_e = S^T v_a
  ds += a.weights * dsummary.transpose();
  const Vector<Scalar> dweights = s * dsummary;
  for (Index i = 0; i < s.rows(); ++i) {
    const Index k = a.argmax[static_cast<std::size_t>(i)];
    const Scalar v = a.weights[i];
    const Scalar dz = dweights[i] * (Scalar(1) - v * v);
    grad.weights.row(k) += dz * s.row(i);
    grad.biases[k] += dz;
    ds.row(i) += dz * block.weights.row(k);
  }
}

}  // namespace detail

/// Cross-entropy of the gold class and its exact gradient. Max pooling routes the
/// gradient to the argmax window; rectification uses the zero subgradient at 0.
template <typename Scalar>
LossAndGradients<Scalar> loss_and_gradients(const ForwardTrace<Scalar>& t, int gold,
                                            const ModelParameters<Scalar>& p) {
  if (t.probabilities.size() == 0 || t.penultimate.size() != p.penultimate_size()) {
    throw UsageError("forward trace is missing or does not match the parameters");
  }
  if (gold < 0 || gold >= t.probabilities.size()) throw UsageError("gold label out of range");

  LossAndGradients<Scalar> out;
  // log-softmax directly from the logits keeps the loss finite for tiny probabilities.
  const Scalar top = t.logits.maxCoeff();
  const Scalar log_norm = top + std::log((t.logits.array() - top).exp().sum());
  out.loss = log_norm - t.logits[gold];

  auto& g = out.grads.params;
  g = zero_parameters<Scalar>(p.config, p.word_dim, p.lexicon_dim);

  Vector<Scalar> dlogits = t.probabilities;
  dlogits[gold] -= Scalar(1);
  Vector<Scalar> h = t.penultimate;
  if (t.dropout_mask.size() > 0) h.array() *= t.dropout_mask.array();
  g.softmax_weights = h * dlogits.transpose();
  g.softmax_bias = dlogits;
  Vector<Scalar> dh = p.softmax_weights * dlogits;
  if (t.dropout_mask.size() > 0) dh.array() *= t.dropout_mask.array();

  RowMatrix<Scalar> dinput = RowMatrix<Scalar>::Zero(t.word_input.rows(), t.word_input.cols());
  Index offset = 0;
  const RowMatrix<Scalar>* second_channel =
      t.mode == IntegrationMode::Multichannel && t.lexicon_input.cols() > 0 ? &t.lexicon_input : nullptr;
  detail::conv_backward(t.word_pool, dh, offset, p.word_conv, t.word_input, second_channel, g.word_conv,
                        &dinput);
  offset += p.word_conv.output_size();
  if (p.lexicon_conv) {
    detail::conv_backward(t.lexicon_pool, dh, offset, *p.lexicon_conv, t.lexicon_input,
                          static_cast<const RowMatrix<Scalar>*>(nullptr), *g.lexicon_conv,
                          static_cast<RowMatrix<Scalar>*>(nullptr));
    offset += p.lexicon_conv->output_size();
  }
  if (p.word_attention) {
    const Index w = p.word_attention->width();
    const Vector<Scalar> dsummary = dh.segment(offset, w);
    auto ds = dinput.topRows(t.tokens);
    detail::attention_backward(*t.word_attention, dsummary, t.word_input.topRows(t.tokens),
                               *p.word_attention, *g.word_attention, ds);
    offset += w;
  }
  if (p.lexicon_attention) {
    const Index e = p.lexicon_dim;
    const Vector<Scalar> dsummary = dh.segment(offset, e);
    // Lexicon rows are fixed inputs; their gradient is discarded.
    RowMatrix<Scalar> dlex = RowMatrix<Scalar>::Zero(t.tokens, e);
    detail::attention_backward(*t.lexicon_attention, dsummary, t.lexicon_input.topLeftCorner(t.tokens, e),
                               *p.lexicon_attention, *g.lexicon_attention, dlex);
    offset += e;
  }
  out.grads.word_input = dinput.leftCols(t.word_dim);
  return out;
}

/// Per-token attention weights for reporting; requires an EAV model.
template <typename Scalar>
AttentionRecord attention_record(const ForwardTrace<Scalar>& t, const std::vector<std::string>& tokens) {
  if (!t.word_attention) throw UsageError("attention unavailable for this model");
  AttentionRecord r;
  r.tokens = tokens;
  r.word_weights.assign(t.word_attention->weights.data(),
                        t.word_attention->weights.data() + t.word_attention->weights.size());
  if (t.lexicon_attention) {
    r.lexicon_weights.emplace(t.lexicon_attention->weights.data(),
                              t.lexicon_attention->weights.data() + t.lexicon_attention->weights.size());
  }
  return r;
}

}  // namespace lexcnn
