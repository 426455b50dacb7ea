#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

#include "lexcnn/config.hpp"
#include "lexcnn/corpus.hpp"
#include "lexcnn/error.hpp"
#include "lexcnn/types.hpp"

namespace lexcnn {

enum class OovPolicy { SeededUniform, Zero };

/// Pre-trained word vectors of a fixed dimension.
///
/// Words missing from the table get a fallback vector drawn from U[-0.25, 0.25],
/// a pure function of (oov_seed, word), so lookups are deterministic in any order
/// and from any thread.
class WordEmbeddingTable {
 public:
  WordEmbeddingTable() = default;
  WordEmbeddingTable(Index dimension, std::uint64_t oov_seed,
                     OovPolicy policy = OovPolicy::SeededUniform);

  Index dimension() const { return dimension_; }
  std::size_t size() const { return words_.size(); }
  std::uint64_t oov_seed() const { return oov_seed_; }
  OovPolicy oov_policy() const { return policy_; }
  std::size_t duplicate_count() const { return duplicates_; }
  const std::vector<std::string>& words() const { return words_; }

  bool contains(const std::string& word) const { return index_.count(word) != 0; }

  /// Inserts or overwrites (counted as a duplicate).
  void insert(const std::string& word, const Eigen::Ref<const Eigen::VectorXd>& vector);

  /// Stored vector, or the OOV fallback.
  Eigen::VectorXd lookup(const std::string& word) const;
  Eigen::VectorXd oov_vector(const std::string& word) const;

 private:
  Index dimension_ = 0;
  std::uint64_t oov_seed_ = 0;
  OovPolicy policy_ = OovPolicy::SeededUniform;
  std::size_t duplicates_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> data_;
};

/// Reads the textual format: header `V d`, then `word v1 ... vd` per line.
WordEmbeddingTable load_word_embeddings(const std::filesystem::path& path, std::uint64_t oov_seed,
                                        OovPolicy policy = OovPolicy::SeededUniform);

struct LexiconSpan {
  std::string source;
  Index begin = 0;
  Index end = 0;  // exclusive

  friend bool operator==(const LexiconSpan&, const LexiconSpan&) = default;
};

/// word -> concatenated sentiment scores in [-1,1]^e. Unknown words map to zeros.
class LexiconTable {
 public:
  LexiconTable() = default;
  explicit LexiconTable(std::vector<LexiconSpan> spans);

  Index width() const { return width_; }
  const std::vector<LexiconSpan>& spans() const { return spans_; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  bool contains(const std::string& word) const { return index_.count(word) != 0; }
  /// Values must lie in [-1,1].
  void insert(const std::string& word, const Eigen::Ref<const Eigen::VectorXd>& scores);
  Eigen::VectorXd lookup(const std::string& word) const;

 private:
  Index width_ = 0;
  std::vector<LexiconSpan> spans_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> data_;
};

/// Concatenates lexicon sources in the given order. A column whose values leave
/// [-1,1] is rescaled with 2(x-min)/(max-min)-1 over its observed values; a
/// constant out-of-range column is clamped instead.
LexiconTable build_lexicon_table(const std::vector<std::filesystem::path>& sources);

Eigen::VectorXd lexicon_vector(const LexiconTable& table, const std::string& word);

void save_lexicon_table(const LexiconTable& table, const std::filesystem::path& path);
LexiconTable load_lexicon_table(const std::filesystem::path& path);
bool is_serialized_lexicon(const std::filesystem::path& path);

/// Percentage of word types in `ds` present in `table`; OOV fallbacks do not count.
template <typename Table>
double coverage(const Table& table, const Dataset& ds) {
  std::unordered_map<std::string, bool> types;
  for (const auto& doc : ds.documents) {
    for (const auto& tok : doc.tokens) types.emplace(tok, false);
  }
  if (types.empty()) throw DataError("coverage of an empty dataset is undefined");
  std::size_t covered = 0;
  for (const auto& [word, unused] : types) {
    if (table.contains(word)) ++covered;
  }
  return 100.0 * static_cast<double>(covered) / static_cast<double>(types.size());
}

/// Fine-tuned copies of embedding rows, keyed by word.
template <typename Scalar>
struct TunedEmbeddings {
  std::vector<std::string> words;
  std::unordered_map<std::string, Index> index;
  RowMatrix<Scalar> rows;

  bool empty() const { return words.empty(); }
  std::optional<Index> find(const std::string& word) const {
    const auto it = index.find(word);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

/// Tunable rows for every type of `docs`, initialized from the table (with OOV fallback).
template <typename Scalar>
TunedEmbeddings<Scalar> make_tuned_embeddings(const WordEmbeddingTable& table,
                                              const std::vector<const Dataset*>& sets) {
  TunedEmbeddings<Scalar> tuned;
  for (const auto* ds : sets) {
    for (const auto& doc : ds->documents) {
      for (const auto& tok : doc.tokens) {
        if (tuned.index.emplace(tok, static_cast<Index>(tuned.words.size())).second) {
          tuned.words.push_back(tok);
        }
      }
    }
  }
  tuned.rows.resize(static_cast<Index>(tuned.words.size()), table.dimension());
  for (Index i = 0; i < tuned.rows.rows(); ++i) {
    tuned.rows.row(i) = table.lookup(tuned.words[static_cast<std::size_t>(i)]).template cast<Scalar>().transpose();
  }
  return tuned;
}

/// Input matrices of one document.
///
/// Both matrices have `rows()` rows: the document's tokens followed by trailing
/// zero rows up to the longest filter. In multichannel mode the lexicon matrix is
/// zero-padded on the right to the word width, scores in the first columns.
template <typename Scalar>
struct DocumentMatrices {
  RowMatrix<Scalar> word;
  RowMatrix<Scalar> lexicon;  // 0 columns when no lexicon is used
  Index tokens = 0;           // non-padding rows
  Index lexicon_width = 0;    // e, before any multichannel padding
  std::vector<Index> tuned_rows;  // per token: row in TunedEmbeddings, or -1

  Index rows() const { return word.rows(); }
  Index padding_rows() const { return word.rows() - tokens; }
};

template <typename Scalar>
DocumentMatrices<Scalar> document_matrices(const Document& doc, const WordEmbeddingTable& words,
                                           const LexiconTable* lexicon, IntegrationMode mode,
                                           int min_rows,
                                           const TunedEmbeddings<Scalar>* tuned = nullptr) {
  if (doc.tokens.empty()) throw DataError(fmt::format("document '{}' has no tokens", doc.id));
  const Index d = words.dimension();
  const Index e = (lexicon != nullptr && uses_lexicon(mode)) ? lexicon->width() : 0;
  if (mode == IntegrationMode::Multichannel && e > d) {
    throw DataError(fmt::format("lexicon width exceeds embedding width ({} > {})", e, d));
  }
  const Index lex_cols = mode == IntegrationMode::Multichannel ? (e > 0 ? d : 0) : e;

  DocumentMatrices<Scalar> dm;
  dm.tokens = static_cast<Index>(doc.tokens.size());
  dm.lexicon_width = e;
  const Index n = std::max<Index>(dm.tokens, min_rows);
  dm.word = RowMatrix<Scalar>::Zero(n, d);
  dm.lexicon = RowMatrix<Scalar>::Zero(n, lex_cols);
  dm.tuned_rows.assign(doc.tokens.size(), -1);
  for (Index i = 0; i < dm.tokens; ++i) {
    const auto& tok = doc.tokens[static_cast<std::size_t>(i)];
    const auto row = tuned != nullptr ? tuned->find(tok) : std::nullopt;
    if (row) {
      dm.word.row(i) = tuned->rows.row(*row);
      dm.tuned_rows[static_cast<std::size_t>(i)] = *row;
    } else {
      dm.word.row(i) = words.lookup(tok).template cast<Scalar>().transpose();
    }
    if (e > 0) dm.lexicon.row(i).head(e) = lexicon->lookup(tok).template cast<Scalar>().transpose();
  }
  return dm;
}

}  // namespace lexcnn
