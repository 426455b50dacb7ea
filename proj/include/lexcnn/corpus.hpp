#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lexcnn {

// Label order follows the usual table layout: most positive first.
enum class LabelScheme { ThreeClass, FiveClass };

enum class Split { Train, Dev, Test };

int num_classes(LabelScheme scheme);
const std::vector<std::string>& label_names(LabelScheme scheme);
std::optional<int> label_index(LabelScheme scheme, std::string_view name);
LabelScheme parse_scheme(std::string_view text);
std::string scheme_name(LabelScheme scheme);

struct Document {
  std::string id;
  std::vector<std::string> tokens;
  int label = 0;
};

struct Dataset {
  std::vector<Document> documents;
  LabelScheme scheme = LabelScheme::ThreeClass;
  Split split = Split::Train;

  std::size_t size() const { return documents.size(); }
  bool empty() const { return documents.empty(); }
};

/// Rule-based tokenizer applied uniformly to corpora, embedding keys and lexicon keys.
///
/// Rules, applied left to right over whitespace-separated chunks:
///  - ASCII letters are lowercased; other bytes pass through unchanged.
///  - Every ASCII punctuation character except `'`, `#`, `@` and `_` becomes its own token.
///  - An apostrophe followed by a letter starts a clitic token (`it's` -> `it 's`),
///    except that `n't` is split off as a unit (`can't` -> `ca n't`).
///  - Any other apostrophe is a punctuation token.
/// The output is a fixed point: tokenizing the space-joined output reproduces it.
std::vector<std::string> tokenize(std::string_view text);

/// Lowercases ASCII letters; used for table keys.
std::string normalize_key(std::string_view word);

/// Reads `id<TAB>label<TAB>text` rows. Throws DataError listing every rejected line.
Dataset load_dataset(const std::filesystem::path& path, LabelScheme scheme,
                     Split split = Split::Train);

struct LabelCounts {
  LabelScheme scheme = LabelScheme::ThreeClass;
  std::vector<std::size_t> counts;
  std::size_t total = 0;
};

LabelCounts dataset_stats(const Dataset& ds);

}  // namespace lexcnn
