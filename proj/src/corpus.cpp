#include "lexcnn/corpus.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "lexcnn/error.hpp"

namespace lexcnn {

namespace {

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_split_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  if (u >= 0x80) return false;
  if (c == '\'' || c == '#' || c == '@' || c == '_') return false;
  return std::ispunct(u) != 0;
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

// Splits one whitespace-free chunk.
void tokenize_chunk(std::string_view chunk, std::vector<std::string>& out) {
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < chunk.size(); ++i) {
    const char c = chunk[i];
    if (c == '\'') {
      const bool clitic = i + 1 < chunk.size() && is_ascii_alpha(chunk[i + 1]);
      if (!clitic) {
        flush();
        out.emplace_back("'");
        continue;
      }
      // n't: move the trailing n of the current word onto the clitic.
      const bool negation = !current.empty() && current.back() == 'n' && i + 1 < chunk.size() &&
                            lower(chunk[i + 1]) == 't' &&
                            (i + 2 == chunk.size() || !is_ascii_alpha(chunk[i + 2]));
      if (negation) {
        current.pop_back();
        flush();
        current = "n'";
      } else {
        flush();
        current = "'";
      }
      continue;
    }
    if (is_split_punct(c)) {
      flush();
      out.emplace_back(1, c);
      continue;
    }
    current.push_back(lower(c));
  }
  flush();
}

const std::vector<std::string> kThreeClass = {"positive", "neutral", "negative"};
const std::vector<std::string> kFiveClass = {"verypositive", "positive", "neutral", "negative",
                                             "verynegative"};

}  // namespace

int num_classes(LabelScheme scheme) { return scheme == LabelScheme::ThreeClass ? 3 : 5; }

const std::vector<std::string>& label_names(LabelScheme scheme) {
  return scheme == LabelScheme::ThreeClass ? kThreeClass : kFiveClass;
}

std::optional<int> label_index(LabelScheme scheme, std::string_view name) {
  const auto& names = label_names(scheme);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

LabelScheme parse_scheme(std::string_view text) {
  if (text == "3" || text == "3-class" || text == "three") return LabelScheme::ThreeClass;
  if (text == "5" || text == "5-class" || text == "five") return LabelScheme::FiveClass;
  throw UsageError(fmt::format("unknown label scheme '{}' (expected 3 or 5)", text));
}

std::string scheme_name(LabelScheme scheme) {
  return scheme == LabelScheme::ThreeClass ? "3" : "5";
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) tokenize_chunk(text.substr(i, j - i), out);
    i = j;
  }
  return out;
}

std::string normalize_key(std::string_view word) {
  std::string key(word);
  for (char& c : key) c = lower(c);
  return key;
}

Dataset load_dataset(const std::filesystem::path& path, LabelScheme scheme, Split split) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open dataset '{}'", path.string()));

  Dataset ds;
  ds.scheme = scheme;
  ds.split = split;
  std::vector<std::string> errors;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      errors.push_back(fmt::format("line {}: malformed row (expected id<TAB>label<TAB>text)", line_no));
      continue;
    }
    Document doc;
    doc.id = line.substr(0, tab1);
    const std::string label = line.substr(tab1 + 1, tab2 - tab1 - 1);
    const auto index = label_index(scheme, label);
    if (!index) {
      errors.push_back(fmt::format("line {}: unknown label '{}' for {}-class scheme", line_no, label,
                                   num_classes(scheme)));
      continue;
    }
    doc.label = *index;
    doc.tokens = tokenize(std::string_view(line).substr(tab2 + 1));
    if (doc.tokens.empty()) {
      errors.push_back(fmt::format("line {}: document '{}' is empty after tokenization", line_no, doc.id));
      continue;
    }
    ds.documents.push_back(std::move(doc));
  }
  if (!errors.empty()) {
    std::ostringstream msg;
    msg << path.string() << ": " << errors.size() << " rejected row(s)";
    for (const auto& e : errors) msg << "\n  " << e;
    throw DataError(msg.str());
  }
  return ds;
}

LabelCounts dataset_stats(const Dataset& ds) {
  LabelCounts stats;
  stats.scheme = ds.scheme;
  stats.counts.assign(static_cast<std::size_t>(num_classes(ds.scheme)), 0);
  for (const auto& doc : ds.documents) ++stats.counts.at(static_cast<std::size_t>(doc.label));
  stats.total = ds.documents.size();
  return stats;
}

}  // namespace lexcnn
