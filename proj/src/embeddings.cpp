#include "lexcnn/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "lexcnn/util.hpp"

namespace lexcnn {

namespace {

constexpr std::string_view kLexiconMagic = "#lexcnn-lexicon v1";

bool parse_double(std::string_view text, double& out) {
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    fields.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

WordEmbeddingTable::WordEmbeddingTable(Index dimension, std::uint64_t oov_seed, OovPolicy policy)
    : dimension_(dimension), oov_seed_(oov_seed), policy_(policy) {
  if (dimension <= 0) throw DataError("embedding dimension must be positive");
}

void WordEmbeddingTable::insert(const std::string& word,
                                const Eigen::Ref<const Eigen::VectorXd>& vector) {
  if (vector.size() != dimension_) {
    throw DataError(fmt::format("vector for '{}' has {} values, expected {}", word, vector.size(),
                                dimension_));
  }
  const auto [it, inserted] = index_.emplace(word, words_.size());
  if (inserted) {
    words_.push_back(word);
    data_.resize(data_.size() + static_cast<std::size_t>(dimension_));
  } else {
    ++duplicates_;
  }
  std::copy(vector.data(), vector.data() + dimension_,
            data_.begin() + static_cast<std::ptrdiff_t>(it->second * static_cast<std::size_t>(dimension_)));
}

Eigen::VectorXd WordEmbeddingTable::lookup(const std::string& word) const {
  const auto it = index_.find(word);
  if (it == index_.end()) return oov_vector(word);
  return Eigen::Map<const Eigen::VectorXd>(
      data_.data() + it->second * static_cast<std::size_t>(dimension_), dimension_);
}

Eigen::VectorXd WordEmbeddingTable::oov_vector(const std::string& word) const {
  if (policy_ == OovPolicy::Zero) return Eigen::VectorXd::Zero(dimension_);
  std::mt19937_64 gen(splitmix64(oov_seed_ ^ fnv1a64(word)));
  Eigen::VectorXd v(dimension_);
  for (Index i = 0; i < dimension_; ++i) v[i] = uniform(gen, -0.25, 0.25);
  return v;
}

WordEmbeddingTable load_word_embeddings(const std::filesystem::path& path, std::uint64_t oov_seed,
                                        OovPolicy policy) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open embeddings '{}'", path.string()));
  std::string line;
  if (!std::getline(in, line)) throw DataError(fmt::format("{}: missing header", path.string()));
  strip_cr(line);
  const auto header = split_whitespace(line);
  long long vocab = 0;
  long long dim = 0;
  auto parse_int = [](std::string_view s, long long& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
  };
  if (header.size() != 2 || !parse_int(header[0], vocab) || !parse_int(header[1], dim) || vocab < 0 ||
      dim <= 0) {
    throw DataError(fmt::format("{}:1: expected header 'V d'", path.string()));
  }

  WordEmbeddingTable table(static_cast<Index>(dim), oov_seed, policy);
  Eigen::VectorXd v(dim);
  std::size_t line_no = 1;
  long long rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_whitespace(line);
    if (static_cast<long long>(fields.size()) != dim + 1) {
      throw DataError(fmt::format("{}:{}: dimension mismatch: {} values, header declares {}",
                                  path.string(), line_no,
                                  fields.empty() ? 0 : fields.size() - 1, dim));
    }
    for (long long k = 0; k < dim; ++k) {
      if (!parse_double(fields[static_cast<std::size_t>(k + 1)], v[k])) {
        throw DataError(fmt::format("{}:{}: non-numeric value '{}'", path.string(), line_no,
                                    fields[static_cast<std::size_t>(k + 1)]));
      }
    }
    table.insert(normalize_key(fields[0]), v);
    ++rows;
  }
  if (rows != vocab) {
    throw DataError(fmt::format("{}: header declares {} words but {} rows were read", path.string(),
                                vocab, rows));
  }
  return table;
}

LexiconTable::LexiconTable(std::vector<LexiconSpan> spans) : spans_(std::move(spans)) {
  Index next = 0;
  for (const auto& s : spans_) {
    if (s.begin != next || s.end < s.begin) throw DataError("lexicon spans must partition the columns");
    next = s.end;
  }
  width_ = next;
}

void LexiconTable::insert(const std::string& word, const Eigen::Ref<const Eigen::VectorXd>& scores) {
  if (scores.size() != width_) {
    throw DataError(fmt::format("lexicon vector for '{}' has {} values, expected {}", word,
                                scores.size(), width_));
  }
  if ((scores.array().abs() > 1.0).any() || !scores.allFinite()) {
    throw DataError(fmt::format("lexicon scores for '{}' leave [-1,1]", word));
  }
  const auto [it, inserted] = index_.emplace(word, words_.size());
  if (inserted) {
    words_.push_back(word);
    data_.resize(data_.size() + static_cast<std::size_t>(width_));
  }
  std::copy(scores.data(), scores.data() + width_,
            data_.begin() + static_cast<std::ptrdiff_t>(it->second * static_cast<std::size_t>(width_)));
}

Eigen::VectorXd LexiconTable::lookup(const std::string& word) const {
  const auto it = index_.find(word);
  if (it == index_.end()) return Eigen::VectorXd::Zero(width_);
  return Eigen::Map<const Eigen::VectorXd>(data_.data() + it->second * static_cast<std::size_t>(width_),
                                           width_);
}

Eigen::VectorXd lexicon_vector(const LexiconTable& table, const std::string& word) {
  return table.lookup(word);
}

namespace {

struct SourceScores {
  std::string name;
  Index columns = 0;
  std::vector<std::string> words;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<double>> rows;
};

SourceScores read_source(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open lexicon '{}'", path.string()));
  SourceScores src;
  src.name = path.filename().string();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    const auto count = static_cast<Index>(fields.size()) - 1;
    if (count < 1) {
      throw DataError(fmt::format("{}:{}: expected word<TAB>score...", path.string(), line_no));
    }
    if (src.columns == 0) {
      src.columns = count;
    } else if (count != src.columns) {
      throw DataError(fmt::format("{}:{}: inconsistent score count {} (file uses {})", path.string(),
                                  line_no, count, src.columns));
    }
    std::vector<double> row(static_cast<std::size_t>(count));
    for (Index k = 0; k < count; ++k) {
      if (!parse_double(fields[static_cast<std::size_t>(k + 1)], row[static_cast<std::size_t>(k)])) {
        throw DataError(fmt::format("{}:{}: non-numeric score '{}'", path.string(), line_no,
                                    fields[static_cast<std::size_t>(k + 1)]));
      }
    }
    const auto word = normalize_key(fields[0]);
    const auto [it, inserted] = src.index.emplace(word, src.rows.size());
    if (inserted) {
      src.words.push_back(word);
      src.rows.push_back(std::move(row));
    } else {
      src.rows[it->second] = std::move(row);
    }
  }
  if (src.columns == 0) throw DataError(fmt::format("lexicon '{}' has no entries", path.string()));

  for (Index k = 0; k < src.columns; ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& r : src.rows) {
      lo = std::min(lo, r[static_cast<std::size_t>(k)]);
      hi = std::max(hi, r[static_cast<std::size_t>(k)]);
    }
    if (lo >= -1.0 && hi <= 1.0) continue;
    for (auto& r : src.rows) {
      double& x = r[static_cast<std::size_t>(k)];
      x = hi > lo ? 2.0 * (x - lo) / (hi - lo) - 1.0 : std::clamp(x, -1.0, 1.0);
    }
  }
  return src;
}

}  // namespace

LexiconTable build_lexicon_table(const std::vector<std::filesystem::path>& sources) {
  if (sources.empty()) throw DataError("at least one lexicon source is required");
  std::vector<SourceScores> parsed;
  parsed.reserve(sources.size());
  for (const auto& p : sources) parsed.push_back(read_source(p));

  std::vector<LexiconSpan> spans;
  Index offset = 0;
  for (const auto& s : parsed) {
    spans.push_back({s.name, offset, offset + s.columns});
    offset += s.columns;
  }
  LexiconTable table(spans);

  // Union of words in source order, first appearance wins the position.
  std::vector<std::string> order;
  std::unordered_map<std::string, bool> seen;
  for (const auto& s : parsed) {
    for (const auto& w : s.words) {
      if (seen.emplace(w, true).second) order.push_back(w);
    }
  }
  Eigen::VectorXd v(offset);
  for (const auto& w : order) {
    v.setZero();
    for (std::size_t si = 0; si < parsed.size(); ++si) {
      const auto it = parsed[si].index.find(w);
      if (it == parsed[si].index.end()) continue;
      const auto& row = parsed[si].rows[it->second];
      for (std::size_t k = 0; k < row.size(); ++k) v[spans[si].begin + static_cast<Index>(k)] = row[k];
    }
    table.insert(w, v);
  }
  return table;
}

void save_lexicon_table(const LexiconTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  out << kLexiconMagic << '\n';
  out << "#width\t" << table.width() << '\n';
  for (const auto& s : table.spans()) out << "#span\t" << s.source << '\t' << s.begin << '\t' << s.end << '\n';
  for (const auto& w : table.words()) {
    const auto v = table.lookup(w);
    out << w;
    for (Index k = 0; k < v.size(); ++k) out << '\t' << fmt::format("{}", v[k]);
    out << '\n';
  }
}

bool is_serialized_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line)) return false;
  strip_cr(line);
  return line == kLexiconMagic;
}

LexiconTable load_lexicon_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open lexicon table '{}'", path.string()));
  std::string line;
  std::getline(in, line);
  strip_cr(line);
  if (line != kLexiconMagic) throw DataError(fmt::format("{}: not a serialized lexicon table", path.string()));

  std::vector<LexiconSpan> spans;
  std::optional<LexiconTable> table;
  std::size_t line_no = 1;
  Eigen::VectorXd v;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields[0] == "#width") continue;
    if (fields[0] == "#span") {
      if (fields.size() != 4) throw DataError(fmt::format("{}:{}: malformed span", path.string(), line_no));
      LexiconSpan s;
      s.source = std::string(fields[1]);
      s.begin = std::stol(std::string(fields[2]));
      s.end = std::stol(std::string(fields[3]));
      spans.push_back(std::move(s));
      continue;
    }
    if (!table) {
      table.emplace(spans);
      v.resize(table->width());
    }
    if (static_cast<Index>(fields.size()) != table->width() + 1) {
      throw DataError(fmt::format("{}:{}: expected {} scores", path.string(), line_no, table->width()));
    }
    for (Index k = 0; k < table->width(); ++k) {
      if (!parse_double(fields[static_cast<std::size_t>(k + 1)], v[k])) {
        throw DataError(fmt::format("{}:{}: non-numeric score", path.string(), line_no));
      }
    }
    table->insert(std::string(fields[0]), v);
  }
  if (!table) table.emplace(spans);
  return *table;
}

}  // namespace lexcnn
