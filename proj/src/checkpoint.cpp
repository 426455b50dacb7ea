#include "lexcnn/checkpoint.hpp"

#include <charconv>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "lexcnn/error.hpp"
#include "lexcnn/util.hpp"

namespace lexcnn {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "lexcnn-checkpoint/1";

std::string encode_values(const double* data, Index size) {
  std::string out;
  out.reserve(static_cast<std::size_t>(size) * 24);
  for (Index i = 0; i < size; ++i) {
    if (i > 0) out.push_back(' ');
    out += fmt::format("{:a}", data[i]);
  }
  return out;
}

double decode_hexfloat(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) text.remove_prefix(2);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, std::chars_format::hex);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DataError(fmt::format("checkpoint: invalid value '{}'", text));
  }
  return negative ? -value : value;
}

std::vector<double> decode_values(const std::string& text) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto j = text.find(' ', i);
    const auto end = j == std::string::npos ? text.size() : j;
    if (end > i) out.push_back(decode_hexfloat(std::string_view(text).substr(i, end - i)));
    i = end + 1;
  }
  return out;
}

template <typename Scalar>
json tensor_json(const std::string& name, const Scalar* data, Index rows, Index cols) {
  std::vector<double> wide(data, data + rows * cols);
  return json{{"name", name}, {"rows", rows}, {"cols", cols},
              {"data", encode_values(wide.data(), rows * cols)}};
}

template <typename Scalar>
void read_tensor(const json& t, const std::string& name, Scalar* data, Index rows, Index cols) {
  if (t.at("name").get<std::string>() != name || t.at("rows").get<Index>() != rows ||
      t.at("cols").get<Index>() != cols) {
    throw DataError(fmt::format("checkpoint: tensor '{}' missing or misshapen", name));
  }
  const auto values = decode_values(t.at("data").get<std::string>());
  if (static_cast<Index>(values.size()) != rows * cols) {
    throw DataError(fmt::format("checkpoint: tensor '{}' has {} values", name, values.size()));
  }
  for (Index i = 0; i < rows * cols; ++i) data[i] = static_cast<Scalar>(values[static_cast<std::size_t>(i)]);
}

json config_json(const TrainConfig& cfg) {
  json out = json::object();
  json order = json::array();
  for (const auto& [k, v] : config_entries(cfg)) {
    out[k] = v;
    order.push_back(k);
  }
  return json{{"values", out}, {"order", order}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig cfg;
  for (const auto& key : j.at("order")) {
    const auto k = key.get<std::string>();
    apply_setting(cfg, k, j.at("values").at(k).get<std::string>());
  }
  return cfg;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open checkpoint '{}'", path.string()));
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(fmt::format("{}: not a checkpoint ({})", path.string(), e.what()));
  }
  if (!j.contains("format") || j["format"] != kFormat) {
    throw DataError(fmt::format("{}: not a checkpoint", path.string()));
  }
  return j;
}

}  // namespace

std::string vocabulary_hash(const std::vector<std::string>& words) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& w : words) {
    h = fnv1a64(w, h);
    h = fnv1a64(std::string_view("\n", 1), h);
  }
  return hex64(h);
}

template <typename Scalar>
void save_checkpoint(const Checkpoint<Scalar>& ckpt, const std::filesystem::path& path) {
  const auto& p = ckpt.params;
  json j;
  j["format"] = kFormat;
  j["config"] = config_json(ckpt.config);
  j["word_dim"] = p.word_dim;
  j["lexicon_dim"] = p.lexicon_dim;
  j["tables"] = {{"embeddings_path", ckpt.tables.embeddings_path},
                 {"embeddings_digest", ckpt.tables.embeddings_digest},
                 {"lexicon_paths", ckpt.tables.lexicon_paths},
                 {"lexicon_digests", ckpt.tables.lexicon_digests}};
  json tensors = json::array();
  for (const auto& t : dense_tensors(p)) tensors.push_back(tensor_json(t.name, t.data, t.size, 1));
  j["tensors"] = tensors;
  j["vocabulary"] = p.tuned.words;
  j["vocabulary_hash"] = vocabulary_hash(p.tuned.words);
  j["tuned_embeddings"] = tensor_json("tuned_embeddings", p.tuned.rows.data(), p.tuned.rows.rows(),
                                      p.tuned.rows.cols());

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write checkpoint '{}'", path.string()));
  out << j.dump(1) << '\n';
}

TrainConfig read_checkpoint_config(const std::filesystem::path& path) {
  return config_from_json(read_json(path).at("config"));
}

template <typename Scalar>
Checkpoint<Scalar> load_checkpoint(const std::filesystem::path& path) {
  const json j = read_json(path);
  try {
    Checkpoint<Scalar> ckpt;
    ckpt.config = config_from_json(j.at("config"));
    const bool is_double = std::is_same_v<Scalar, double>;
    if (is_double != (ckpt.config.precision == Precision::Float64)) {
      throw DataError(fmt::format("{}: checkpoint precision does not match", path.string()));
    }
    const auto& tables = j.at("tables");
    ckpt.tables.embeddings_path = tables.at("embeddings_path").get<std::string>();
    ckpt.tables.embeddings_digest = tables.at("embeddings_digest").get<std::string>();
    ckpt.tables.lexicon_paths = tables.at("lexicon_paths").get<std::vector<std::string>>();
    ckpt.tables.lexicon_digests = tables.at("lexicon_digests").get<std::vector<std::string>>();

    ckpt.params = zero_parameters<Scalar>(ckpt.config.model, j.at("word_dim").get<Index>(),
                                          j.at("lexicon_dim").get<Index>());
    auto views = dense_tensors(ckpt.params);
    const auto& tensors = j.at("tensors");
    if (tensors.size() != views.size()) throw DataError("checkpoint: tensor count mismatch");
    for (std::size_t i = 0; i < views.size(); ++i) {
      read_tensor(tensors[i], views[i].name, views[i].data, views[i].size, 1);
    }

    auto& tuned = ckpt.params.tuned;
    tuned.words = j.at("vocabulary").get<std::vector<std::string>>();
    if (vocabulary_hash(tuned.words) != j.at("vocabulary_hash").get<std::string>()) {
      throw DataError("checkpoint: vocabulary hash mismatch");
    }
    const auto& te = j.at("tuned_embeddings");
    tuned.rows.resize(te.at("rows").get<Index>(), te.at("cols").get<Index>());
    if (tuned.rows.rows() != static_cast<Index>(tuned.words.size())) {
      throw DataError("checkpoint: tuned embedding rows do not match the vocabulary");
    }
    read_tensor(te, "tuned_embeddings", tuned.rows.data(), tuned.rows.rows(), tuned.rows.cols());
    for (std::size_t i = 0; i < tuned.words.size(); ++i) tuned.index.emplace(tuned.words[i], static_cast<Index>(i));
    return ckpt;
  } catch (const json::exception& e) {
    throw DataError(fmt::format("{}: malformed checkpoint ({})", path.string(), e.what()));
  }
}

template void save_checkpoint(const Checkpoint<double>&, const std::filesystem::path&);
template void save_checkpoint(const Checkpoint<float>&, const std::filesystem::path&);
template Checkpoint<double> load_checkpoint(const std::filesystem::path&);
template Checkpoint<float> load_checkpoint(const std::filesystem::path&);

}  // namespace lexcnn
