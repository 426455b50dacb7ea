#include "lexcnn/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "lexcnn/error.hpp"

namespace lexcnn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw UsageError(fmt::format("invalid value '{}' for '{}'", value, key));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw UsageError(fmt::format("invalid boolean '{}' for '{}'", value, key));
}

std::vector<int> parse_int_list(std::string_view key, std::string_view value) {
  std::vector<int> out;
  std::string_view rest = value;
  // Accept "2,3,4,5" and "(2, 3, 4, 5)".
  if (!rest.empty() && rest.front() == '(') rest.remove_prefix(1);
  if (!rest.empty() && rest.back() == ')') rest.remove_suffix(1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    out.push_back(parse_number<int>(key, item));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (out.empty()) throw UsageError(fmt::format("empty list for '{}'", key));
  return out;
}

std::string mode_name(IntegrationMode mode) {
  switch (mode) {
    case IntegrationMode::Base: return "base";
    case IntegrationMode::NaiveConcat: return "nc";
    case IntegrationMode::Multichannel: return "mc";
    case IntegrationMode::SeparateConv: return "sc";
  }
  return "base";
}

}  // namespace

std::string variant_name(const Variant& v) { return mode_name(v.mode) + (v.eav ? "-eav" : ""); }

Variant parse_variant(std::string_view text) {
  Variant v;
  std::string_view mode = text;
  constexpr std::string_view suffix = "-eav";
  if (mode.size() > suffix.size() && mode.substr(mode.size() - suffix.size()) == suffix) {
    v.eav = true;
    mode.remove_suffix(suffix.size());
  }
  if (mode == "base") v.mode = IntegrationMode::Base;
  else if (mode == "nc") v.mode = IntegrationMode::NaiveConcat;
  else if (mode == "mc") v.mode = IntegrationMode::Multichannel;
  else if (mode == "sc") v.mode = IntegrationMode::SeparateConv;
  else throw UsageError(fmt::format("unknown variant '{}'", text));
  return v;
}

std::vector<Variant> parse_variant_list(std::string_view text) {
  std::vector<Variant> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (!item.empty()) out.push_back(parse_variant(item));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) throw UsageError("empty variant list");
  return out;
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> variants = {
      {IntegrationMode::Base, false},        {IntegrationMode::NaiveConcat, false},
      {IntegrationMode::Multichannel, false}, {IntegrationMode::SeparateConv, false},
      {IntegrationMode::NaiveConcat, true},   {IntegrationMode::Multichannel, true},
      {IntegrationMode::SeparateConv, true}};
  return variants;
}

bool uses_lexicon(IntegrationMode mode) { return mode != IntegrationMode::Base; }

int ModelConfig::max_filter_length() const {
  int longest = *std::max_element(word_filter_lengths.begin(), word_filter_lengths.end());
  if (mode == IntegrationMode::SeparateConv) {
    longest = std::max(longest,
                       *std::max_element(lexicon_filter_lengths.begin(), lexicon_filter_lengths.end()));
  }
  return longest;
}

void ModelConfig::validate() const {
  auto positive_list = [](const std::vector<int>& xs, const char* name) {
    if (xs.empty()) throw UsageError(fmt::format("{} must not be empty", name));
    for (int x : xs) {
      if (x <= 0) throw UsageError(fmt::format("{} must be positive", name));
    }
  };
  positive_list(word_filter_lengths, "word_filter_lengths");
  positive_list(lexicon_filter_lengths, "lexicon_filter_lengths");
  if (word_filters <= 0 || lexicon_filters <= 0 || word_attention_filters <= 0 ||
      lexicon_attention_filters <= 0) {
    throw UsageError("filter counts must be positive");
  }
  if (num_classes < 2) throw UsageError("num_classes must be at least 2");
}

Metric TrainConfig::effective_metric() const {
  if (metric != Metric::Auto) return metric;
  return scheme == LabelScheme::ThreeClass ? Metric::AvgF1 : Metric::Accuracy;
}

void TrainConfig::validate() const {
  model.validate();
  if (model.num_classes != num_classes(scheme)) {
    throw UsageError("num_classes does not match the label scheme");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw UsageError("dropout must lie in [0,1)");
  if (!(learning_rate > 0.0)) throw UsageError("learning_rate must be positive");
  if (batch_size <= 0 || max_epochs <= 0 || patience <= 0) {
    throw UsageError("batch_size, max_epochs and patience must be positive");
  }
  if (!(init_range > 0.0)) throw UsageError("init_range must be positive");
  if (effective_metric() == Metric::AvgF1 && scheme != LabelScheme::ThreeClass) {
    throw UsageError("avgf1 requires the 3-class scheme");
  }
}

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::Auto: return "auto";
    case Metric::AvgF1: return "avgf1";
    case Metric::Accuracy: return "acc";
  }
  return "auto";
}

Metric parse_metric(std::string_view text) {
  if (text == "auto") return Metric::Auto;
  if (text == "avgf1") return Metric::AvgF1;
  if (text == "acc" || text == "accuracy") return Metric::Accuracy;
  throw UsageError(fmt::format("unknown metric '{}' (expected avgf1 or acc)", text));
}

void apply_setting(TrainConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "variant") {
    const auto v = parse_variant(value);
    cfg.model.mode = v.mode;
    cfg.model.eav = v.eav;
  } else if (key == "mode") {
    cfg.model.mode = parse_variant(value).mode;
  } else if (key == "eav") {
    cfg.model.eav = parse_bool(key, value);
  } else if (key == "word_filter_lengths") {
    cfg.model.word_filter_lengths = parse_int_list(key, value);
  } else if (key == "lexicon_filter_lengths") {
    cfg.model.lexicon_filter_lengths = parse_int_list(key, value);
  } else if (key == "word_filters") {
    cfg.model.word_filters = parse_number<int>(key, value);
  } else if (key == "lexicon_filters") {
    cfg.model.lexicon_filters = parse_number<int>(key, value);
  } else if (key == "word_attention_filters") {
    cfg.model.word_attention_filters = parse_number<int>(key, value);
  } else if (key == "lexicon_attention_filters") {
    cfg.model.lexicon_attention_filters = parse_number<int>(key, value);
  } else if (key == "scheme") {
    cfg.scheme = parse_scheme(value);
    cfg.model.num_classes = num_classes(cfg.scheme);
  } else if (key == "metric") {
    cfg.metric = parse_metric(value);
  } else if (key == "learning_rate") {
    cfg.learning_rate = parse_number<double>(key, value);
  } else if (key == "adam_beta1") {
    cfg.adam_beta1 = parse_number<double>(key, value);
  } else if (key == "adam_beta2") {
    cfg.adam_beta2 = parse_number<double>(key, value);
  } else if (key == "adam_epsilon") {
    cfg.adam_epsilon = parse_number<double>(key, value);
  } else if (key == "batch_size") {
    cfg.batch_size = parse_number<int>(key, value);
  } else if (key == "max_epochs") {
    cfg.max_epochs = parse_number<int>(key, value);
  } else if (key == "patience") {
    cfg.patience = parse_number<int>(key, value);
  } else if (key == "dropout") {
    cfg.dropout = parse_number<double>(key, value);
  } else if (key == "init_range") {
    cfg.init_range = parse_number<double>(key, value);
  } else if (key == "fine_tune") {
    cfg.fine_tune = parse_bool(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "oov_seed") {
    cfg.oov_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "precision") {
    if (value == "double" || value == "64") cfg.precision = Precision::Float64;
    else if (value == "float" || value == "32") cfg.precision = Precision::Float32;
    else throw UsageError(fmt::format("invalid precision '{}'", value));
  } else {
    throw UsageError(fmt::format("unknown config key '{}'", key));
  }
}

void apply_config_file(TrainConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open config '{}'", path.string()));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(fmt::format("{}:{}: expected 'key = value'", path.string(), line_no));
    }
    try {
      apply_setting(cfg, body.substr(0, eq), body.substr(eq + 1));
    } catch (const UsageError& e) {
      throw UsageError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
}

std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& cfg) {
  const auto& m = cfg.model;
  return {
      {"variant", variant_name(m.variant())},
      {"mode", mode_name(m.mode)},
      {"eav", m.eav ? "true" : "false"},
      {"word_filter_lengths", fmt::format("{}", fmt::join(m.word_filter_lengths, ","))},
      {"lexicon_filter_lengths", fmt::format("{}", fmt::join(m.lexicon_filter_lengths, ","))},
      {"word_filters", fmt::format("{}", m.word_filters)},
      {"lexicon_filters", fmt::format("{}", m.lexicon_filters)},
      {"word_attention_filters", fmt::format("{}", m.word_attention_filters)},
      {"lexicon_attention_filters", fmt::format("{}", m.lexicon_attention_filters)},
      {"scheme", scheme_name(cfg.scheme)},
      {"metric", metric_name(cfg.metric)},
      {"learning_rate", fmt::format("{}", cfg.learning_rate)},
      {"adam_beta1", fmt::format("{}", cfg.adam_beta1)},
      {"adam_beta2", fmt::format("{}", cfg.adam_beta2)},
      {"adam_epsilon", fmt::format("{}", cfg.adam_epsilon)},
      {"batch_size", fmt::format("{}", cfg.batch_size)},
      {"max_epochs", fmt::format("{}", cfg.max_epochs)},
      {"patience", fmt::format("{}", cfg.patience)},
      {"dropout", fmt::format("{}", cfg.dropout)},
      {"init_range", fmt::format("{}", cfg.init_range)},
      {"fine_tune", cfg.fine_tune ? "true" : "false"},
      {"seed", fmt::format("{}", cfg.seed)},
      {"oov_seed", fmt::format("{}", cfg.oov_seed)},
      {"precision", cfg.precision == Precision::Float64 ? "double" : "float"},
  };
}

}  // namespace lexcnn
