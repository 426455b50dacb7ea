#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lexcnn/corpus.hpp"

namespace lexcnn {

enum class IntegrationMode { Base, NaiveConcat, Multichannel, SeparateConv };

/// A model variant as named on the command line: base, nc, mc, sc, each optionally with `-eav`.
struct Variant {
  IntegrationMode mode = IntegrationMode::Base;
  bool eav = false;

  friend bool operator==(const Variant&, const Variant&) = default;
};

std::string variant_name(const Variant& v);
Variant parse_variant(std::string_view text);
std::vector<Variant> parse_variant_list(std::string_view text);
const std::vector<Variant>& all_variants();

bool uses_lexicon(IntegrationMode mode);

struct ModelConfig {
  IntegrationMode mode = IntegrationMode::Base;
  bool eav = false;
  std::vector<int> word_filter_lengths{2, 3, 4, 5};
  std::vector<int> lexicon_filter_lengths{2, 3, 4, 5};
  int word_filters = 64;
  int lexicon_filters = 9;
  int word_attention_filters = 50;
  int lexicon_attention_filters = 20;
  int num_classes = 3;

  Variant variant() const { return {mode, eav}; }
  /// Longest filter among the convolution blocks active in this mode.
  int max_filter_length() const;
  void validate() const;
};

enum class Precision { Float64, Float32 };
enum class Metric { Auto, AvgF1, Accuracy };

struct TrainConfig {
  ModelConfig model;
  LabelScheme scheme = LabelScheme::ThreeClass;
  Metric metric = Metric::Auto;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int batch_size = 50;
  int max_epochs = 200;
  int patience = 25;
  double dropout = 0.5;
  double init_range = 0.05;
  bool fine_tune = true;
  std::uint64_t seed = 1;
  std::uint64_t oov_seed = 7;
  Precision precision = Precision::Float64;

  /// Metric actually used for model selection: Auto resolves to avg-F1 for
  /// 3-class data and accuracy otherwise.
  Metric effective_metric() const;
  void validate() const;
};

/// Applies one `key = value` setting. Throws UsageError on unknown keys or bad values.
void apply_setting(TrainConfig& cfg, std::string_view key, std::string_view value);

/// Reads a flat `key = value` file (`#` comments) on top of `cfg`.
void apply_config_file(TrainConfig& cfg, const std::filesystem::path& path);

/// Every field as ordered `key = value` pairs; apply_setting accepts all of them back.
std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& cfg);

std::string metric_name(Metric m);
Metric parse_metric(std::string_view text);

}  // namespace lexcnn
