#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lexcnn/corpus.hpp"
#include "lexcnn/model.hpp"
#include "lexcnn/training.hpp"

namespace lexcnn {

inline constexpr const char* kToolVersion = "lexcnn 0.1.0";

/// `#`-prefixed lines written at the top of every output file.
struct Provenance {
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
  std::vector<std::string> notes;

  std::vector<std::string> lines() const;
};

// CSV: comma separated, header row, '\n' endings. Fields containing a comma,
// quote or newline are quoted with doubled inner quotes.
std::string csv_field(const std::string& value);
std::string format_number(double value);

struct CsvTable {
  std::vector<std::string> comments;  // without the leading '#'
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);

struct HeatmapDocument {
  std::string id;
  AttentionRecord attention;
  int predicted = 0;
  int gold = 0;
};

enum class HeatmapFormat { Csv, Html };

HeatmapFormat parse_heatmap_format(std::string_view text);

/// Weight 0 maps to neutral gray, +1 to red and -1 to blue, linearly in |weight|.
std::string heat_color(double weight);

void heatmap_export(const std::vector<HeatmapDocument>& docs, LabelScheme scheme,
                    const std::filesystem::path& path, HeatmapFormat format, const Provenance& prov);

/// Runs the model over `ds` and collects attention; throws UsageError for non-EAV models.
template <typename Scalar>
std::vector<HeatmapDocument> heatmap_documents(const ModelParameters<Scalar>& params, const Dataset& ds,
                                               const WordEmbeddingTable& words, const LexiconTable* lexicon) {
  if (!params.config.eav) throw UsageError("attention unavailable for this model");
  auto prepared = prepare_documents(ds, words, lexicon, params);
  std::vector<HeatmapDocument> out;
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    const auto trace = forward(prepared[i].matrices, params);
    out.push_back({ds.documents[i].id, attention_record(trace, ds.documents[i].tokens), trace.predicted(),
                   prepared[i].label});
  }
  return out;
}

/// Seed histories of one variant.
struct CurveSeries {
  Variant variant;
  std::vector<std::uint64_t> seeds;
  std::vector<TrainHistory> histories;
};

/// variant, epoch, epoch-wise mean dev metric, per-seed values. Histories of
/// unequal length are truncated to the shortest, flagged in the header.
void curves_export(const std::vector<CurveSeries>& series, const std::filesystem::path& path,
                   const Provenance& prov);

/// variant, median, q25, q75, outliers (semicolon-joined), n
void boxstats_export(const GroupStats& stats, const std::filesystem::path& path, const Provenance& prov);

/// variant, seed, metric, value per successful run.
void scores_export(const GroupStats& stats, const std::string& metric, const std::filesystem::path& path,
                   const Provenance& prov);

/// variant, d, runs, mean per size; then one stddev row per variant.
void sweep_export(const SweepResult& sweep, const std::filesystem::path& path, const Provenance& prov);

/// epoch, train_loss, dev_metric, best (wall-clock time is not written).
void history_export(const TrainHistory& history, const std::filesystem::path& path, const Provenance& prov);

struct MetricRow {
  std::string variant;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
};

void metrics_export(const std::vector<MetricRow>& rows, const std::filesystem::path& path,
                    const Provenance& prov);

}  // namespace lexcnn
