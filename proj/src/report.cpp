#include "lexcnn/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "lexcnn/error.hpp"
#include "lexcnn/util.hpp"

namespace lexcnn {

namespace {

std::ofstream open_output(const std::filesystem::path& path, const Provenance& prov) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  for (const auto& line : prov.lines()) out << line << '\n';
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << csv_field(fields[i]);
  }
  out << '\n';
}

std::string html_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> Provenance::lines() const {
  std::vector<std::string> out;
  out.push_back(fmt::format("# tool: {}", kToolVersion));
  for (const auto& [k, v] : config) out.push_back(fmt::format("# config: {} = {}", k, v));
  for (const auto& [p, d] : inputs) out.push_back(fmt::format("# input: {} fnv1a64={}", p, d));
  for (const auto& n : notes) out.push_back(fmt::format("# {}", n));
  return out;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string out = "\"";
  for (const char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_number(double value) { return format_shortest(value); }

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  CsvTable table;
  std::vector<std::vector<std::string>> records;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '#' && records.empty() && table.header.empty()) {
      const auto end = text.find('\n', i);
      std::string line = text.substr(i + 1, end == std::string::npos ? std::string::npos : end - i - 1);
      if (!line.empty() && line.front() == ' ') line.erase(0, 1);
      table.comments.push_back(std::move(line));
      i = end == std::string::npos ? text.size() : end + 1;
      continue;
    }
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    for (; i < text.size(); ++i) {
      const char c = text[i];
      if (quoted) {
        if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          field.push_back(c);
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        record.push_back(std::move(field));
        field.clear();
      } else if (c == '\n') {
        ++i;
        break;
      } else {
        field.push_back(c);
      }
    }
    record.push_back(std::move(field));
    if (table.header.empty()) table.header = std::move(record);
    else table.rows.push_back(std::move(record));
  }
  return table;
}

HeatmapFormat parse_heatmap_format(std::string_view text) {
  if (text == "csv") return HeatmapFormat::Csv;
  if (text == "html") return HeatmapFormat::Html;
  throw UsageError(fmt::format("unknown heatmap format '{}' (expected csv or html)", text));
}

std::string heat_color(double weight) {
  constexpr double gray[3] = {210, 210, 210};
  constexpr double red[3] = {214, 39, 40};
  constexpr double blue[3] = {31, 119, 180};
  const double t = std::min(1.0, std::abs(weight));
  const double* target = weight >= 0 ? red : blue;
  int rgb[3];
  for (int k = 0; k < 3; ++k) rgb[k] = static_cast<int>(std::lround(gray[k] + t * (target[k] - gray[k])));
  return fmt::format("rgb({},{},{})", rgb[0], rgb[1], rgb[2]);
}

void heatmap_export(const std::vector<HeatmapDocument>& docs, LabelScheme scheme,
                    const std::filesystem::path& path, HeatmapFormat format, const Provenance& prov) {
  for (const auto& d : docs) {
    if (d.attention.word_weights.size() != d.attention.tokens.size()) {
      throw UsageError("attention unavailable for this model");
    }
  }
  const auto& names = label_names(scheme);
  if (format == HeatmapFormat::Csv) {
    auto out = open_output(path, prov);
    write_row(out, {"doc", "position", "token", "channel", "weight", "predicted", "gold"});
    for (const auto& d : docs) {
      const auto pred = names.at(static_cast<std::size_t>(d.predicted));
      const auto gold = names.at(static_cast<std::size_t>(d.gold));
      for (std::size_t i = 0; i < d.attention.tokens.size(); ++i) {
        write_row(out, {d.id, std::to_string(i), d.attention.tokens[i], "word",
                        format_number(d.attention.word_weights[i]), pred, gold});
        if (d.attention.lexicon_weights) {
          write_row(out, {d.id, std::to_string(i), d.attention.tokens[i], "lexicon",
                          format_number((*d.attention.lexicon_weights)[i]), pred, gold});
        }
      }
    }
    return;
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n";
  for (const auto& line : prov.lines()) out << "<!-- " << html_escape(line.substr(2)) << " -->\n";
  out << "<title>Attention heatmap</title>\n<style>\n"
         "body{font-family:sans-serif;margin:2em}\n"
         ".doc{margin:0.6em 0;line-height:2}\n"
         ".meta{color:#555;font-size:0.85em;margin-right:0.8em}\n"
         ".tok{padding:0.15em 0.3em;margin:0 0.1em;border-radius:3px}\n"
         ".legend span{display:inline-block;width:3.5em;text-align:center}\n"
         "</style>\n</head>\n<body>\n";
  out << "<div class=\"legend\">word attention: ";
  for (const double w : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    out << "<span style=\"background:" << heat_color(w) << "\">" << format_number(w) << "</span>";
  }
  out << "</div>\n";
  for (const auto& d : docs) {
    out << "<div class=\"doc\"><span class=\"meta\">" << html_escape(d.id) << " gold="
        << names.at(static_cast<std::size_t>(d.gold)) << " predicted=" << names.at(static_cast<std::size_t>(d.predicted))
        << "</span>";
    for (std::size_t i = 0; i < d.attention.tokens.size(); ++i) {
      const double w = d.attention.word_weights[i];
      std::string title = fmt::format("word={}", format_number(w));
      if (d.attention.lexicon_weights) title += fmt::format(" lexicon={}", format_number((*d.attention.lexicon_weights)[i]));
      out << "<span class=\"tok\" style=\"background:" << heat_color(w) << "\" title=\"" << title << "\">"
          << html_escape(d.attention.tokens[i]) << "</span>";
    }
    out << "</div>\n";
  }
  out << "</body>\n</html>\n";
}

void curves_export(const std::vector<CurveSeries>& series, const std::filesystem::path& path,
                   const Provenance& prov) {
  Provenance p = prov;
  for (const auto& s : series) {
    if (s.histories.empty()) throw UsageError(fmt::format("no histories for {}", variant_name(s.variant)));
    std::size_t shortest = s.histories.front().epochs.size();
    std::size_t longest = shortest;
    for (const auto& h : s.histories) {
      shortest = std::min(shortest, h.epochs.size());
      longest = std::max(longest, h.epochs.size());
    }
    if (shortest != longest) {
      p.notes.push_back(fmt::format("warning: {} histories have unequal length; truncated to {} epochs",
                                    variant_name(s.variant), shortest));
    }
  }
  auto out = open_output(path, p);
  write_row(out, {"variant", "epoch", "mean_dev_metric", "values"});
  for (const auto& s : series) {
    std::size_t shortest = s.histories.front().epochs.size();
    for (const auto& h : s.histories) shortest = std::min(shortest, h.epochs.size());
    for (std::size_t e = 0; e < shortest; ++e) {
      double sum = 0.0;
      std::string values;
      for (std::size_t k = 0; k < s.histories.size(); ++k) {
        const double v = s.histories[k].epochs[e].dev_metric;
        sum += v;
        if (k > 0) values.push_back(';');
        values += format_number(v);
      }
      write_row(out, {variant_name(s.variant), std::to_string(e + 1),
                      format_number(sum / static_cast<double>(s.histories.size())), values});
    }
  }
}

void boxstats_export(const GroupStats& stats, const std::filesystem::path& path, const Provenance& prov) {
  Provenance p = prov;
  for (const auto& w : stats.warnings) p.notes.push_back("warning: " + w);
  auto out = open_output(path, p);
  write_row(out, {"variant", "median", "q25", "q75", "outliers", "n"});
  for (const auto& v : stats.variants) {
    if (v.scores.empty()) continue;
    std::string outliers;
    for (std::size_t i = 0; i < v.box.outliers.size(); ++i) {
      if (i > 0) outliers.push_back(';');
      outliers += format_number(v.box.outliers[i]);
    }
    write_row(out, {variant_name(v.variant), format_number(v.box.median), format_number(v.box.q25),
                    format_number(v.box.q75), outliers, std::to_string(v.box.n)});
  }
}

void scores_export(const GroupStats& stats, const std::string& metric, const std::filesystem::path& path,
                   const Provenance& prov) {
  std::vector<MetricRow> rows;
  for (const auto& v : stats.variants) {
    for (const auto& [seed, score] : v.scores) rows.push_back({variant_name(v.variant), seed, metric, score});
  }
  metrics_export(rows, path, prov);
}

void sweep_export(const SweepResult& sweep, const std::filesystem::path& path, const Provenance& prov) {
  Provenance p = prov;
  for (const auto& w : sweep.warnings) p.notes.push_back("warning: " + w);
  auto out = open_output(path, p);
  write_row(out, {"variant", "d", "runs", "mean", "stddev_across_sizes"});
  for (const auto& row : sweep.rows) {
    for (std::size_t s = 0; s < sweep.sizes.size(); ++s) {
      write_row(out, {variant_name(row.variant), std::to_string(sweep.sizes[s]),
                      std::to_string(row.scores[s].size()), format_number(row.means[s]), ""});
    }
    write_row(out, {variant_name(row.variant), "all", "", "", format_number(row.stddev)});
  }
}

void history_export(const TrainHistory& history, const std::filesystem::path& path, const Provenance& prov) {
  auto out = open_output(path, prov);
  write_row(out, {"epoch", "train_loss", "dev_metric", "best"});
  for (const auto& e : history.epochs) {
    write_row(out, {std::to_string(e.epoch), format_number(e.train_loss), format_number(e.dev_metric),
                    e.epoch == history.best_epoch ? "1" : "0"});
  }
}

void metrics_export(const std::vector<MetricRow>& rows, const std::filesystem::path& path,
                    const Provenance& prov) {
  auto out = open_output(path, prov);
  write_row(out, {"variant", "seed", "metric", "value"});
  for (const auto& r : rows) write_row(out, {r.variant, std::to_string(r.seed), r.metric, format_number(r.value)});
}

}  // namespace lexcnn
