#include "lexcnn/cli.hpp"

#include <charconv>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lexcnn/checkpoint.hpp"
#include "lexcnn/error.hpp"
#include "lexcnn/report.hpp"
#include "lexcnn/training.hpp"
#include "lexcnn/util.hpp"

namespace lexcnn {

namespace {

struct ConfigFlags {
  std::string config_file;
  std::vector<std::string> settings;
  std::string variant;
  std::optional<std::uint64_t> seed;
  std::string scheme;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--config", f.config_file, "flat key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", f.settings, "override a config value (key=value), repeatable");
  cmd->add_option("--variant", f.variant, "model variant: base, nc, mc, sc, optionally with -eav");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--scheme", f.scheme, "label scheme: 3 or 5");
}

TrainConfig resolve_config(const ConfigFlags& f) {
  TrainConfig cfg;
  if (!f.config_file.empty()) apply_config_file(cfg, f.config_file);
  if (!f.scheme.empty()) apply_setting(cfg, "scheme", f.scheme);
  for (const auto& s : f.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError(fmt::format("--set expects key=value, got '{}'", s));
    apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!f.variant.empty()) apply_setting(cfg, "variant", f.variant);
  if (f.seed) cfg.seed = *f.seed;
  cfg.validate();
  return cfg;
}

void echo_config(const TrainConfig& cfg, std::ostream& out) {
  for (const auto& [k, v] : config_entries(cfg)) out << "# config: " << k << " = " << v << '\n';
}

struct Tables {
  WordEmbeddingTable words;
  std::optional<LexiconTable> lexicon;
  TableProvenance provenance;
};

std::optional<LexiconTable> load_lexicon(const std::vector<std::string>& paths) {
  if (paths.empty()) return std::nullopt;
  if (paths.size() == 1 && is_serialized_lexicon(paths.front())) return load_lexicon_table(paths.front());
  std::vector<std::filesystem::path> sources(paths.begin(), paths.end());
  return build_lexicon_table(sources);
}

Tables load_tables(const std::string& emb, const std::vector<std::string>& lex, std::uint64_t oov_seed) {
  Tables t;
  t.words = load_word_embeddings(emb, oov_seed);
  t.lexicon = load_lexicon(lex);
  t.provenance.embeddings_path = emb;
  t.provenance.embeddings_digest = file_digest(emb);
  for (const auto& p : lex) {
    t.provenance.lexicon_paths.push_back(p);
    t.provenance.lexicon_digests.push_back(file_digest(p));
  }
  return t;
}

Provenance make_provenance(const TrainConfig* cfg, const std::vector<std::string>& inputs) {
  Provenance p;
  if (cfg != nullptr) p.config = config_entries(*cfg);
  for (const auto& in : inputs) {
    if (!in.empty()) p.inputs.push_back({in, file_digest(in)});
  }
  return p;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  auto parse_one = [&](std::string_view s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw UsageError(fmt::format("invalid seed '{}'", s));
    return v;
  };
  std::vector<std::uint64_t> seeds;
  const auto range = text.find("..");
  if (range != std::string::npos) {
    const auto lo = parse_one(std::string_view(text).substr(0, range));
    const auto hi = parse_one(std::string_view(text).substr(range + 2));
    if (hi < lo) throw UsageError("seed range is empty");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    seeds.push_back(parse_one(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return seeds;
}

std::string all_variant_names() {
  std::string out;
  for (const auto& v : all_variants()) out += (out.empty() ? "" : ",") + variant_name(v);
  return out;
}

// ---------------------------------------------------------------------------

template <typename Scalar>
void train_typed(const TrainConfig& cfg, const Dataset& trn, const Dataset& dev, const Tables& tables,
                 const std::string& model_path, const std::string& history_path, const Provenance& prov,
                 std::ostream& out) {
  const LexiconTable* lex = tables.lexicon ? &*tables.lexicon : nullptr;
  auto result = train<Scalar>(trn, dev, tables.words, lex, cfg);
  Checkpoint<Scalar> ckpt{cfg, tables.provenance, std::move(result.params)};
  save_checkpoint(ckpt, model_path);
  history_export(result.history, history_path, prov);
  out << "epochs = " << result.history.epochs.size() << '\n';
  out << "best_epoch = " << result.history.best_epoch << '\n';
  out << "best_dev_" << metric_name(cfg.effective_metric()) << " = "
      << format_shortest(result.history.best_dev_metric) << '\n';
  out << "model = " << model_path << '\n';
  out << "history = " << history_path << '\n';
}

template <typename Scalar>
struct LoadedModel {
  Checkpoint<Scalar> ckpt;
  Tables tables;
};

template <typename Scalar>
LoadedModel<Scalar> load_model(const std::string& path, const std::string& emb_override,
                               const std::vector<std::string>& lex_override, std::ostream& err) {
  LoadedModel<Scalar> m;
  m.ckpt = load_checkpoint<Scalar>(path);
  const auto& prov = m.ckpt.tables;
  const std::string emb = emb_override.empty() ? prov.embeddings_path : emb_override;
  const auto lex = lex_override.empty() ? prov.lexicon_paths : lex_override;
  m.tables = load_tables(emb, lex, m.ckpt.config.oov_seed);
  if (m.tables.provenance.embeddings_digest != prov.embeddings_digest ||
      m.tables.provenance.lexicon_digests != prov.lexicon_digests) {
    err << "warning: embedding or lexicon files differ from the ones the model was trained with\n";
  }
  return m;
}

template <typename Scalar>
void evaluate_typed(const std::string& model_path, const std::string& tst_path, const std::string& metric_text,
                    const std::string& emb, const std::vector<std::string>& lex, const std::string& csv,
                    std::ostream& out, std::ostream& err) {
  auto m = load_model<Scalar>(model_path, emb, lex, err);
  const auto& cfg = m.ckpt.config;
  echo_config(cfg, out);
  const Metric metric = metric_text.empty() ? cfg.effective_metric() : parse_metric(metric_text);
  const auto tst = load_dataset(tst_path, cfg.scheme, Split::Test);
  const LexiconTable* lexp = m.tables.lexicon ? &*m.tables.lexicon : nullptr;
  auto docs = prepare_documents(tst, m.tables.words, lexp, m.ckpt.params);
  const auto cm = evaluate(m.ckpt.params, docs, cfg.scheme);
  const double value = metric_value(cm, metric);
  out << "variant = " << variant_name(cfg.model.variant()) << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "documents = " << cm.total() << '\n';
  out << metric_name(metric) << " = " << format_shortest(value) << '\n';
  if (!csv.empty()) {
    metrics_export({{variant_name(cfg.model.variant()), cfg.seed, metric_name(metric), value}}, csv,
                   make_provenance(&cfg, {model_path, tst_path}));
  }
}

template <typename Scalar>
void heatmap_typed(const std::string& model_path, const std::string& docs_path, const std::string& format,
                   const std::string& out_path, const std::string& emb, const std::vector<std::string>& lex,
                   std::ostream& out, std::ostream& err) {
  const auto fmt_kind = parse_heatmap_format(format);
  auto m = load_model<Scalar>(model_path, emb, lex, err);
  const auto& cfg = m.ckpt.config;
  echo_config(cfg, out);
  const auto ds = load_dataset(docs_path, cfg.scheme, Split::Test);
  const LexiconTable* lexp = m.tables.lexicon ? &*m.tables.lexicon : nullptr;
  const auto docs = heatmap_documents(m.ckpt.params, ds, m.tables.words, lexp);
  heatmap_export(docs, cfg.scheme, out_path, fmt_kind, make_provenance(&cfg, {model_path, docs_path}));
  out << "heatmap = " << out_path << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lexicon-integrated convolutional sentiment classifiers", "lexcnn"};
  app.require_subcommand(1);

  // build-lexicon
  std::string lex_out;
  std::vector<std::string> lex_sources;
  auto* build = app.add_subcommand("build-lexicon", "concatenate lexicon sources into one table");
  build->add_option("--out", lex_out, "output table")->required();
  build->add_option("--sources", lex_sources, "lexicon source files, in column order")->required();

  // coverage
  std::string cov_data, cov_emb, cov_scheme = "3";
  std::vector<std::string> cov_lex;
  auto* cov = app.add_subcommand("coverage", "percentage of word types covered by a table");
  cov->add_option("--data", cov_data, "dataset file")->required();
  cov->add_option("--scheme", cov_scheme, "label scheme: 3 or 5");
  auto* cov_emb_opt = cov->add_option("--emb", cov_emb, "word embedding file");
  auto* cov_lex_opt = cov->add_option("--lex", cov_lex, "lexicon table or sources");
  cov_emb_opt->excludes(cov_lex_opt);

  // train
  ConfigFlags train_flags;
  std::string trn_path, dev_path, emb_path, model_out = "model.ckpt", history_out = "history.csv";
  std::vector<std::string> lex_paths;
  auto* tr = app.add_subcommand("train", "train one model");
  add_config_flags(tr, train_flags);
  tr->add_option("--trn", trn_path, "training set")->required();
  tr->add_option("--dev", dev_path, "development set")->required();
  tr->add_option("--emb", emb_path, "word embedding file")->required();
  tr->add_option("--lex", lex_paths, "lexicon table or lexicon sources");
  tr->add_option("--model", model_out, "checkpoint to write");
  tr->add_option("--history", history_out, "history CSV to write");

  // evaluate
  std::string eval_model, eval_tst, eval_metric, eval_emb, eval_csv;
  std::vector<std::string> eval_lex;
  auto* ev = app.add_subcommand("evaluate", "score a checkpoint on a dataset");
  ev->add_option("--model", eval_model, "checkpoint")->required();
  ev->add_option("--tst", eval_tst, "evaluation set")->required();
  ev->add_option("--metric", eval_metric, "avgf1 or acc (default: the model's metric)");
  ev->add_option("--emb", eval_emb, "override the stored embedding path");
  ev->add_option("--lex", eval_lex, "override the stored lexicon paths");
  ev->add_option("--csv", eval_csv, "also write a CSV row (variant, seed, metric, value)");

  // group-run
  ConfigFlags group_flags;
  std::string g_trn, g_dev, g_tst, g_emb, g_seeds = "1..10", g_variants = all_variant_names();
  std::string g_out = "group_stats.csv", g_scores, g_curves;
  std::vector<std::string> g_lex;
  int g_threads = 1;
  auto* gr = app.add_subcommand("group-run", "train every variant under several seeds");
  add_config_flags(gr, group_flags);
  gr->add_option("--trn", g_trn, "training set")->required();
  gr->add_option("--dev", g_dev, "development set")->required();
  gr->add_option("--tst", g_tst, "evaluation set (default: dev)");
  gr->add_option("--emb", g_emb, "word embedding file")->required();
  gr->add_option("--lex", g_lex, "lexicon table or lexicon sources");
  gr->add_option("--seeds", g_seeds, "seed range a..b or list a,b,c");
  gr->add_option("--variants", g_variants, "comma-separated variants");
  gr->add_option("--out", g_out, "box statistics CSV");
  gr->add_option("--scores", g_scores, "per-seed scores CSV");
  gr->add_option("--curves", g_curves, "averaged learning curves CSV");
  gr->add_option("--threads", g_threads, "concurrent runs");

  // sweep
  ConfigFlags sweep_flags;
  std::string s_trn, s_dev, s_tst, s_variants = all_variant_names(), s_out = "sweep.csv";
  std::vector<std::string> s_emb, s_lex;
  int s_runs = 1;
  auto* sw = app.add_subcommand("sweep", "train across word embedding sizes");
  add_config_flags(sw, sweep_flags);
  sw->add_option("--trn", s_trn, "training set")->required();
  sw->add_option("--dev", s_dev, "development set")->required();
  sw->add_option("--tst", s_tst, "evaluation set (default: dev)");
  sw->add_option("--emb", s_emb, "one embedding file per size")->required();
  sw->add_option("--lex", s_lex, "lexicon table or lexicon sources");
  sw->add_option("--variants", s_variants, "comma-separated variants");
  sw->add_option("--runs", s_runs, "runs per size (seeds 1..runs)");
  sw->add_option("--out", s_out, "sweep CSV");

  // heatmap
  std::string h_model, h_docs, h_format = "html", h_out, h_emb;
  std::vector<std::string> h_lex;
  auto* hm = app.add_subcommand("heatmap", "export attention weights");
  hm->add_option("--model", h_model, "checkpoint of an EAV model")->required();
  hm->add_option("--docs", h_docs, "documents to render")->required();
  hm->add_option("--format", h_format, "html or csv");
  hm->add_option("--out", h_out, "output file (default: heatmap.<format>)");
  hm->add_option("--emb", h_emb, "override the stored embedding path");
  hm->add_option("--lex", h_lex, "override the stored lexicon paths");

  // grad-check
  std::string gc_mode = "sc-eav";
  double gc_eps = 1e-5;
  double gc_tol = 1e-4;
  std::uint64_t gc_seed = 1;
  auto* gc = app.add_subcommand("grad-check", "finite-difference check of the analytic gradients");
  gc->add_option("--mode", gc_mode, "variant to check, or 'all'");
  gc->add_option("--epsilon", gc_eps, "central difference step");
  gc->add_option("--tolerance", gc_tol, "maximum accepted relative error");
  gc->add_option("--seed", gc_seed, "seed of the random micro-instance");

  std::vector<std::string> argv_storage{"lexcnn"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*build) {
      std::vector<std::filesystem::path> sources(lex_sources.begin(), lex_sources.end());
      const auto table = build_lexicon_table(sources);
      save_lexicon_table(table, lex_out);
      out << "width = " << table.width() << '\n';
      for (const auto& s : table.spans()) out << "span = " << s.source << " [" << s.begin << ", " << s.end << ")\n";
      out << "words = " << table.size() << '\n';
      out << "table = " << lex_out << '\n';
    } else if (*cov) {
      const auto ds = load_dataset(cov_data, parse_scheme(cov_scheme));
      double pct = 0.0;
      if (!cov_emb.empty()) {
        pct = coverage(load_word_embeddings(cov_emb, 0), ds);
      } else if (!cov_lex.empty()) {
        pct = coverage(*load_lexicon(cov_lex), ds);
      } else {
        throw UsageError("coverage needs --emb or --lex");
      }
      out << "coverage = " << format_shortest(pct) << '\n';
    } else if (*tr) {
      const auto cfg = resolve_config(train_flags);
      echo_config(cfg, out);
      const auto trn = load_dataset(trn_path, cfg.scheme, Split::Train);
      const auto dev = load_dataset(dev_path, cfg.scheme, Split::Dev);
      const auto tables = load_tables(emb_path, lex_paths, cfg.oov_seed);
      std::vector<std::string> inputs{trn_path, dev_path, emb_path};
      inputs.insert(inputs.end(), lex_paths.begin(), lex_paths.end());
      const auto prov = make_provenance(&cfg, inputs);
      if (cfg.precision == Precision::Float64) {
        train_typed<double>(cfg, trn, dev, tables, model_out, history_out, prov, out);
      } else {
        train_typed<float>(cfg, trn, dev, tables, model_out, history_out, prov, out);
      }
    } else if (*ev) {
      if (read_checkpoint_config(eval_model).precision == Precision::Float64) {
        evaluate_typed<double>(eval_model, eval_tst, eval_metric, eval_emb, eval_lex, eval_csv, out, err);
      } else {
        evaluate_typed<float>(eval_model, eval_tst, eval_metric, eval_emb, eval_lex, eval_csv, out, err);
      }
    } else if (*gr) {
      const auto cfg = resolve_config(group_flags);
      echo_config(cfg, out);
      const auto seeds = parse_seeds(g_seeds);
      const auto variants = parse_variant_list(g_variants);
      const auto trn = load_dataset(g_trn, cfg.scheme, Split::Train);
      const auto dev = load_dataset(g_dev, cfg.scheme, Split::Dev);
      std::optional<Dataset> tst;
      if (!g_tst.empty()) tst = load_dataset(g_tst, cfg.scheme, Split::Test);
      const auto tables = load_tables(g_emb, g_lex, cfg.oov_seed);
      ExperimentData data{&trn, &dev, tst ? &*tst : nullptr, &tables.words,
                          tables.lexicon ? &*tables.lexicon : nullptr};
      const auto stats = group_run(cfg, seeds, variants, data, g_threads);
      std::vector<std::string> inputs{g_trn, g_dev, g_tst, g_emb};
      inputs.insert(inputs.end(), g_lex.begin(), g_lex.end());
      auto prov = make_provenance(&cfg, inputs);
      prov.notes.push_back(fmt::format("seeds: {}", g_seeds));
      boxstats_export(stats, g_out, prov);
      if (!g_scores.empty()) scores_export(stats, metric_name(cfg.effective_metric()), g_scores, prov);
      if (!g_curves.empty()) {
        std::vector<CurveSeries> series;
        for (const auto& v : variants) {
          CurveSeries s{v, {}, {}};
          for (const auto& run : stats.runs) {
            if (run.variant == v && run.score) {
              s.seeds.push_back(run.seed);
              s.histories.push_back(run.history);
            }
          }
          if (!s.histories.empty()) series.push_back(std::move(s));
        }
        curves_export(series, g_curves, prov);
      }
      for (const auto& v : stats.variants) {
        if (v.scores.empty()) continue;
        out << variant_name(v.variant) << ": median = " << format_shortest(v.box.median)
            << ", q25 = " << format_shortest(v.box.q25) << ", q75 = " << format_shortest(v.box.q75)
            << ", n = " << v.box.n << '\n';
      }
      for (const auto& w : stats.warnings) err << "warning: " << w << '\n';
      out << "stats = " << g_out << '\n';
      if (!stats.warnings.empty()) return 3;
    } else if (*sw) {
      const auto cfg = resolve_config(sweep_flags);
      echo_config(cfg, out);
      const auto variants = parse_variant_list(s_variants);
      const auto trn = load_dataset(s_trn, cfg.scheme, Split::Train);
      const auto dev = load_dataset(s_dev, cfg.scheme, Split::Dev);
      std::optional<Dataset> tst;
      if (!s_tst.empty()) tst = load_dataset(s_tst, cfg.scheme, Split::Test);
      const auto lexicon = load_lexicon(s_lex);
      ExperimentData data{&trn, &dev, tst ? &*tst : nullptr, nullptr, lexicon ? &*lexicon : nullptr};
      std::vector<std::filesystem::path> files(s_emb.begin(), s_emb.end());
      const auto sweep = embedding_size_sweep(cfg, data, files, variants, s_runs);
      std::vector<std::string> inputs{s_trn, s_dev, s_tst};
      inputs.insert(inputs.end(), s_emb.begin(), s_emb.end());
      inputs.insert(inputs.end(), s_lex.begin(), s_lex.end());
      sweep_export(sweep, s_out, make_provenance(&cfg, inputs));
      for (const auto& row : sweep.rows) {
        out << variant_name(row.variant) << ": stddev = " << format_shortest(row.stddev) << '\n';
      }
      for (const auto& w : sweep.warnings) err << "warning: " << w << '\n';
      out << "sweep = " << s_out << '\n';
    } else if (*hm) {
      const std::string path = h_out.empty() ? "heatmap." + h_format : h_out;
      if (read_checkpoint_config(h_model).precision == Precision::Float64) {
        heatmap_typed<double>(h_model, h_docs, h_format, path, h_emb, h_lex, out, err);
      } else {
        heatmap_typed<float>(h_model, h_docs, h_format, path, h_emb, h_lex, out, err);
      }
    } else if (*gc) {
      std::vector<Variant> variants =
          gc_mode == "all" ? std::vector<Variant>{} : std::vector<Variant>{parse_variant(gc_mode)};
      if (gc_mode == "all") {
        for (auto mode : {IntegrationMode::Base, IntegrationMode::NaiveConcat, IntegrationMode::Multichannel,
                          IntegrationMode::SeparateConv}) {
          variants.push_back({mode, false});
          variants.push_back({mode, true});
        }
      }
      TrainConfig cfg;
      GradCheckProbe probe;
      probe.seed = gc_seed;
      double worst = 0.0;
      for (const auto& v : variants) {
        cfg.model.mode = v.mode;
        cfg.model.eav = v.eav;
        const auto report = grad_check(cfg, probe, gc_eps);
        for (const auto& [group, e] : report.groups) {
          out << variant_name(v) << " " << group << " = " << format_shortest(e) << '\n';
        }
        out << variant_name(v) << " max_relative_error = " << format_shortest(report.max_error) << '\n';
        worst = std::max(worst, report.max_error);
      }
      if (worst > gc_tol) {
        err << "gradient check failed: " << format_shortest(worst) << " > " << format_shortest(gc_tol) << '\n';
        return 3;
      }
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace lexcnn
