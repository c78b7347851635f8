// SPDX-License-Identifier: Apache-2.0
//
// bigfive: command-line driver for the data generation, training, evaluation
// and annotation pipeline. Settings come from one TOML file (--config);
// command-line flags override it.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bigfive/annotation.hpp"
#include "bigfive/annotation_server.hpp"
#include "bigfive/classifier.hpp"
#include "bigfive/config.hpp"
#include "bigfive/corpus_generator.hpp"
#include "bigfive/corpus_readers.hpp"
#include "bigfive/datastore.hpp"
#include "bigfive/encoder.hpp"
#include "bigfive/error.hpp"
#include "bigfive/evaluation.hpp"
#include "bigfive/mock_provider.hpp"
#include "bigfive/personas.hpp"
#include "bigfive/remote_provider.hpp"

namespace fs = std::filesystem;
using namespace bigfive;

namespace {

struct Global {
  std::optional<fs::path> config_path;
  std::string log_level = "info";
};

// Flags shared by several subcommands. Unset ones leave the config alone.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> formula;
};

PipelineConfig resolve_config(const Global& g) {
  return g.config_path ? load_config(*g.config_path) : PipelineConfig{};
}

void log_config(const std::string& command, const PipelineConfig& c) {
  spdlog::info("{}: resolved config\n{}", command, to_toml(c));
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Written beside the target and renamed into place, so a failed run never
// leaves a half-written file.
void write_text(const fs::path& p, const std::string& text) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out.flush()) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, p);
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::exists(p)) throw ConfigError(what + " not found: " + p.string());
}

void stamp(const fs::path& artifact, const std::string& command, std::uint64_t seed,
           const PipelineConfig& c, std::map<std::string, std::string> extra = {}) {
  extra["resolved_config"] = to_toml(c);
  write_metadata(artifact, ArtifactMetadata{command, seed, std::move(extra)});
}

std::unique_ptr<CompletionProvider> make_provider(const PipelineConfig& c) {
  if (c.provider.kind == "remote") return remote_provider(c.provider.remote);
  return mock_provider(c.provider.mock_seed);
}

ProcessedOutputFormula formula_of(const PipelineConfig& c, const Overrides& o) {
  if (!o.formula) return c.formula;
  auto f = parse_formula(*o.formula);
  if (!f) throw ConfigError("unknown formula '" + *o.formula + "'");
  return *f;
}

std::vector<DatasetRecord> select_split(const std::vector<DatasetRecord>& records,
                                        const std::string& split) {
  if (split == "all") return records;
  std::string upper = split;
  for (char& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  auto s = parse_split(upper);
  if (!s) throw ConfigError("unknown split '" + split + "'");
  std::vector<DatasetRecord> out;
  for (const auto& r : records) {
    if (r.split == *s) out.push_back(r);
  }
  return out;
}

std::string model_name(const std::vector<std::string>& names, std::size_t i,
                       const TrainedModelBundle& bundle) {
  if (i < names.size()) return names[i];
  std::string name(to_string(bundle.strategy()));
  for (char& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return name;
}

// ---- generate --------------------------------------------------------------

struct GenerateArgs {
  fs::path out;
  std::optional<fs::path> scripts;
  std::optional<std::size_t> n_scripts;
  std::optional<int> exchanges;
};

int run_generate(const Global& g, const Overrides& o, const GenerateArgs& a) {
  PipelineConfig c = resolve_config(g);
  auto& plan = c.corpus.plan;
  if (a.scripts) c.corpus.scripts = fs::absolute(*a.scripts);
  if (a.n_scripts) plan.n_scripts = *a.n_scripts;
  if (a.exchanges) plan.n_exchanges = *a.exchanges;
  if (o.seed) plan.seed = *o.seed;
  if (o.workers) plan.workers = *o.workers;
  if (c.corpus.scripts) {
    require_file(*c.corpus.scripts, "user script");
    plan.user_utterances = load_user_script(*c.corpus.scripts);
  }
  log_config("generate", c);

  auto provider = make_provider(c);
  spdlog::info("generating {} messages with the {} provider", plan.message_count(),
               provider->name());
  auto records = make_records(generate_corpus(*provider, plan));
  save_corpus(records, a.out);
  stamp(a.out, "generate", plan.seed, c,
        {{"provider", std::string(provider->name())},
         {"messages", std::to_string(records.size())}});
  spdlog::info("wrote {} records to {}", records.size(), a.out.string());
  return 0;
}

// ---- ingest ----------------------------------------------------------------

struct IngestArgs {
  fs::path out;
  std::optional<std::string> source;
  std::optional<fs::path> input;
  std::optional<std::size_t> n;
};

int run_ingest(const Global& g, const Overrides& o, const IngestArgs& a) {
  PipelineConfig c = resolve_config(g);
  if (o.seed) c.ingest.seed = *o.seed;
  if (a.n) c.ingest.per_source = *a.n;
  if (a.source || a.input) {
    if (!a.source || !a.input) throw ConfigError("--source and --input go together");
    auto src = parse_source(*a.source);
    if (!src || *src == CorpusSource::GENERATED) {
      throw ConfigError("--source must be movie, multiwoz or convai");
    }
    c.ingest.sources = {{*src, fs::absolute(*a.input)}};
  }
  if (c.ingest.sources.empty()) throw ConfigError("no ingest sources configured");
  for (const auto& [src, path] : c.ingest.sources) require_file(path, std::string(to_string(src)));
  log_config("ingest", c);

  std::vector<LabeledMessage> messages;
  for (const auto& [src, path] : c.ingest.sources) {
    auto part = ingest_external(src, path, c.ingest.per_source, c.ingest.seed);
    spdlog::info("{}: {} messages from {}", to_string(src), part.size(), path.string());
    messages.insert(messages.end(), std::make_move_iterator(part.begin()),
                    std::make_move_iterator(part.end()));
  }
  auto records = make_records(std::move(messages));
  save_corpus(records, a.out);
  stamp(a.out, "ingest", c.ingest.seed, c, {{"messages", std::to_string(records.size())}});
  return 0;
}

// ---- split -----------------------------------------------------------------

struct SplitArgs {
  fs::path corpus;
  fs::path out;
  std::optional<std::size_t> holdout;
};

int run_split(const Global& g, const Overrides& o, const SplitArgs& a) {
  PipelineConfig c = resolve_config(g);
  if (o.seed) c.split.seed = *o.seed;
  if (a.holdout) c.split.holdout_count = *a.holdout;
  require_file(a.corpus, "corpus");
  log_config("split", c);

  std::vector<DatasetRecord> generated;
  std::vector<DatasetRecord> other;
  for (auto& r : load_corpus(a.corpus)) {
    if (r.message.source == CorpusSource::GENERATED) {
      r.split = Split::UNASSIGNED;  // re-splitting starts over
      generated.push_back(std::move(r));
    } else {
      other.push_back(std::move(r));
    }
  }
  auto records = split_holdout(std::move(generated), c.split);
  records.insert(records.end(), other.begin(), other.end());
  save_corpus(records, a.out);
  stamp(a.out, "split", c.split.seed, c,
        {{"holdout", std::to_string(c.split.holdout_count)}});
  spdlog::info("{} records, {} held out", records.size(), c.split.holdout_count);
  return 0;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  fs::path corpus;
  fs::path out;
  std::optional<std::string> strategy;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<double> learning_rate;
  std::optional<std::string> optimizer;
};

int run_train(const Global& g, const Overrides& o, const TrainArgs& a) {
  PipelineConfig c = resolve_config(g);
  auto& t = c.train;
  if (a.strategy) {
    auto s = parse_strategy(*a.strategy);
    if (!s) throw ConfigError("unknown strategy '" + *a.strategy + "'");
    t.strategy = *s;
  }
  if (a.optimizer) {
    auto k = parse_optimizer(*a.optimizer);
    if (!k) throw ConfigError("unknown optimizer '" + *a.optimizer + "'");
    t.optimizer = *k;
  }
  if (a.epochs) t.epochs = *a.epochs;
  if (a.batch_size) t.batch_size = *a.batch_size;
  if (a.learning_rate) t.learning_rate = *a.learning_rate;
  if (o.seed) t.seed = *o.seed;
  if (o.workers) t.workers = *o.workers;
  try {
    t.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  require_file(a.corpus, "corpus");
  log_config("train", c);

  // Train on the TRAIN split; an unsplit corpus is used whole.
  const auto records = load_corpus(a.corpus);
  std::vector<LabeledMessage> train_set;
  std::vector<LabeledMessage> unsplit;
  for (const auto& r : records) {
    if (!r.message.labeled()) continue;
    if (r.split == Split::TRAIN) train_set.push_back(r.message);
    if (r.split == Split::UNASSIGNED) unsplit.push_back(r.message);
  }
  if (train_set.empty()) train_set = std::move(unsplit);

  HashedNgramEncoder backbone(c.encoder);
  spdlog::info("training {} on {} messages", to_string(t.strategy), train_set.size());
  auto bundle = train(train_set, backbone, t);
  save_bundle(bundle, a.out);
  stamp(a.out, "train", t.seed, c,
        {{"strategy", std::string(to_string(t.strategy))},
         {"fingerprint", bundle.fingerprint()},
         {"trainable_parameters", std::to_string(bundle.trainable_parameter_count())}});
  spdlog::info("wrote {}", a.out.string());
  return 0;
}

// ---- predict ---------------------------------------------------------------

struct PredictArgs {
  fs::path model;
  fs::path corpus;
  fs::path out;
  std::string split = "test";
};

int run_predict(const Global& g, const Overrides& o, const PredictArgs& a) {
  PipelineConfig c = resolve_config(g);
  const auto formula = formula_of(c, o);
  c.formula = formula;
  require_file(a.model, "model");
  require_file(a.corpus, "corpus");
  log_config("predict", c);

  const auto bundle = load_bundle(a.model);
  const auto records = select_split(load_corpus(a.corpus), a.split);
  const auto predictions = predict(bundle, records, formula);
  save_predictions(predictions, a.out);
  stamp(a.out, "predict", bundle.config().seed, c,
        {{"model", a.model.filename().string()}, {"split", a.split}});
  return 0;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  std::vector<fs::path> models;
  std::vector<std::string> names;
  fs::path corpus;
  std::optional<fs::path> annotations;
  fs::path out;
  std::string split = "test";
  std::optional<std::string> dataset;
  bool by_source = false;
};

int run_evaluate(const Global& g, const Overrides& o, const EvaluateArgs& a) {
  PipelineConfig c = resolve_config(g);
  c.formula = formula_of(c, o);
  for (const auto& m : a.models) require_file(m, "model");
  require_file(a.corpus, "corpus");
  if (a.annotations) require_file(*a.annotations, "annotations");
  log_config("evaluate", c);

  const auto records = select_split(load_corpus(a.corpus), a.split);
  std::map<std::string, AnnotationSummary> annotated;
  if (a.annotations) annotated = binarize_annotations(load_annotations(*a.annotations));

  // Generated messages carry their label; real ones need annotations.
  std::vector<GoldLabel> golds;
  std::map<std::string, CorpusSource> source_of;
  bool any_generated = false;
  bool any_annotated = false;
  for (const auto& r : records) {
    if (r.message.labeled()) {
      golds.push_back(gold_from_message(r.message));
      any_generated = true;
    } else if (auto it = annotated.find(r.message.id); it != annotated.end()) {
      golds.push_back(it->second.gold);
      any_annotated = true;
    } else {
      continue;
    }
    source_of[r.message.id] = r.message.source;
  }
  if (golds.empty()) throw ConfigError("no gold labels: corpus has no labeled or annotated messages");
  const std::string dataset =
      a.dataset.value_or(any_generated && any_annotated ? "mixed"
                         : any_generated                ? "generated"
                                                        : "real");

  EvaluationReport report;
  for (std::size_t i = 0; i < a.models.size(); ++i) {
    const auto bundle = load_bundle(a.models[i]);
    const std::string name = model_name(a.names, i, bundle);
    const auto predictions = predict(bundle, records, c.formula);
    report.rows.push_back(accuracy_by_trait(predictions, golds, name, dataset));
    if (!a.by_source) continue;
    for (auto src : {CorpusSource::GENERATED, CorpusSource::MOVIE_DIALOGS, CorpusSource::MULTIWOZ,
                     CorpusSource::CONVAI}) {
      const auto keep = [&](std::string_view id) {
        auto it = source_of.find(std::string(id));
        return it != source_of.end() && it->second == src;
      };
      if (std::none_of(golds.begin(), golds.end(),
                       [&](const GoldLabel& gl) { return keep(gl.message_id); })) {
        continue;
      }
      report.rows.push_back(
          accuracy_by_trait(predictions, golds, name, std::string(to_string(src)), keep));
    }
  }
  write_text(a.out, report_to_csv(report));
  stamp(a.out, "evaluate", 0, c, {{"dataset", dataset}});
  std::cout << report_to_text(report);
  return 0;
}

// ---- correlate -------------------------------------------------------------

struct CorrelateArgs {
  std::vector<fs::path> models;
  std::vector<std::string> names;
  fs::path corpus;
  fs::path annotations;
  fs::path out;
};

int run_correlate(const Global& g, const Overrides& o, const CorrelateArgs& a) {
  PipelineConfig c = resolve_config(g);
  c.formula = formula_of(c, o);
  for (const auto& m : a.models) require_file(m, "model");
  require_file(a.corpus, "corpus");
  require_file(a.annotations, "annotations");
  log_config("correlate", c);

  const auto annotated = binarize_annotations(load_annotations(a.annotations));
  std::vector<DatasetRecord> records;
  for (auto& r : load_corpus(a.corpus)) {
    if (annotated.contains(r.message.id)) records.push_back(std::move(r));
  }
  if (records.empty()) throw ConfigError("no corpus message has annotations");

  std::vector<CorrelationRow> rows;
  for (std::size_t i = 0; i < a.models.size(); ++i) {
    const auto bundle = load_bundle(a.models[i]);
    const auto predictions = predict(bundle, records, c.formula);
    rows.push_back({model_name(a.names, i, bundle), difficulty_correlation(predictions, annotated)});
  }
  write_text(a.out, correlations_to_csv(rows));
  stamp(a.out, "correlate", 0, c, {{"messages", std::to_string(records.size())}});
  std::cout << correlations_to_text(rows);
  return 0;
}

// ---- report ----------------------------------------------------------------

struct ReportArgs {
  std::optional<fs::path> report;
  std::optional<fs::path> correlations;
};

int run_report(const ReportArgs& a) {
  if (!a.report && !a.correlations) throw ConfigError("give --report and/or --correlations");
  if (a.report) {
    require_file(*a.report, "report");
    std::cout << report_to_text(report_from_csv(read_text(*a.report)));
  }
  if (a.correlations) {
    require_file(*a.correlations, "correlations");
    if (a.report) std::cout << "\n";
    std::cout << correlations_to_text(correlations_from_csv(read_text(*a.correlations)));
  }
  return 0;
}

// ---- serve -----------------------------------------------------------------

struct ServeArgs {
  std::optional<fs::path> corpus;
  std::optional<fs::path> journal;
  std::optional<std::string> host;
  std::optional<int> port;
  std::optional<fs::path> static_dir;
  std::optional<std::size_t> redundancy;
  std::string split = "test";
};

int run_serve(const Global& g, const ServeArgs& a) {
  PipelineConfig c = resolve_config(g);
  auto& s = c.service;
  if (a.journal) s.journal = fs::absolute(*a.journal);
  if (a.host) s.host = *a.host;
  if (a.port) s.port = *a.port;
  if (a.static_dir) s.static_dir = fs::absolute(*a.static_dir);
  if (a.redundancy) s.redundancy = *a.redundancy;
  if (a.corpus) require_file(*a.corpus, "corpus");
  log_config("serve", c);

  // Block the stop signals before any thread starts so sigwait sees them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  AnnotationService service(s.journal, {s.redundancy, s.annotators, {}});
  if (a.corpus) {
    std::vector<LabeledMessage> messages;
    for (const auto& r : select_split(load_corpus(*a.corpus), a.split)) {
      messages.push_back(r.message);
    }
    const auto added = service.enqueue_tasks(messages);
    spdlog::info("queued {} tasks ({} already present)", added.added, added.skipped);
  }
  AnnotationServer server(service, s.static_dir);
  const int port = server.bind(s.host, s.port);
  server.start();
  spdlog::info("listening on http://{}:{}", s.host, port);

  int sig = 0;
  sigwait(&stop_signals, &sig);
  spdlog::info("signal {} received, shutting down", sig);
  server.stop();
  return 0;
}

// ---- personas --------------------------------------------------------------

int run_personas(const Global& g, bool headers) {
  const PipelineConfig c = resolve_config(g);
  const auto personas = enumerate_personas();
  if (!headers) {
    std::cout << personas_to_json(personas);
    return 0;
  }
  for (const auto& p : personas) {
    std::cout << p.id << "\t" << build_prompt_header(p, c.corpus.plan.prompt) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Big Five persona dialogue generation, classification and annotation"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  Global g;
  Overrides o;
  app.add_option("-c,--config", g.config_path, "TOML config file")->check(CLI::ExistingFile);
  app.add_option("--log-level", g.log_level, "trace|debug|info|warn|error|off")
      ->capture_default_str();

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "seed (overrides the config)");
  };
  auto add_workers = [&](CLI::App* sub) {
    sub->add_option("--workers", o.workers, "parallel workers")->check(CLI::PositiveNumber);
  };
  auto add_formula = [&](CLI::App* sub) {
    sub->add_option("--formula", o.formula, "processed output: sum_of_abs|abs_difference");
  };

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "simulate persona conversations into a corpus");
  generate->add_option("-o,--out", gen.out, "output corpus (JSONL)")->required();
  generate->add_option("--scripts", gen.scripts, "user utterance file")->check(CLI::ExistingFile);
  generate->add_option("--n-scripts", gen.n_scripts, "user scripts per persona");
  generate->add_option("--exchanges", gen.exchanges, "exchanges per conversation");
  add_seed(generate);
  add_workers(generate);

  IngestArgs ing;
  auto* ingest = app.add_subcommand("ingest", "sample real dialogue corpora into test records");
  ingest->add_option("-o,--out", ing.out, "output corpus (JSONL)")->required();
  ingest->add_option("--source", ing.source, "movie|multiwoz|convai");
  ingest->add_option("--input", ing.input, "raw corpus path");
  ingest->add_option("-n,--count", ing.n, "messages per source");
  add_seed(ingest);

  SplitArgs spl;
  auto* split = app.add_subcommand("split", "reserve a seeded holdout of generated records");
  split->add_option("--corpus", spl.corpus, "input corpus")->required();
  split->add_option("-o,--out", spl.out, "output corpus")->required();
  split->add_option("--holdout", spl.holdout, "number of held-out records");
  add_seed(split);

  TrainArgs trn;
  auto* train_cmd = app.add_subcommand("train", "train a classifier bundle");
  train_cmd->add_option("--corpus", trn.corpus, "training corpus")->required();
  train_cmd->add_option("-o,--out", trn.out, "output bundle")->required();
  train_cmd->add_option("--strategy", trn.strategy, "together|separate|adapter");
  train_cmd->add_option("--epochs", trn.epochs);
  train_cmd->add_option("--batch-size", trn.batch_size);
  train_cmd->add_option("--lr", trn.learning_rate, "learning rate");
  train_cmd->add_option("--optimizer", trn.optimizer, "sgd|adam");
  add_seed(train_cmd);
  add_workers(train_cmd);

  PredictArgs prd;
  auto* predict_cmd = app.add_subcommand("predict", "score corpus messages");
  predict_cmd->add_option("--model", prd.model, "bundle")->required();
  predict_cmd->add_option("--corpus", prd.corpus, "corpus")->required();
  predict_cmd->add_option("-o,--out", prd.out, "output predictions (JSONL)")->required();
  predict_cmd->add_option("--split", prd.split, "train|test|unassigned|all")->capture_default_str();
  add_formula(predict_cmd);

  EvaluateArgs evl;
  auto* evaluate = app.add_subcommand("evaluate", "per-trait accuracy report");
  evaluate->add_option("--model", evl.models, "bundle (repeatable)")->required();
  evaluate->add_option("--name", evl.names, "row label per --model");
  evaluate->add_option("--corpus", evl.corpus, "corpus")->required();
  evaluate->add_option("--annotations", evl.annotations, "annotation journal for real messages");
  evaluate->add_option("-o,--out", evl.out, "output report (CSV)")->required();
  evaluate->add_option("--split", evl.split, "train|test|unassigned|all")->capture_default_str();
  evaluate->add_option("--dataset", evl.dataset, "dataset label for the report rows");
  evaluate->add_flag("--by-source", evl.by_source, "add one row per corpus source");
  add_formula(evaluate);

  CorrelateArgs cor;
  auto* correlate = app.add_subcommand("correlate", "processed output vs annotator difficulty");
  correlate->add_option("--model", cor.models, "bundle (repeatable)")->required();
  correlate->add_option("--name", cor.names, "row label per --model");
  correlate->add_option("--corpus", cor.corpus, "corpus")->required();
  correlate->add_option("--annotations", cor.annotations, "annotation journal")->required();
  correlate->add_option("-o,--out", cor.out, "output correlations (CSV)")->required();
  add_formula(correlate);

  ServeArgs srv;
  auto* serve = app.add_subcommand("serve", "run the annotation HTTP service");
  serve->add_option("--corpus", srv.corpus, "corpus whose messages become tasks");
  serve->add_option("--split", srv.split, "which split to queue")->capture_default_str();
  serve->add_option("--journal", srv.journal, "annotation journal (JSONL)");
  serve->add_option("--host", srv.host);
  serve->add_option("--port", srv.port, "0 picks a free port");
  serve->add_option("--static", srv.static_dir, "directory served at /");
  serve->add_option("--redundancy", srv.redundancy, "annotators per message");

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "render saved report CSVs as tables");
  report->add_option("--report", rep.report, "accuracy report CSV");
  report->add_option("--correlations", rep.correlations, "correlation CSV");

  bool headers = false;
  auto* personas = app.add_subcommand("personas", "list the 20 personas");
  personas->add_flag("--headers", headers, "print prompt headers instead of JSON");

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("bigfive");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");
  spdlog::set_level(spdlog::level::from_str(g.log_level));

  try {
    if (*generate) return run_generate(g, o, gen);
    if (*ingest) return run_ingest(g, o, ing);
    if (*split) return run_split(g, o, spl);
    if (*train_cmd) return run_train(g, o, trn);
    if (*predict_cmd) return run_predict(g, o, prd);
    if (*evaluate) return run_evaluate(g, o, evl);
    if (*correlate) return run_correlate(g, o, cor);
    if (*serve) return run_serve(g, srv);
    if (*report) return run_report(rep);
    if (*personas) return run_personas(g, headers);
  } catch (const ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
