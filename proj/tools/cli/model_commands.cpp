// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

// train, evaluate, predict, ablate and gradcheck.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cli/cli.hpp"
#include "cli/common.hpp"
#include "lyrnet/ad/grad_check.hpp"
#include "lyrnet/eval/evaluate.hpp"
#include "lyrnet/train/checkpoint.hpp"
#include "lyrnet/train/experiment.hpp"
#include "lyrnet/train/grad_cases.hpp"

namespace lyrnet::cli {
namespace {

// Options that shape the model and the optimizer, shared by train and ablate.
struct ModelFlags {
  std::string config;
  std::string preset = "scratch";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs, batch_size;
  std::optional<double> learning_rate;
  std::string lambdas, precision;

  void add_to(CLI::App& sub) {
    sub.add_option("--config", config, "JSON config (encoder.*, heads.*, train.* keys)");
    sub.add_option("--preset", preset,
                   "Training defaults: scratch (lr 1e-2, adam eps 1e-2, clip 1.0), desk (lr 1e-3) or finetune (lr 2e-5)")
        ->check(CLI::IsMember({"scratch", "desk", "finetune"}))
        ->capture_default_str();
    sub.add_option("--seed", seed, "Initialization, shuffling and dropout seed");
    sub.add_option("--epochs", epochs);
    sub.add_option("--batch-size", batch_size);
    sub.add_option("--lr", learning_rate, "Learning rate");
    sub.add_option("--lambdas", lambdas, "Task weights q,v,a");
    sub.add_option("--precision", precision, "f64 or f32")->check(CLI::IsMember({"f64", "f32"}));
  }

  // Preset, then config file, then flags.
  void resolve(ModelConfig& model, train::TrainingConfig& training, RunManifest& manifest) const {
    if (preset == "finetune") {
      training = train::TrainingConfig{};
    } else if (preset == "desk") {
      training = train::TrainingConfig::desk_preset();
    } else {
      training = train::TrainingConfig::scratch_preset();
    }
    if (!config.empty()) {
      apply_model_config(read_config_file(config), model, training);
      manifest.add_input(config);
    }
    if (seed) training.seed = *seed;
    if (epochs) training.epochs = *epochs;
    if (batch_size) training.batch_size = *batch_size;
    if (learning_rate) training.learning_rate = *learning_rate;
    if (!lambdas.empty()) training.lambdas = parse_lambdas(lambdas);
    if (!precision.empty()) training.precision = *train::parse_precision(precision);
    try {
      model.validate();
      training.validate();
    } catch (const ContractError& e) {
      throw UsageError(std::string("configuration: ") + e.what());
    }
    manifest.set_seed(training.seed);
  }
};

std::string task_mode(const train::Lambdas& l) {
  const auto w = l.as_array();
  const char* names[] = {"quadrant", "valence", "arousal"};
  int active = 0, last = 0;
  for (int i = 0; i < 3; ++i) {
    if (w[i] != 0.0) {
      ++active;
      last = i;
    }
  }
  return active == 1 ? std::string("single-task:") + names[last] : "multi-task";
}

std::filesystem::path sibling(const std::filesystem::path& path, const char* suffix) {
  std::filesystem::path p = path;
  p += suffix;
  return p;
}

// ---- train ----

struct TrainOptions {
  ModelFlags flags;
  std::string corpus, validation, out;
  std::optional<std::size_t> patience;
};

void run_train(const TrainOptions& o, Io& io) {
  require_file(o.corpus, "corpus");
  RunManifest manifest("train", io.args);
  ModelConfig model_cfg;
  train::TrainingConfig training;
  o.flags.resolve(model_cfg, training, manifest);
  if (o.patience) training.patience = *o.patience;

  auto data = corpus::load_corpus(o.corpus, corpus::VocabPolicy::build);
  manifest.add_input(o.corpus);
  model_cfg.encoder.vocab_size = data.vocab.size();

  std::optional<corpus::Corpus> validation;
  if (!o.validation.empty()) {
    require_file(o.validation, "validation corpus");
    validation = corpus::load_corpus(o.validation, corpus::VocabPolicy::frozen, &data.vocab);
    manifest.add_input(o.validation);
  } else if (training.patience) {
    throw UsageError("--patience requires --validation");
  }

  io.err << "training on " << data.documents.size() << " documents, vocabulary " << data.vocab.size() << ", "
         << training.epochs << " epochs (" << task_mode(training.lambdas) << ")\n";
  const auto t0 = std::chrono::steady_clock::now();
  auto result = train::train(train::initial_model(model_cfg, training.seed), data.documents, training,
                             validation ? &validation->documents : nullptr, [&](const train::EpochLog& e) {
                               const double secs =
                                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                               char line[160];
                               std::snprintf(line, sizeof line, "epoch %zu  loss %.6f  (%.1fs)", e.epoch, e.loss,
                                             secs);
                               io.err << line;
                               if (e.train_metrics) {
                                 std::snprintf(line, sizeof line, "  train acc %.3f/%.3f/%.3f",
                                               e.train_metrics->accuracy[0], e.train_metrics->accuracy[1],
                                               e.train_metrics->accuracy[2]);
                                 io.err << line;
                               }
                               io.err << "\n";
                             });

  const std::filesystem::path out = o.out;
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  train::save_checkpoint({result.model, data.vocab, training}, out);
  std::string log;
  for (const auto& e : result.log) log += train::to_jsonl(e) + "\n";
  const auto log_path = sibling(out, ".log.jsonl");
  write_text(log_path, log);

  manifest.set_config(train::config_entries(model_cfg, training));
  manifest.add_config("task_mode", task_mode(training.lambdas));
  manifest.add_config("epochs_run", std::to_string(result.epochs_run));
  manifest.add_output(out);
  manifest.add_output(log_path);
  manifest.write_beside(out);
  io.err << "wrote " << out.string() << " (" << result.model.parameter_count() << " parameters)\n";
}

// ---- evaluate ----

struct EvaluateOptions {
  std::string checkpoint, corpus, out, predictions;
};

void run_evaluate(const EvaluateOptions& o, Io& io) {
  require_file(o.checkpoint, "checkpoint");
  require_file(o.corpus, "corpus");
  RunManifest manifest("evaluate", io.args);
  auto ckpt = train::load_checkpoint(std::filesystem::path(o.checkpoint));
  auto data = corpus::load_corpus(o.corpus, corpus::VocabPolicy::frozen, &ckpt.vocab);
  manifest.add_input(o.checkpoint);
  manifest.add_input(o.corpus);
  manifest.set_config(train::config_entries(ckpt.model.config(), ckpt.training));

  const auto run = eval::evaluate(ckpt.model, ckpt.vocab, data.documents);
  const std::filesystem::path out = o.out;
  write_text(out, eval::to_json(run.report) + "\n");
  manifest.add_output(out);
  if (!o.predictions.empty()) {
    std::string lines;
    for (const auto& p : run.predictions) lines += eval::to_jsonl(p) + "\n";
    write_text(o.predictions, lines);
    manifest.add_output(o.predictions);
  }
  manifest.write_beside(out);

  for (const auto& t : run.report.tasks) {
    char line[160];
    std::snprintf(line, sizeof line, "%-9s accuracy %.4f  macro-F1 %.4f\n", t.task.c_str(), t.accuracy, t.macro_f1);
    io.err << line;
  }
}

// ---- predict ----

struct PredictOptions {
  std::string checkpoint, text, file, corpus, out;
  bool has_text = false;
};

void run_predict(const PredictOptions& o, Io& io) {
  require_file(o.checkpoint, "checkpoint");
  const auto ckpt = train::load_checkpoint(std::filesystem::path(o.checkpoint));

  std::vector<corpus::LyricsDocument> docs;
  if (!o.corpus.empty()) {
    require_file(o.corpus, "corpus");
    docs = corpus::load_corpus(o.corpus, corpus::VocabPolicy::frozen, &ckpt.vocab).documents;
  } else {
    corpus::LyricsDocument doc;
    if (!o.file.empty()) {
      require_file(o.file, "lyrics file");
      doc.id = std::filesystem::path(o.file).filename().string();
      doc.lyrics = read_text(o.file);
    } else {
      doc.id = "text";
      doc.lyrics = o.text;
    }
    doc.tokens = corpus::tokenize(doc.lyrics, ckpt.vocab);
    docs.push_back(std::move(doc));
  }

  std::string lines;
  for (const auto& doc : docs) {
    const auto rec = eval::predict_document(ckpt.model, doc);
    if (rec.degenerate) io.err << "warning: " << doc.id << " has no tokens; predicting from a pad-only sequence\n";
    lines += eval::to_jsonl(rec) + "\n";
  }
  if (o.out.empty()) {
    io.out << lines;
    return;
  }
  RunManifest manifest("predict", io.args);
  manifest.add_input(o.checkpoint);
  if (!o.file.empty()) manifest.add_input(o.file);
  if (!o.corpus.empty()) manifest.add_input(o.corpus);
  write_text(o.out, lines);
  manifest.add_output(o.out);
  manifest.write_beside(o.out);
}

// ---- ablate ----

struct AblateOptions {
  ModelFlags flags;
  std::string corpus, out, seeds = "0,1,2";
  double test_ratio = 0.2;
};

void run_ablate(const AblateOptions& o, Io& io) {
  require_file(o.corpus, "corpus");
  RunManifest manifest("ablate", io.args);
  train::ExperimentConfig cfg;
  o.flags.resolve(cfg.model, cfg.training, manifest);
  cfg.test_ratio = o.test_ratio;
  cfg.split_seeds.clear();
  {
    std::stringstream in(o.seeds);
    std::string part;
    while (std::getline(in, part, ',')) {
      try {
        std::size_t used = 0;
        cfg.split_seeds.push_back(std::stoull(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw UsageError("--seeds: '" + part + "' is not a non-negative integer");
      }
    }
  }
  try {
    cfg.validate();
  } catch (const ContractError& e) {
    throw UsageError(std::string("ablate: ") + e.what());
  }

  std::ifstream in(o.corpus, std::ios::binary);
  const auto docs = corpus::parse_documents(in, o.corpus);
  manifest.add_input(o.corpus);
  io.err << "ablation: 4 arms x " << cfg.split_seeds.size() << " splits, " << cfg.training.epochs
         << " epochs each\n";
  const auto table = train::run_ablation(docs, cfg);

  const std::filesystem::path out = o.out;
  const std::string markdown = train::to_markdown(table);
  write_text(out, markdown);
  const auto json_path = sibling(out, ".json");
  write_text(json_path, train::to_json(table) + "\n");

  manifest.set_config(train::config_entries(cfg.model, cfg.training));
  manifest.add_config("ablate.test_ratio", train::format_real(cfg.test_ratio));
  manifest.add_config("ablate.split_seeds", o.seeds);
  manifest.add_output(out);
  manifest.add_output(json_path);
  manifest.write_beside(out);
  io.err << markdown;
}

// ---- gradcheck ----

struct GradcheckOptions {
  std::uint64_t seed = 0;
  double tolerance = 1e-4;
  std::string corrupt_op, out;
};

void run_gradcheck(const GradcheckOptions& o, Io& io) {
  auto cases = train::all_grad_cases(o.seed);
  if (!o.corrupt_op.empty()) {
    bool found = false;
    for (auto& c : cases) {
      if (c.name == o.corrupt_op) {
        c = ad::with_corrupted_backward(std::move(c));
        found = true;
      }
    }
    if (!found) throw UsageError("--corrupt-op: no case named '" + o.corrupt_op + "'");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const auto outcomes = ad::run_grad_checks(cases, o.tolerance);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::string table = "case\tmax_rel_error\tresult\n";
  std::vector<std::string> failed;
  for (const auto& r : outcomes) {
    char line[160];
    std::snprintf(line, sizeof line, "%s\t%.3e\t%s\n", r.name.c_str(), r.max_rel_error, r.passed ? "PASS" : "FAIL");
    table += line;
    if (!r.passed) failed.push_back(r.name);
  }
  if (o.out.empty()) {
    io.out << table;
  } else {
    RunManifest manifest("gradcheck", io.args);
    manifest.set_seed(o.seed);
    manifest.add_config("tolerance", train::format_real(o.tolerance));
    write_text(o.out, table);
    manifest.add_output(o.out);
    manifest.write_beside(o.out);
  }

  char summary[128];
  std::snprintf(summary, sizeof summary, "%zu cases, %zu failed, %.1fs\n", outcomes.size(), failed.size(), secs);
  io.err << summary;
  if (!failed.empty()) {
    std::string names;
    for (const auto& n : failed) names += (names.empty() ? "" : ", ") + n;
    throw CommandFailed(kGradcheckFailed, "gradient check failed for: " + names);
  }
}

}  // namespace

void setup_train(CLI::App& app, Action& action) {
  auto o = std::make_shared<TrainOptions>();
  auto* sub = app.add_subcommand("train", "Train the multi-task model on a labeled corpus");
  sub->add_option("--corpus", o->corpus, "Labeled corpus JSONL")->required();
  sub->add_option("--out", o->out, "Checkpoint path")->capture_default_str();
  o->out = "model.ckpt";
  sub->add_option("--validation", o->validation, "Validation corpus for patience");
  sub->add_option("--patience", o->patience, "Stop after this many epochs without improvement");
  o->flags.add_to(*sub);
  sub->callback([o, &action] { action = [o](Io& io) { run_train(*o, io); }; });
}

void setup_evaluate(CLI::App& app, Action& action) {
  auto o = std::make_shared<EvaluateOptions>();
  auto* sub = app.add_subcommand("evaluate", "Per-task metrics of a checkpoint on a labeled corpus");
  sub->add_option("--checkpoint", o->checkpoint)->required();
  sub->add_option("--corpus", o->corpus)->required();
  sub->add_option("--out", o->out, "Report JSON")->required();
  sub->add_option("--predictions", o->predictions, "Also write per-document predictions JSONL");
  sub->callback([o, &action] { action = [o](Io& io) { run_evaluate(*o, io); }; });
}

void setup_predict(CLI::App& app, Action& action) {
  auto o = std::make_shared<PredictOptions>();
  auto* sub = app.add_subcommand("predict", "Predict quadrant and hemispheres for lyrics");
  sub->add_option("--checkpoint", o->checkpoint)->required();
  auto* text = sub->add_option("--text", o->text, "Lyrics text");
  auto* file = sub->add_option("--file", o->file, "Lyrics text file");
  auto* corp = sub->add_option("--corpus", o->corpus, "Corpus JSONL, one record per document");
  text->excludes(file)->excludes(corp);
  file->excludes(corp);
  sub->add_option("--out", o->out, "Write records here instead of standard output");
  sub->callback([o, text, file, corp, &action] {
    if (text->count() + file->count() + corp->count() == 0) {
      throw CLI::RequiredError("--text, --file or --corpus");
    }
    action = [o](Io& io) { run_predict(*o, io); };
  });
}

void setup_ablate(CLI::App& app, Action& action) {
  auto o = std::make_shared<AblateOptions>();
  auto* sub = app.add_subcommand("ablate", "Multi-task versus single-task comparison table");
  sub->add_option("--corpus", o->corpus, "Labeled corpus JSONL")->required();
  sub->add_option("--out", o->out, "Markdown table (JSON written beside it)")->required();
  sub->add_option("--seeds", o->seeds, "Split seeds")->capture_default_str();
  sub->add_option("--test-ratio", o->test_ratio)->capture_default_str();
  o->flags.add_to(*sub);
  sub->callback([o, &action] { action = [o](Io& io) { run_ablate(*o, io); }; });
}

void setup_gradcheck(CLI::App& app, Action& action) {
  auto o = std::make_shared<GradcheckOptions>();
  auto* sub = app.add_subcommand("gradcheck", "Finite-difference check of every primitive and the model loss");
  sub->add_option("--seed", o->seed)->capture_default_str();
  sub->add_option("--tolerance", o->tolerance, "Maximum relative error")->capture_default_str();
  sub->add_option("--corrupt-op", o->corrupt_op, "Break the backward rule of one case (negative test)");
  sub->add_option("--out", o->out, "Write the table here instead of standard output");
  sub->callback([o, &action] { action = [o](Io& io) { run_gradcheck(*o, io); }; });
}

}  // namespace lyrnet::cli
