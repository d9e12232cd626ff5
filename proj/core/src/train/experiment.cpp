// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/train/experiment.hpp"

#include <cstdio>

#include "json.hpp"
#include "lyrnet/corpus/split.hpp"
#include "lyrnet/error.hpp"
#include "lyrnet/eval/evaluate.hpp"

namespace lyrnet::train {

EmotionModel initial_model(const ModelConfig& config, std::uint64_t seed) {
  ad::Rng rng(seed, 0x696e6974);  // "init"
  return EmotionModel(config, rng);
}

eval::EvaluationReport train_and_evaluate(std::vector<corpus::LyricsDocument> train_docs,
                                          std::vector<corpus::LyricsDocument> test_docs, ModelConfig model,
                                          const TrainingConfig& training) {
  const auto vocab = corpus::build_vocabulary(train_docs);
  corpus::encode_documents(train_docs, vocab);
  corpus::encode_documents(test_docs, vocab);
  model.encoder.vocab_size = vocab.size();
  auto result = train(initial_model(model, training.seed), train_docs, training);
  return eval::evaluate(result.model, vocab, test_docs).report;
}

void ExperimentConfig::validate() const {
  if (!(test_ratio > 0.0 && test_ratio < 1.0)) throw InvalidParameterError("experiment: test_ratio must be in (0,1)");
  if (split_seeds.empty()) throw InvalidParameterError("experiment: at least one split seed is required");
  model.validate();
  training.validate();
}

std::vector<eval::EvaluationReport> multi_split_reports(const std::vector<corpus::LyricsDocument>& documents,
                                                        const ExperimentConfig& config) {
  config.validate();
  std::vector<eval::EvaluationReport> reports;
  for (const auto seed : config.split_seeds) {
    auto splits = corpus::split_corpus(documents, {{"train", 1.0 - config.test_ratio}, {"test", config.test_ratio}}, seed);
    auto training = config.training;
    training.seed = config.training.seed + seed;
    reports.push_back(train_and_evaluate(std::move(splits[0].documents), std::move(splits[1].documents), config.model,
                                         training));
  }
  return reports;
}

AblationTable run_ablation(const std::vector<corpus::LyricsDocument>& documents, const ExperimentConfig& config) {
  AblationTable table;
  table.n_splits = config.split_seeds.size();
  table.multi_lambdas = config.training.lambdas;
  const auto multi = eval::multi_split_average(multi_split_reports(documents, config));
  for (auto task : heads::kTasks) {
    auto single_cfg = config;
    std::array<double, 3> l{0.0, 0.0, 0.0};
    l[static_cast<std::size_t>(task)] = 1.0;
    single_cfg.training.lambdas = {l[0], l[1], l[2]};
    const auto single = eval::multi_split_average(multi_split_reports(documents, single_cfg));
    const std::string name(heads::task_name(task));
    table.rows.push_back({name, multi.get(name, "accuracy").mean, single.get(name, "accuracy").mean,
                          multi.get(name, "macro_f1").mean, single.get(name, "macro_f1").mean});
  }
  return table;
}

std::string to_markdown(const AblationTable& t) {
  auto pct = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
    return std::string(buf);
  };
  std::string out;
  out += "| Classification | Accuracy (Multi-Task) | Accuracy (Single-Task) | F1-score (Multi-Task) | F1-score (Single-Task) |\n";
  out += "|---|---|---|---|---|\n";
  for (const auto& r : t.rows) {
    std::string name = r.task;
    if (!name.empty()) name[0] = static_cast<char>(name[0] - 'a' + 'A');
    out += "| " + name + " | " + pct(r.multi_accuracy) + " | " + pct(r.single_accuracy) + " | " +
           pct(r.multi_macro_f1) + " | " + pct(r.single_macro_f1) + " |\n";
  }
  return out;
}

std::string to_json(const AblationTable& t) {
  nlohmann::ordered_json j;
  j["n_splits"] = t.n_splits;
  j["multi_lambdas"] = {t.multi_lambdas.quadrant, t.multi_lambdas.valence, t.multi_lambdas.arousal};
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    j["rows"].push_back({{"task", r.task},
                         {"multi_accuracy", r.multi_accuracy},
                         {"single_accuracy", r.single_accuracy},
                         {"multi_macro_f1", r.multi_macro_f1},
                         {"single_macro_f1", r.single_macro_f1}});
  }
  return j.dump(2);
}

}  // namespace lyrnet::train
