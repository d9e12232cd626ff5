// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lyrnet/corpus/corpus.hpp"
#include "lyrnet/eval/report.hpp"
#include "lyrnet/model.hpp"
#include "lyrnet/train/trainer.hpp"

namespace lyrnet::train {

/// Fresh model for `config` drawn from a stream derived from `seed`.
EmotionModel initial_model(const ModelConfig& config, std::uint64_t seed);

/// Builds a frozen vocabulary on `train_docs`, encodes both sides, fits the
/// embedding table to that vocabulary, trains with `training` (model
/// initialized from training.seed) and evaluates on `test_docs`.
eval::EvaluationReport train_and_evaluate(std::vector<corpus::LyricsDocument> train_docs,
                                          std::vector<corpus::LyricsDocument> test_docs, ModelConfig model,
                                          const TrainingConfig& training);

struct ExperimentConfig {
  ModelConfig model;
  TrainingConfig training;
  double test_ratio = 0.2;
  std::vector<std::uint64_t> split_seeds{0, 1, 2};

  void validate() const;
};

/// One stratified train/test split per seed, each trained from scratch
/// (training seed offset by the split seed); reports in seed order.
std::vector<eval::EvaluationReport> multi_split_reports(const std::vector<corpus::LyricsDocument>& documents,
                                                        const ExperimentConfig& config);

struct AblationRow {
  std::string task;
  double multi_accuracy = 0.0;
  double single_accuracy = 0.0;
  double multi_macro_f1 = 0.0;
  double single_macro_f1 = 0.0;
};

struct AblationTable {
  std::vector<AblationRow> rows;  // quadrant, valence, arousal
  std::size_t n_splits = 0;
  Lambdas multi_lambdas;
};

/// Multi-task arm with config.training.lambdas against three single-task
/// arms (one lambda set to 1, the others 0), each averaged over the splits.
AblationTable run_ablation(const std::vector<corpus::LyricsDocument>& documents, const ExperimentConfig& config);

/// Classification | Accuracy (Multi-Task, Single-Task) | F1 (Multi-Task,
/// Single-Task), percentages with two decimals.
std::string to_markdown(const AblationTable& table);
std::string to_json(const AblationTable& table);

}  // namespace lyrnet::train
