// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lyrnet/corpus/corpus.hpp"
#include "lyrnet/model.hpp"
#include "lyrnet/train/adamw.hpp"
#include "lyrnet/train/loss.hpp"

namespace lyrnet::train {

enum class Precision { f64, f32 };

std::string_view to_string(Precision p);
std::optional<Precision> parse_precision(std::string_view text);

struct TrainingConfig {
  double learning_rate = 2e-5;
  std::size_t batch_size = 8;
  Lambdas lambdas;
  std::size_t epochs = 1;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  std::optional<double> grad_clip;
  /// f32 rounds every parameter to single precision after each update, so
  /// a 32-bit checkpoint reproduces the trained model exactly. Arithmetic
  /// itself stays 64-bit.
  Precision precision = Precision::f64;
  /// Evaluate train-set accuracy and macro-F1 after every epoch.
  bool log_train_metrics = true;
  /// Stop after this many epochs without validation quadrant macro-F1
  /// improvement (requires a validation split).
  std::optional<std::size_t> patience;

  /// Learning rate 1e-3 instead of 2e-5, for from-scratch desk-scale runs.
  static TrainingConfig desk_preset();
  /// Learning rate 1e-2 with adam_eps 1e-2 and grad_clip 1.0. Once gradients
  /// shrink below eps the update scales with the gradient instead of staying
  /// at full step size, and the clip caps the early steps, so a fitted head
  /// does not saturate the shared bottleneck before the other hemisphere is
  /// learned. Default of the command line.
  static TrainingConfig scratch_preset();

  AdamWConfig adamw() const { return {learning_rate, weight_decay, beta1, beta2, adam_eps}; }
  void validate() const;
};

struct TaskMetrics {
  std::array<double, 3> accuracy{};
  std::array<double, 3> macro_f1{};
};

struct EpochLog {
  std::size_t epoch = 0;  // 0 = before any update (eval-mode loss)
  double loss = 0.0;
  std::array<double, 3> task_loss{};  // quadrant, valence, arousal
  std::optional<TaskMetrics> train_metrics;
  std::optional<double> validation_quadrant_macro_f1;
};

std::string to_jsonl(const EpochLog& entry);

struct TrainResult {
  EmotionModel model;
  std::vector<EpochLog> log;
  OptimizerState optimizer;
  std::size_t epochs_run = 0;
};

/// Names of parameters excluded from optimization: the private head of every
/// task whose weight is zero. They keep their initial values bit-exactly.
std::vector<std::string> frozen_parameters(const EmotionModel& model, const Lambdas& lambdas);

/// Mean per-task cross-entropy (and weighted total) over `documents` in eval
/// mode, computed batch by batch like training.
EpochLog evaluate_loss(const EmotionModel& model, const std::vector<corpus::LyricsDocument>& documents,
                       const TrainingConfig& config);

using EpochCallback = std::function<void(const EpochLog&)>;

/// Trains `model` on labeled, encoded `documents`.
///
/// Each epoch visits a seeded shuffle of the corpus in batches of
/// batch_size: forward every document, per-task cross-entropy over the
/// batch, weighted multi-task loss, backward, AdamW step. Log entry 0 holds
/// the untrained eval-mode loss. Throws ContractError on an empty corpus and
/// DivergenceError (with epoch and batch) on a non-finite loss.
TrainResult train(EmotionModel model, const std::vector<corpus::LyricsDocument>& documents,
                  const TrainingConfig& config,
                  const std::vector<corpus::LyricsDocument>* validation = nullptr,
                  const EpochCallback& on_epoch = {});

}  // namespace lyrnet::train
