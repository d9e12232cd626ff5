// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "lyrnet/corpus/corpus.hpp"
#include "lyrnet/eval/report.hpp"
#include "lyrnet/heads/heads.hpp"
#include "lyrnet/model.hpp"

namespace lyrnet::eval {

struct PredictionRecord {
  std::string id;
  std::optional<corpus::EmotionLabel> gold;
  heads::Prediction predicted;
  std::array<std::vector<double>, 3> logits;  // quadrant, valence, arousal
  bool degenerate = false;                     // empty input, ran on a pad-only sequence

  /// Predicted quadrant agrees with the predicted hemispheres.
  bool agreement() const;
};

/// Model input for encoded tokens: truncated to max_seq_len, and a single
/// pad token when empty.
std::vector<std::size_t> model_input(const EmotionModel& model, const std::vector<std::size_t>& tokens);

/// Eval-mode inference on one encoded document.
PredictionRecord predict_document(const EmotionModel& model, const corpus::LyricsDocument& doc);

struct EvaluationRun {
  EvaluationReport report;
  std::vector<PredictionRecord> predictions;
};

/// Runs eval-mode inference over labeled, encoded documents and builds the
/// per-task confusion matrices. `vocab` must be the vocabulary the documents
/// were encoded with; it must match the model's vocabulary size.
/// Throws DataError on vocabulary mismatch or unlabeled documents.
EvaluationRun evaluate(const EmotionModel& model, const corpus::Vocabulary& vocab,
                       const std::vector<corpus::LyricsDocument>& documents);

/// One JSONL line: id, gold labels, predicted labels, logits, flags.
std::string to_jsonl(const PredictionRecord& record);

}  // namespace lyrnet::eval
