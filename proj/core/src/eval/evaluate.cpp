// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/eval/evaluate.hpp"

#include <algorithm>

#include "json.hpp"
#include "lyrnet/error.hpp"
#include "lyrnet/tokens.hpp"

namespace lyrnet::eval {

using corpus::Arousal;
using corpus::Quadrant;
using corpus::Valence;
using json = nlohmann::ordered_json;

bool PredictionRecord::agreement() const {
  const auto implied = corpus::quadrant_of(static_cast<Valence>(predicted.valence),
                                           static_cast<Arousal>(predicted.arousal));
  return static_cast<std::size_t>(implied) == predicted.quadrant;
}

std::vector<std::size_t> model_input(const EmotionModel& model,
                                      const std::vector<std::size_t>& tokens) {
  if (tokens.empty()) return {kPadId};
  const std::size_t n = std::min(tokens.size(), model.config().encoder.max_seq_len);
  return {tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(n)};
}

PredictionRecord predict_document(const EmotionModel& model, const corpus::LyricsDocument& doc) {
  ad::Rng unused(0);
  const auto input = model_input(model, doc.tokens);
  const auto logits = model.forward(input, ad::Mode::eval, unused);
  PredictionRecord rec;
  rec.id = doc.id;
  rec.gold = doc.label;
  rec.predicted = heads::predict(logits);
  for (auto task : heads::kTasks) {
    const auto d = logits.of(task).data();
    rec.logits[static_cast<std::size_t>(task)].assign(d.begin(), d.end());
  }
  rec.degenerate = doc.tokens.empty();
  return rec;
}

EvaluationRun evaluate(const EmotionModel& model, const corpus::Vocabulary& vocab,
                       const std::vector<corpus::LyricsDocument>& documents) {
  if (documents.empty()) throw ContractError("evaluate: empty split");
  const std::size_t model_vocab = model.config().encoder.vocab_size;
  if (vocab.size() != model_vocab) {
    throw DataError("vocabulary mismatch: corpus vocabulary has " + std::to_string(vocab.size()) +
                    " entries but the model expects " + std::to_string(model_vocab) +
                    "; load the split with the checkpoint vocabulary (unknown-token policy: "
                    "out-of-vocabulary words map to id 1)");
  }
  std::size_t known = 0, total_tokens = 0;
  for (const auto& doc : documents) {
    if (!doc.label) throw DataError("evaluate: document '" + doc.id + "' has no label");
    for (auto t : doc.tokens) {
      if (t >= model_vocab) {
        throw DataError("vocabulary mismatch: document '" + doc.id + "' has token id " +
                        std::to_string(t) + " outside the model vocabulary");
      }
      known += t != kUnknownId ? 1 : 0;
    }
    total_tokens += doc.tokens.size();
  }
  if (total_tokens > 0 && known == 0) {
    throw DataError("vocabulary mismatch: every token of the split mapped to the unknown id under "
                    "the unknown-token policy (out-of-vocabulary words map to id 1)");
  }

  EvaluationRun run;
  std::array<ConfusionMatrix, 3> confusion{ConfusionMatrix(4), ConfusionMatrix(2), ConfusionMatrix(2)};
  std::size_t agree = 0;
  for (const auto& doc : documents) {
    auto rec = predict_document(model, doc);
    const std::array<std::size_t, 3> gold{static_cast<std::size_t>(doc.label->quadrant()),
                                          static_cast<std::size_t>(doc.label->valence()),
                                          static_cast<std::size_t>(doc.label->arousal())};
    for (auto task : heads::kTasks) {
      const auto t = static_cast<std::size_t>(task);
      confusion[t].add(gold[t], rec.predicted.of(task));
    }
    agree += rec.agreement() ? 1 : 0;
    run.predictions.push_back(std::move(rec));
  }
  auto& report = run.report;
  report.n_examples = documents.size();
  report.tasks.push_back(make_task_report("quadrant", {"Q1", "Q2", "Q3", "Q4"}, confusion[0]));
  report.tasks.push_back(make_task_report("valence", {"positive", "negative"}, confusion[1]));
  report.tasks.push_back(make_task_report("arousal", {"high", "low"}, confusion[2]));
  report.agreement_rate = static_cast<double>(agree) / static_cast<double>(documents.size());
  return run;
}

std::string to_jsonl(const PredictionRecord& r) {
  json j;
  j["id"] = r.id;
  if (r.gold) {
    j["gold"] = {{"quadrant", corpus::to_string(r.gold->quadrant())},
                 {"valence", corpus::to_string(r.gold->valence())},
                 {"arousal", corpus::to_string(r.gold->arousal())}};
  } else {
    j["gold"] = nullptr;
  }
  j["predicted"] = {
      {"quadrant", corpus::to_string(static_cast<Quadrant>(r.predicted.quadrant))},
      {"valence", corpus::to_string(static_cast<Valence>(r.predicted.valence))},
      {"arousal", corpus::to_string(static_cast<Arousal>(r.predicted.arousal))}};
  j["logits"] = {{"quadrant", r.logits[0]}, {"valence", r.logits[1]}, {"arousal", r.logits[2]}};
  j["agreement"] = r.agreement();
  j["degenerate"] = r.degenerate;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace lyrnet::eval
