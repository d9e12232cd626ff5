// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "json.hpp"
#include "lyrnet/ad/ops.hpp"
#include "lyrnet/error.hpp"
#include "lyrnet/eval/evaluate.hpp"
#include "lyrnet/eval/metrics.hpp"

namespace lyrnet::train {

using corpus::LyricsDocument;

std::string_view to_string(Precision p) { return p == Precision::f32 ? "f32" : "f64"; }

std::optional<Precision> parse_precision(std::string_view text) {
  if (text == "f64") return Precision::f64;
  if (text == "f32") return Precision::f32;
  return std::nullopt;
}

TrainingConfig TrainingConfig::desk_preset() {
  TrainingConfig c;
  c.learning_rate = 1e-3;
  return c;
}

TrainingConfig TrainingConfig::scratch_preset() {
  TrainingConfig c;
  c.learning_rate = 1e-2;
  c.adam_eps = 1e-2;
  c.grad_clip = 1.0;
  return c;
}

void TrainingConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ContractError("TrainingConfig: learning_rate must be positive");
  }
  if (batch_size == 0) throw ContractError("TrainingConfig: batch_size must be positive");
  if (epochs == 0) throw ContractError("TrainingConfig: epochs must be positive");
  if (!(weight_decay >= 0.0)) throw ContractError("TrainingConfig: weight_decay must be nonnegative");
  if (grad_clip && !(*grad_clip > 0.0)) throw ContractError("TrainingConfig: grad_clip must be positive");
  lambdas.validate();
}

std::string to_jsonl(const EpochLog& e) {
  nlohmann::ordered_json j;
  j["epoch"] = e.epoch;
  j["loss"] = e.loss;
  j["loss_quadrant"] = e.task_loss[0];
  j["loss_valence"] = e.task_loss[1];
  j["loss_arousal"] = e.task_loss[2];
  if (e.train_metrics) {
    j["train_accuracy"] = e.train_metrics->accuracy;
    j["train_macro_f1"] = e.train_metrics->macro_f1;
  }
  if (e.validation_quadrant_macro_f1) j["valid_quadrant_macro_f1"] = *e.validation_quadrant_macro_f1;
  return j.dump();
}

std::vector<std::string> frozen_parameters(const EmotionModel& model, const Lambdas& lambdas) {
  std::vector<std::string> out;
  const auto weights = lambdas.as_array();
  for (const auto& p : model.parameters()) {
    for (auto task : heads::kTasks) {
      if (weights[static_cast<std::size_t>(task)] == 0.0 &&
          p.name.starts_with(heads::task_parameter_prefix(task))) {
        out.push_back(p.name);
      }
    }
  }
  return out;
}

namespace {

struct BatchLoss {
  ad::Tensor total;
  std::array<ad::Tensor, 3> task;
};

BatchLoss batch_loss(const EmotionModel& model, const std::vector<const LyricsDocument*>& batch,
                     const Lambdas& lambdas, ad::Mode mode, ad::Rng& rng) {
  std::array<std::vector<ad::Tensor>, 3> rows;
  std::array<std::vector<std::size_t>, 3> targets;
  for (const auto* doc : batch) {
    if (!doc->label) throw DataError("train: document '" + doc->id + "' has no label");
    const auto input = eval::model_input(model, doc->tokens);
    const auto logits = model.forward(input, mode, rng);
    const std::array<std::size_t, 3> gold{static_cast<std::size_t>(doc->label->quadrant()),
                                          static_cast<std::size_t>(doc->label->valence()),
                                          static_cast<std::size_t>(doc->label->arousal())};
    for (auto task : heads::kTasks) {
      const auto t = static_cast<std::size_t>(task);
      const auto& l = logits.of(task);
      rows[t].push_back(ad::reshape(l, {1, l.dim(0)}));
      targets[t].push_back(gold[t]);
    }
  }
  BatchLoss out;
  for (std::size_t t = 0; t < 3; ++t) {
    const ad::Tensor stacked = rows[t].size() == 1 ? rows[t].front() : ad::concat(rows[t], 0);
    out.task[t] = ad::cross_entropy(stacked, targets[t]);
  }
  out.total = multi_task_loss(out.task[0], out.task[1], out.task[2], lambdas);
  return out;
}

TaskMetrics metrics_on(const EmotionModel& model, const std::vector<LyricsDocument>& docs) {
  std::array<eval::ConfusionMatrix, 3> cm{eval::ConfusionMatrix(4), eval::ConfusionMatrix(2),
                                          eval::ConfusionMatrix(2)};
  for (const auto& doc : docs) {
    const auto rec = eval::predict_document(model, doc);
    cm[0].add(static_cast<std::size_t>(doc.label->quadrant()), rec.predicted.quadrant);
    cm[1].add(static_cast<std::size_t>(doc.label->valence()), rec.predicted.valence);
    cm[2].add(static_cast<std::size_t>(doc.label->arousal()), rec.predicted.arousal);
  }
  TaskMetrics m;
  for (std::size_t t = 0; t < 3; ++t) {
    m.accuracy[t] = eval::accuracy(cm[t]);
    m.macro_f1[t] = eval::macro_f1(cm[t]);
  }
  return m;
}

void round_to_f32(const ParameterList& params) {
  for (const auto& p : params) {
    ad::Tensor t = p.tensor;
    for (auto& v : t.mutable_data()) v = static_cast<double>(static_cast<float>(v));
  }
}

void clip_gradients(const ParameterList& params, double max_norm) {
  double sq = 0.0;
  for (const auto& p : params) {
    if (!p.tensor.has_grad()) continue;
    for (double g : p.tensor.grad()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (norm <= max_norm) return;
  const double factor = max_norm / norm;
  for (const auto& p : params) {
    ad::Tensor t = p.tensor;
    if (!t.has_grad()) continue;
    for (auto& g : t.mutable_grad()) g *= factor;
  }
}

std::vector<std::vector<const LyricsDocument*>> batches_of(const std::vector<const LyricsDocument*>& order,
                                                           std::size_t batch_size) {
  std::vector<std::vector<const LyricsDocument*>> out;
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    const auto end = std::min(order.size(), i + batch_size);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                     order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

}  // namespace

EpochLog evaluate_loss(const EmotionModel& model, const std::vector<LyricsDocument>& documents,
                       const TrainingConfig& config) {
  if (documents.empty()) throw ContractError("evaluate_loss: empty corpus");
  std::vector<const LyricsDocument*> order;
  for (const auto& d : documents) order.push_back(&d);
  ad::Rng unused(0);
  EpochLog entry;
  for (const auto& batch : batches_of(order, config.batch_size)) {
    const auto loss = batch_loss(model, batch, config.lambdas, ad::Mode::eval, unused);
    const double w = static_cast<double>(batch.size());
    entry.loss += w * loss.total.item();
    for (std::size_t t = 0; t < 3; ++t) entry.task_loss[t] += w * loss.task[t].item();
  }
  const auto n = static_cast<double>(documents.size());
  entry.loss /= n;
  for (auto& l : entry.task_loss) l /= n;
  return entry;
}

TrainResult train(EmotionModel model, const std::vector<LyricsDocument>& documents,
                  const TrainingConfig& config, const std::vector<LyricsDocument>* validation,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (documents.empty()) throw ContractError("train: empty corpus");
  if (config.patience && (validation == nullptr || validation->empty())) {
    throw ContractError("train: patience-based stopping needs a validation split");
  }

  const auto all_params = model.parameters();
  const auto frozen_names = frozen_parameters(model, config.lambdas);
  const std::unordered_set<std::string> frozen(frozen_names.begin(), frozen_names.end());
  ParameterList trainable;
  for (const auto& p : all_params) {
    if (!frozen.contains(p.name)) trainable.push_back(p);
  }
  if (config.precision == Precision::f32) round_to_f32(all_params);

  const ad::Rng root(config.seed, 0x747261696e);  // "train"
  TrainResult result{model, {}, OptimizerState::for_parameters(trainable), 0};

  auto emit = [&](EpochLog entry) {
    if (config.log_train_metrics) entry.train_metrics = metrics_on(model, documents);
    if (validation != nullptr && !validation->empty()) {
      entry.validation_quadrant_macro_f1 = metrics_on(model, *validation).macro_f1[0];
    }
    if (on_epoch) on_epoch(entry);
    result.log.push_back(std::move(entry));
  };

  emit(evaluate_loss(model, documents, config));

  std::vector<const LyricsDocument*> order;
  for (const auto& d : documents) order.push_back(&d);
  double best_valid = -1.0;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    ad::Rng shuffle_rng = root.split(2 * epoch);
    ad::Rng dropout_rng = root.split(2 * epoch + 1);
    shuffle_rng.shuffle(order);

    EpochLog entry;
    entry.epoch = epoch;
    const auto batches = batches_of(order, config.batch_size);
    for (std::size_t b = 0; b < batches.size(); ++b) {
      for (const auto& p : all_params) {
        ad::Tensor t = p.tensor;
        t.zero_grad();
      }
      const auto loss = batch_loss(model, batches[b], config.lambdas, ad::Mode::train, dropout_rng);
      const double value = loss.total.item();
      if (!std::isfinite(value)) {
        throw DivergenceError("training diverged: non-finite loss at epoch " + std::to_string(epoch) +
                              ", batch " + std::to_string(b));
      }
      loss.total.backward();
      if (config.grad_clip) clip_gradients(trainable, *config.grad_clip);
      try {
        adamw_step(trainable, result.optimizer, config.adamw());
      } catch (const DivergenceError& e) {
        throw DivergenceError(std::string(e.what()) + " at epoch " + std::to_string(epoch) +
                              ", batch " + std::to_string(b));
      }
      if (config.precision == Precision::f32) round_to_f32(trainable);

      const double w = static_cast<double>(batches[b].size());
      entry.loss += w * value;
      for (std::size_t t = 0; t < 3; ++t) entry.task_loss[t] += w * loss.task[t].item();
    }
    const auto n = static_cast<double>(documents.size());
    entry.loss /= n;
    for (auto& l : entry.task_loss) l /= n;
    emit(std::move(entry));
    result.epochs_run = epoch;

    if (config.patience) {
      const double current = *result.log.back().validation_quadrant_macro_f1;
      if (current > best_valid) {
        best_valid = current;
        since_best = 0;
      } else if (++since_best >= *config.patience) {
        break;
      }
    }
  }
  for (const auto& p : all_params) {
    ad::Tensor t = p.tensor;
    t.zero_grad();
  }
  result.model = model;
  return result;
}

}  // namespace lyrnet::train
