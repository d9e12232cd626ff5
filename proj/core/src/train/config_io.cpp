// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/train/config_io.hpp"

#include <charconv>
#include <functional>
#include <map>

#include "lyrnet/error.hpp"

namespace lyrnet::train {

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string bad(std::string_view key, std::string_view value) {
  return "config: bad value '" + std::string(value) + "' for " + std::string(key);
}

std::size_t parse_size(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw InvalidParameterError(bad(key, v));
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  double out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw InvalidParameterError(bad(key, v));
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InvalidParameterError(bad(key, v));
}

std::string_view summary_name(heads::SummaryMode m) {
  return m == heads::SummaryMode::mean ? "mean" : "last_token";
}

using Setter = std::function<void(std::string_view, std::string_view, ModelConfig&, TrainingConfig&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"encoder.n_layers", [](auto k, auto v, auto& m, auto&) { m.encoder.n_layers = parse_size(k, v); }},
      {"encoder.n_heads", [](auto k, auto v, auto& m, auto&) { m.encoder.n_heads = parse_size(k, v); }},
      {"encoder.d_model", [](auto k, auto v, auto& m, auto&) { m.encoder.d_model = parse_size(k, v); }},
      {"encoder.d_ff", [](auto k, auto v, auto& m, auto&) { m.encoder.d_ff = parse_size(k, v); }},
      {"encoder.dropout", [](auto k, auto v, auto& m, auto&) { m.encoder.dropout_p = parse_real(k, v); }},
      {"encoder.max_seq_len", [](auto k, auto v, auto& m, auto&) { m.encoder.max_seq_len = parse_size(k, v); }},
      {"encoder.memory_len", [](auto k, auto v, auto& m, auto&) { m.encoder.memory_len = parse_size(k, v); }},
      {"encoder.vocab_size", [](auto k, auto v, auto& m, auto&) { m.encoder.vocab_size = parse_size(k, v); }},
      {"heads.summary",
       [](auto k, auto v, auto& m, auto&) {
         if (v == "last_token") {
           m.heads.summary_mode = heads::SummaryMode::last_token;
         } else if (v == "mean") {
           m.heads.summary_mode = heads::SummaryMode::mean;
         } else {
           throw InvalidParameterError(bad(k, v));
         }
       }},
      {"heads.bottleneck_dim", [](auto k, auto v, auto& m, auto&) { m.heads.bottleneck_dim = parse_size(k, v); }},
      {"heads.dropout", [](auto k, auto v, auto& m, auto&) { m.heads.dropout_p = parse_real(k, v); }},
      {"train.learning_rate", [](auto k, auto v, auto&, auto& t) { t.learning_rate = parse_real(k, v); }},
      {"train.batch_size", [](auto k, auto v, auto&, auto& t) { t.batch_size = parse_size(k, v); }},
      {"train.lambda_quadrant", [](auto k, auto v, auto&, auto& t) { t.lambdas.quadrant = parse_real(k, v); }},
      {"train.lambda_valence", [](auto k, auto v, auto&, auto& t) { t.lambdas.valence = parse_real(k, v); }},
      {"train.lambda_arousal", [](auto k, auto v, auto&, auto& t) { t.lambdas.arousal = parse_real(k, v); }},
      {"train.epochs", [](auto k, auto v, auto&, auto& t) { t.epochs = parse_size(k, v); }},
      {"train.weight_decay", [](auto k, auto v, auto&, auto& t) { t.weight_decay = parse_real(k, v); }},
      {"train.beta1", [](auto k, auto v, auto&, auto& t) { t.beta1 = parse_real(k, v); }},
      {"train.beta2", [](auto k, auto v, auto&, auto& t) { t.beta2 = parse_real(k, v); }},
      {"train.adam_eps", [](auto k, auto v, auto&, auto& t) { t.adam_eps = parse_real(k, v); }},
      {"train.seed", [](auto k, auto v, auto&, auto& t) { t.seed = parse_size(k, v); }},
      {"train.grad_clip",
       [](auto k, auto v, auto&, auto& t) {
         if (v == "none") {
           t.grad_clip.reset();
         } else {
           t.grad_clip = parse_real(k, v);
         }
       }},
      {"train.precision",
       [](auto k, auto v, auto&, auto& t) {
         const auto p = parse_precision(v);
         if (!p) throw InvalidParameterError(bad(k, v));
         t.precision = *p;
       }},
      {"train.log_train_metrics", [](auto k, auto v, auto&, auto& t) { t.log_train_metrics = parse_bool(k, v); }},
      {"train.patience",
       [](auto k, auto v, auto&, auto& t) {
         if (v == "none") {
           t.patience.reset();
         } else {
           t.patience = parse_size(k, v);
         }
       }},
  };
  return table;
}

}  // namespace

ConfigEntries config_entries(const ModelConfig& m, const TrainingConfig& t) {
  const auto& e = m.encoder;
  return {
      {"encoder.n_layers", std::to_string(e.n_layers)},
      {"encoder.n_heads", std::to_string(e.n_heads)},
      {"encoder.d_model", std::to_string(e.d_model)},
      {"encoder.d_ff", std::to_string(e.d_ff)},
      {"encoder.dropout", format_real(e.dropout_p)},
      {"encoder.max_seq_len", std::to_string(e.max_seq_len)},
      {"encoder.memory_len", std::to_string(e.memory_len)},
      {"encoder.vocab_size", std::to_string(e.vocab_size)},
      {"heads.summary", std::string(summary_name(m.heads.summary_mode))},
      {"heads.bottleneck_dim", std::to_string(m.heads.bottleneck_dim)},
      {"heads.dropout", format_real(m.heads.dropout_p)},
      {"train.learning_rate", format_real(t.learning_rate)},
      {"train.batch_size", std::to_string(t.batch_size)},
      {"train.lambda_quadrant", format_real(t.lambdas.quadrant)},
      {"train.lambda_valence", format_real(t.lambdas.valence)},
      {"train.lambda_arousal", format_real(t.lambdas.arousal)},
      {"train.epochs", std::to_string(t.epochs)},
      {"train.weight_decay", format_real(t.weight_decay)},
      {"train.beta1", format_real(t.beta1)},
      {"train.beta2", format_real(t.beta2)},
      {"train.adam_eps", format_real(t.adam_eps)},
      {"train.seed", std::to_string(t.seed)},
      {"train.grad_clip", t.grad_clip ? format_real(*t.grad_clip) : "none"},
      {"train.precision", std::string(to_string(t.precision))},
      {"train.log_train_metrics", t.log_train_metrics ? "true" : "false"},
      {"train.patience", t.patience ? std::to_string(*t.patience) : "none"},
  };
}

void apply_config_entry(std::string_view key, std::string_view value, ModelConfig& model,
                        TrainingConfig& training) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw InvalidParameterError("config: unknown key '" + std::string(key) + "'");
  it->second(key, value, model, training);
}

}  // namespace lyrnet::train
