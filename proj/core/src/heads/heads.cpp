// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/heads/heads.hpp"

#include <string>
#include <vector>

#include "lyrnet/error.hpp"

namespace lyrnet::heads {

using ad::Tensor;

std::string_view task_name(Task task) {
  switch (task) {
    case Task::quadrant: return "quadrant";
    case Task::valence: return "valence";
    case Task::arousal: return "arousal";
  }
  return "unknown";
}

std::size_t task_classes(Task task) { return task == Task::quadrant ? 4 : 2; }

std::string_view task_parameter_prefix(Task task) {
  switch (task) {
    case Task::quadrant: return "heads.quadrant.";
    case Task::valence: return "heads.valence.";
    case Task::arousal: return "heads.arousal.";
  }
  return "";
}

void HeadConfig::validate() const {
  if (bottleneck_dim == 0) throw ContractError("HeadConfig: bottleneck_dim must be positive");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) {
    throw ContractError("HeadConfig: dropout_p must lie in [0, 1)");
  }
}

namespace {

Tensor normal_param(ad::Rng& rng, ad::Shape shape) {
  std::vector<double> v(ad::numel(shape));
  for (auto& x : v) x = rng.normal(0.0, 0.02);
  return Tensor::from(std::move(shape), std::move(v), true);
}

Tensor head_logits(const Tensor& features, const Tensor& w, const Tensor& b) {
  const Tensor out = ad::add(ad::matmul(features, w), b);
  return ad::reshape(out, {w.dim(1)});
}

}  // namespace

HeadParams init_head_parameters(const HeadConfig& config, std::size_t d_model, ad::Rng& rng) {
  config.validate();
  const std::size_t b = config.bottleneck_dim;
  HeadParams p;
  p.bottleneck_w = normal_param(rng, {d_model, b});
  p.bottleneck_b = Tensor::zeros({b}, true);
  p.quadrant_w = normal_param(rng, {b, 4});
  p.quadrant_b = Tensor::zeros({4}, true);
  p.valence_w = normal_param(rng, {b, 2});
  p.valence_b = Tensor::zeros({2}, true);
  p.arousal_w = normal_param(rng, {b, 2});
  p.arousal_b = Tensor::zeros({2}, true);
  return p;
}

std::size_t head_parameter_count(const HeadConfig& config, std::size_t d_model) {
  const std::size_t b = config.bottleneck_dim;
  return d_model * b + b + (b + 1) * (4 + 2 + 2);
}

ParameterList named_parameters(const HeadParams& p) {
  return {
      {"heads.bottleneck.w", p.bottleneck_w}, {"heads.bottleneck.b", p.bottleneck_b},
      {"heads.quadrant.w", p.quadrant_w},     {"heads.quadrant.b", p.quadrant_b},
      {"heads.valence.w", p.valence_w},       {"heads.valence.b", p.valence_b},
      {"heads.arousal.w", p.arousal_w},       {"heads.arousal.b", p.arousal_b},
  };
}

Tensor summarize(const Tensor& hidden, SummaryMode mode, std::span<const bool> valid) {
  if (hidden.rank() != 2) {
    throw ShapeError("summarize: expected [seq_len, d_model], got " + ad::to_string(hidden.shape()));
  }
  const std::size_t n = hidden.dim(0), d = hidden.dim(1);
  if (n == 0) throw ContractError("summarize: empty sequence");
  if (!valid.empty() && valid.size() != n) {
    throw ShapeError("summarize: validity mask length does not match sequence");
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (valid.empty() || valid[i]) rows.push_back(i);
  }
  if (rows.empty()) {
    for (std::size_t i = 0; i < n; ++i) rows.push_back(i);
  }
  if (mode == SummaryMode::last_token) {
    return ad::reshape(ad::slice(hidden, 0, rows.back(), rows.back() + 1), {d});
  }
  if (rows.size() == n) return ad::mean_rows(hidden);
  std::vector<Tensor> picked;
  picked.reserve(rows.size());
  for (auto r : rows) picked.push_back(ad::slice(hidden, 0, r, r + 1));
  return ad::mean_rows(picked.size() == 1 ? picked.front() : ad::concat(picked, 0));
}

const Tensor& TaskLogits::of(Task task) const {
  switch (task) {
    case Task::quadrant: return quadrant;
    case Task::valence: return valence;
    case Task::arousal: return arousal;
  }
  return quadrant;
}

TaskLogits forward_heads(const Tensor& summary, const HeadParams& params,
                         const HeadConfig& config, ad::Mode mode, ad::Rng& rng) {
  if (summary.rank() != 1 || summary.dim(0) != params.bottleneck_w.dim(0)) {
    throw ShapeError("forward_heads: summary shape " + ad::to_string(summary.shape()) +
                     " does not match bottleneck input " + ad::to_string(params.bottleneck_w.shape()));
  }
  const Tensor s = ad::dropout(summary, config.dropout_p, mode, rng);
  const Tensor row = ad::reshape(s, {1, s.dim(0)});
  const Tensor shared =
      ad::tanh(ad::add(ad::matmul(row, params.bottleneck_w), params.bottleneck_b));
  return {head_logits(shared, params.quadrant_w, params.quadrant_b),
          head_logits(shared, params.valence_w, params.valence_b),
          head_logits(shared, params.arousal_w, params.arousal_b)};
}

std::size_t Prediction::of(Task task) const {
  switch (task) {
    case Task::quadrant: return quadrant;
    case Task::valence: return valence;
    case Task::arousal: return arousal;
  }
  return quadrant;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw ContractError("argmax: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Prediction predict(const TaskLogits& logits) {
  return {argmax(logits.quadrant.data()), argmax(logits.valence.data()),
          argmax(logits.arousal.data())};
}

}  // namespace lyrnet::heads
