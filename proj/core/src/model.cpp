// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/model.hpp"

#include <memory>

#include "lyrnet/tokens.hpp"

namespace lyrnet {

EmotionModel::EmotionModel(ModelConfig config, ad::Rng& init_rng) : config_(std::move(config)) {
  config_.validate();
  ad::Rng enc_rng = init_rng.split(1);
  ad::Rng head_rng = init_rng.split(2);
  encoder_ = encoder::init_parameters(config_.encoder, enc_rng);
  heads_ = heads::init_head_parameters(config_.heads, config_.encoder.d_model, head_rng);
}

EmotionModel::EmotionModel(ModelConfig config, encoder::EncoderParams encoder_params,
                           heads::HeadParams head_params)
    : config_(std::move(config)),
      encoder_(std::move(encoder_params)),
      heads_(std::move(head_params)) {
  config_.validate();
}

heads::TaskLogits EmotionModel::forward(std::span<const std::size_t> tokens, ad::Mode mode,
                                        ad::Rng& rng) const {
  const auto encoded = encoder::encode(config_.encoder, encoder_, tokens, nullptr, mode, rng);
  const auto valid = std::make_unique<bool[]>(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) valid[i] = tokens[i] != kPadId;
  const ad::Tensor summary = heads::summarize(encoded.hidden, config_.heads.summary_mode,
                                              std::span<const bool>(valid.get(), tokens.size()));
  return heads::forward_heads(summary, heads_, config_.heads, mode, rng);
}

ParameterList EmotionModel::parameters() const {
  ParameterList all = encoder::named_parameters(encoder_);
  for (auto& p : heads::named_parameters(heads_)) all.push_back(std::move(p));
  return all;
}

std::size_t EmotionModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.tensor.size();
  return n;
}

EmotionModel EmotionModel::clone() const {
  auto copy = [](const ad::Tensor& t) { return t.clone(); };
  encoder::EncoderParams enc;
  enc.embedding = copy(encoder_.embedding);
  for (const auto& L : encoder_.layers) {
    encoder::LayerParams c;
    c.w_query = copy(L.w_query);
    c.w_key = copy(L.w_key);
    c.w_value = copy(L.w_value);
    c.w_position = copy(L.w_position);
    c.content_bias = copy(L.content_bias);
    c.position_bias = copy(L.position_bias);
    c.w_output = copy(L.w_output);
    c.attn_norm_gain = copy(L.attn_norm_gain);
    c.attn_norm_bias = copy(L.attn_norm_bias);
    c.ff_w1 = copy(L.ff_w1);
    c.ff_b1 = copy(L.ff_b1);
    c.ff_w2 = copy(L.ff_w2);
    c.ff_b2 = copy(L.ff_b2);
    c.ff_norm_gain = copy(L.ff_norm_gain);
    c.ff_norm_bias = copy(L.ff_norm_bias);
    enc.layers.push_back(std::move(c));
  }
  heads::HeadParams h{copy(heads_.bottleneck_w), copy(heads_.bottleneck_b),
                      copy(heads_.quadrant_w),   copy(heads_.quadrant_b),
                      copy(heads_.valence_w),    copy(heads_.valence_b),
                      copy(heads_.arousal_w),    copy(heads_.arousal_b)};
  return EmotionModel(config_, std::move(enc), std::move(h));
}

std::size_t model_parameter_count(const ModelConfig& config) {
  return encoder::parameter_count(config.encoder) +
         heads::head_parameter_count(config.heads, config.encoder.d_model);
}

}  // namespace lyrnet
