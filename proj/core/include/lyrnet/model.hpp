// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

#include "lyrnet/ad/rng.hpp"
#include "lyrnet/encoder/encoder.hpp"
#include "lyrnet/heads/heads.hpp"
#include "lyrnet/named_parameter.hpp"

namespace lyrnet {

struct ModelConfig {
  encoder::EncoderConfig encoder;
  heads::HeadConfig heads;

  void validate() const {
    encoder.validate();
    heads.validate();
  }
};

/// Encoder trunk plus the three-task classifier stack.
class EmotionModel {
 public:
  /// Fresh parameters drawn from `init_rng`.
  EmotionModel(ModelConfig config, ad::Rng& init_rng);
  EmotionModel(ModelConfig config, encoder::EncoderParams encoder_params,
               heads::HeadParams head_params);

  const ModelConfig& config() const { return config_; }
  const encoder::EncoderParams& encoder_params() const { return encoder_; }
  const heads::HeadParams& head_params() const { return heads_; }

  /// Tokens -> hidden states -> summary -> task logits. Pad tokens are
  /// excluded from attention keys and from the summary.
  heads::TaskLogits forward(std::span<const std::size_t> tokens, ad::Mode mode,
                            ad::Rng& rng) const;

  /// Encoder parameters followed by head parameters; handles share storage
  /// with the model.
  ParameterList parameters() const;
  std::size_t parameter_count() const;

  /// Independent copy of every parameter value.
  EmotionModel clone() const;

 private:
  ModelConfig config_;
  encoder::EncoderParams encoder_;
  heads::HeadParams heads_;
};

/// Closed-form count for a config, independent of any instance.
std::size_t model_parameter_count(const ModelConfig& config);

}  // namespace lyrnet
