// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lyrnet/ad/ops.hpp"
#include "lyrnet/ad/rng.hpp"
#include "lyrnet/ad/tensor.hpp"
#include "lyrnet/named_parameter.hpp"

namespace lyrnet::encoder {

struct EncoderConfig {
  std::size_t n_layers = 2;
  std::size_t n_heads = 2;
  std::size_t d_model = 32;
  std::size_t d_ff = 64;
  double dropout_p = 0.1;
  std::size_t max_seq_len = 1024;
  std::size_t memory_len = 0;  // 0 disables segment recurrence
  std::size_t vocab_size = 1000;

  std::size_t d_head() const { return d_model / n_heads; }
  /// Throws ContractError on any violated invariant.
  void validate() const;
};

struct LayerParams {
  ad::Tensor w_query, w_key, w_value;  // [d_model, d_model]
  ad::Tensor w_position;               // projects sinusoidal offsets, [d_model, d_model]
  ad::Tensor content_bias;             // global content bias, [n_heads, d_head]
  ad::Tensor position_bias;            // global position bias, [n_heads, d_head]
  ad::Tensor w_output;                 // [d_model, d_model]
  ad::Tensor attn_norm_gain, attn_norm_bias;
  ad::Tensor ff_w1, ff_b1, ff_w2, ff_b2;
  ad::Tensor ff_norm_gain, ff_norm_bias;
};

struct EncoderParams {
  ad::Tensor embedding;  // [vocab_size, d_model]
  std::vector<LayerParams> layers;
};

/// Weights ~ N(0, 0.02), biases 0, norm gains 1.
EncoderParams init_parameters(const EncoderConfig& config, ad::Rng& rng);

/// Parameters in a fixed order with dotted names ("encoder.layer0.w_query", ...).
ParameterList named_parameters(const EncoderParams& params);

/// Closed-form scalar count for the layout built by init_parameters.
std::size_t parameter_count(const EncoderConfig& config);

/// Cached per-layer inputs from the previous segment, detached from the graph.
/// Entry l has shape [m, d_model] with m <= memory_len.
struct SegmentMemory {
  std::vector<ad::Tensor> layers;
  bool empty() const { return layers.empty(); }
  std::size_t length() const { return layers.empty() ? 0 : layers.front().dim(0); }
};

struct EncodeResult {
  ad::Tensor hidden;  // [seq_len, d_model]
  SegmentMemory memory;
};

/// Sinusoidal embeddings for every integer offset in [min_offset, max_offset],
/// row r encoding offset min_offset + r. Shape [max-min+1, d_model].
ad::Tensor relative_position_table(std::int64_t min_offset, std::int64_t max_offset,
                                   std::size_t d_model);

/// Relative multi-head attention weights, shape [n_heads, q_len, kv_len].
///
/// score(i, j) = ((q_i + u) . k_j + (q_i + v) . (W_r R[pos_i - pos_j])) / sqrt(d_head)
/// per head, where R is the sinusoidal table. Only position differences
/// enter, so shifting every position by the same amount is a no-op.
/// `key_masked[j]` excludes key j (ignored when it would mask every key).
ad::Tensor attention_scores(const ad::Tensor& queries, const ad::Tensor& keys,
                            const ad::Tensor& w_position, const ad::Tensor& content_bias,
                            const ad::Tensor& position_bias, std::size_t n_heads,
                            std::span<const std::int64_t> query_positions,
                            std::span<const std::int64_t> key_positions,
                            std::span<const bool> key_masked = {});

/// Runs the encoder over one segment.
///
/// Attention at layer l spans concat(memory.layers[l], current inputs); the
/// returned memory keeps the trailing memory_len inputs of each layer. With
/// memory_len == 0 or no incoming memory the computation is the plain
/// relative-position encoder. Pad tokens are excluded as attention keys.
/// `position_offset` shifts every absolute position (outputs are invariant).
EncodeResult encode(const EncoderConfig& config, const EncoderParams& params,
                    std::span<const std::size_t> tokens, const SegmentMemory* memory,
                    ad::Mode mode, ad::Rng& rng, std::int64_t position_offset = 0);

}  // namespace lyrnet::encoder
