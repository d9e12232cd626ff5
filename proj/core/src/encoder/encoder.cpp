// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/encoder/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "lyrnet/error.hpp"
#include "lyrnet/tokens.hpp"

namespace lyrnet::encoder {

using ad::Tensor;

namespace {

constexpr double kInitStd = 0.02;
constexpr double kMaskedScore = -1e9;

Tensor normal_param(ad::Rng& rng, ad::Shape shape) {
  std::vector<double> v(ad::numel(shape));
  for (auto& x : v) x = rng.normal(0.0, kInitStd);
  return Tensor::from(std::move(shape), std::move(v), true);
}

Tensor const_param(ad::Shape shape, double value) {
  return Tensor::full(std::move(shape), value, true);
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  return ad::add(ad::matmul(x, w), b);
}

}  // namespace

void EncoderConfig::validate() const {
  auto fail = [](const std::string& what) { throw ContractError("EncoderConfig: " + what); };
  if (n_layers == 0) fail("n_layers must be positive");
  if (n_heads == 0) fail("n_heads must be positive");
  if (d_model == 0) fail("d_model must be positive");
  if (d_model % n_heads != 0) {
    fail("d_model " + std::to_string(d_model) + " not divisible by n_heads " +
         std::to_string(n_heads));
  }
  if (d_ff == 0) fail("d_ff must be positive");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) fail("dropout_p must lie in [0, 1)");
  if (max_seq_len == 0) fail("max_seq_len must be positive");
  if (vocab_size == 0) fail("vocab_size must be positive");
}

EncoderParams init_parameters(const EncoderConfig& config, ad::Rng& rng) {
  config.validate();
  const std::size_t d = config.d_model, h = config.n_heads, dh = config.d_head();
  EncoderParams p;
  p.embedding = normal_param(rng, {config.vocab_size, d});
  for (std::size_t l = 0; l < config.n_layers; ++l) {
    LayerParams L;
    L.w_query = normal_param(rng, {d, d});
    L.w_key = normal_param(rng, {d, d});
    L.w_value = normal_param(rng, {d, d});
    L.w_position = normal_param(rng, {d, d});
    L.content_bias = const_param({h, dh}, 0.0);
    L.position_bias = const_param({h, dh}, 0.0);
    L.w_output = normal_param(rng, {d, d});
    L.attn_norm_gain = const_param({d}, 1.0);
    L.attn_norm_bias = const_param({d}, 0.0);
    L.ff_w1 = normal_param(rng, {d, config.d_ff});
    L.ff_b1 = const_param({config.d_ff}, 0.0);
    L.ff_w2 = normal_param(rng, {config.d_ff, d});
    L.ff_b2 = const_param({d}, 0.0);
    L.ff_norm_gain = const_param({d}, 1.0);
    L.ff_norm_bias = const_param({d}, 0.0);
    p.layers.push_back(std::move(L));
  }
  return p;
}

ParameterList named_parameters(const EncoderParams& params) {
  ParameterList out;
  out.push_back({"encoder.embedding", params.embedding});
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& L = params.layers[l];
    const std::string prefix = "encoder.layer" + std::to_string(l) + ".";
    out.push_back({prefix + "w_query", L.w_query});
    out.push_back({prefix + "w_key", L.w_key});
    out.push_back({prefix + "w_value", L.w_value});
    out.push_back({prefix + "w_position", L.w_position});
    out.push_back({prefix + "content_bias", L.content_bias});
    out.push_back({prefix + "position_bias", L.position_bias});
    out.push_back({prefix + "w_output", L.w_output});
    out.push_back({prefix + "attn_norm_gain", L.attn_norm_gain});
    out.push_back({prefix + "attn_norm_bias", L.attn_norm_bias});
    out.push_back({prefix + "ff_w1", L.ff_w1});
    out.push_back({prefix + "ff_b1", L.ff_b1});
    out.push_back({prefix + "ff_w2", L.ff_w2});
    out.push_back({prefix + "ff_b2", L.ff_b2});
    out.push_back({prefix + "ff_norm_gain", L.ff_norm_gain});
    out.push_back({prefix + "ff_norm_bias", L.ff_norm_bias});
  }
  return out;
}

std::size_t parameter_count(const EncoderConfig& c) {
  const std::size_t d = c.d_model;
  // 5 dense d x d maps, two d-sized attention biases (heads x d_head),
  // two norms (gain + bias each), and the two feed-forward layers.
  const std::size_t per_layer = 5 * d * d + 2 * d + 4 * d + 2 * d * c.d_ff + c.d_ff + d;
  return c.vocab_size * d + c.n_layers * per_layer;
}

Tensor relative_position_table(std::int64_t min_offset, std::int64_t max_offset,
                               std::size_t d_model) {
  if (max_offset < min_offset) throw ContractError("relative_position_table: empty offset range");
  const auto rows = static_cast<std::size_t>(max_offset - min_offset + 1);
  std::vector<double> table(rows * d_model);
  for (std::size_t r = 0; r < rows; ++r) {
    const double offset = static_cast<double>(min_offset + static_cast<std::int64_t>(r));
    for (std::size_t c = 0; c < d_model; ++c) {
      const double freq =
          std::pow(10000.0, -static_cast<double>(2 * (c / 2)) / static_cast<double>(d_model));
      table[r * d_model + c] = (c % 2 == 0) ? std::sin(offset * freq) : std::cos(offset * freq);
    }
  }
  return Tensor::from({rows, d_model}, std::move(table), false);
}

Tensor attention_scores(const Tensor& queries, const Tensor& keys, const Tensor& w_position,
                        const Tensor& content_bias, const Tensor& position_bias,
                        std::size_t n_heads, std::span<const std::int64_t> query_positions,
                        std::span<const std::int64_t> key_positions,
                        std::span<const bool> key_masked) {
  if (queries.rank() != 2 || keys.rank() != 2 || queries.dim(1) != keys.dim(1)) {
    throw ShapeError("attention_scores: queries " + ad::to_string(queries.shape()) +
                     " and keys " + ad::to_string(keys.shape()) + " incompatible");
  }
  const std::size_t q_len = queries.dim(0), kv_len = keys.dim(0), d = queries.dim(1);
  if (n_heads == 0 || d % n_heads != 0) {
    throw ShapeError("attention_scores: width " + std::to_string(d) + " not divisible into " +
                     std::to_string(n_heads) + " heads");
  }
  const std::size_t dh = d / n_heads;
  if (query_positions.size() != q_len || key_positions.size() != kv_len) {
    throw ShapeError("attention_scores: position arrays do not match sequence lengths");
  }
  if (!key_masked.empty() && key_masked.size() != kv_len) {
    throw ShapeError("attention_scores: key mask length does not match keys");
  }
  if (q_len == 0 || kv_len == 0) throw ShapeError("attention_scores: empty sequence");

  std::int64_t lo = query_positions[0] - key_positions[0], hi = lo;
  for (auto qp : query_positions) {
    for (auto kp : key_positions) {
      lo = std::min(lo, qp - kp);
      hi = std::max(hi, qp - kp);
    }
  }
  std::vector<std::size_t> index(q_len * kv_len);
  for (std::size_t i = 0; i < q_len; ++i) {
    for (std::size_t j = 0; j < kv_len; ++j) {
      index[i * kv_len + j] = static_cast<std::size_t>(query_positions[i] - key_positions[j] - lo);
    }
  }
  const Tensor projected = ad::matmul(relative_position_table(lo, hi, d), w_position);

  Tensor mask;
  const bool any_masked =
      !key_masked.empty() && std::any_of(key_masked.begin(), key_masked.end(), [](bool b) { return b; });
  const bool all_masked =
      !key_masked.empty() && std::all_of(key_masked.begin(), key_masked.end(), [](bool b) { return b; });
  if (any_masked && !all_masked) {
    std::vector<double> m(q_len * kv_len, 0.0);
    for (std::size_t i = 0; i < q_len; ++i) {
      for (std::size_t j = 0; j < kv_len; ++j) {
        if (key_masked[j]) m[i * kv_len + j] = kMaskedScore;
      }
    }
    mask = Tensor::from({q_len, kv_len}, std::move(m), false);
  }

  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Tensor> heads;
  heads.reserve(n_heads);
  for (std::size_t h = 0; h < n_heads; ++h) {
    const Tensor q = ad::slice(queries, 1, h * dh, (h + 1) * dh);
    const Tensor k = ad::slice(keys, 1, h * dh, (h + 1) * dh);
    const Tensor r = ad::slice(projected, 1, h * dh, (h + 1) * dh);
    const Tensor u = ad::reshape(ad::slice(content_bias, 0, h, h + 1), {dh});
    const Tensor v = ad::reshape(ad::slice(position_bias, 0, h, h + 1), {dh});
    const Tensor content = ad::matmul(ad::add(q, u), ad::transpose(k));
    const Tensor position =
        ad::gather_columns(ad::matmul(ad::add(q, v), ad::transpose(r)), index, kv_len);
    Tensor scores = ad::scale(ad::add(content, position), inv_sqrt);
    if (mask.defined()) scores = ad::add(scores, mask);
    heads.push_back(ad::reshape(ad::softmax(scores, -1), {1, q_len, kv_len}));
  }
  return heads.size() == 1 ? heads.front() : ad::concat(heads, 0);
}

namespace {

Tensor encoder_layer(const EncoderConfig& config, const LayerParams& L, const Tensor& x,
                     const Tensor& memory, std::span<const bool> key_masked,
                     std::int64_t position_offset, ad::Mode mode, ad::Rng& rng) {
  const std::size_t q_len = x.dim(0);
  const std::size_t m_len = memory.defined() ? memory.dim(0) : 0;
  const std::size_t kv_len = m_len + q_len;
  const std::size_t dh = config.d_head();

  const Tensor context = m_len > 0 ? ad::concat({memory, x}, 0) : x;
  const Tensor queries = ad::matmul(x, L.w_query);
  const Tensor keys = ad::matmul(context, L.w_key);
  const Tensor values = ad::matmul(context, L.w_value);

  std::vector<std::int64_t> q_pos(q_len), k_pos(kv_len);
  for (std::size_t i = 0; i < q_len; ++i) {
    q_pos[i] = position_offset + static_cast<std::int64_t>(m_len + i);
  }
  for (std::size_t j = 0; j < kv_len; ++j) k_pos[j] = position_offset + static_cast<std::int64_t>(j);

  const Tensor probs = attention_scores(queries, keys, L.w_position, L.content_bias,
                                        L.position_bias, config.n_heads, q_pos, k_pos, key_masked);
  std::vector<Tensor> head_out;
  head_out.reserve(config.n_heads);
  for (std::size_t h = 0; h < config.n_heads; ++h) {
    const Tensor weights = ad::reshape(ad::slice(probs, 0, h, h + 1), {q_len, kv_len});
    head_out.push_back(ad::matmul(weights, ad::slice(values, 1, h * dh, (h + 1) * dh)));
  }
  const Tensor merged = head_out.size() == 1 ? head_out.front() : ad::concat(head_out, 1);
  const Tensor attn = ad::dropout(ad::matmul(merged, L.w_output), config.dropout_p, mode, rng);
  const Tensor h1 = ad::layer_norm(ad::add(x, attn), L.attn_norm_gain, L.attn_norm_bias);

  Tensor ff = ad::gelu(linear(h1, L.ff_w1, L.ff_b1));
  ff = ad::dropout(ff, config.dropout_p, mode, rng);
  ff = ad::dropout(linear(ff, L.ff_w2, L.ff_b2), config.dropout_p, mode, rng);
  return ad::layer_norm(ad::add(h1, ff), L.ff_norm_gain, L.ff_norm_bias);
}

Tensor trailing_rows(const Tensor& memory, const Tensor& current, std::size_t keep) {
  const Tensor joined =
      memory.defined() && memory.dim(0) > 0 ? ad::concat({memory, current.detach()}, 0)
                                            : current.detach();
  const std::size_t n = joined.dim(0);
  const std::size_t take = std::min(keep, n);
  return ad::slice(joined, 0, n - take, n).detach();
}

}  // namespace

EncodeResult encode(const EncoderConfig& config, const EncoderParams& params,
                    std::span<const std::size_t> tokens, const SegmentMemory* memory,
                    ad::Mode mode, ad::Rng& rng, std::int64_t position_offset) {
  if (tokens.empty()) throw ContractError("encode: empty token sequence");
  if (tokens.size() > config.max_seq_len) {
    throw ContractError("encode: seq_len " + std::to_string(tokens.size()) +
                        " exceeds max_seq_len " + std::to_string(config.max_seq_len));
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] >= config.vocab_size) {
      throw ContractError("encode: token id " + std::to_string(tokens[i]) + " at position " +
                          std::to_string(i) + " outside vocabulary of " +
                          std::to_string(config.vocab_size));
    }
  }
  const bool use_memory = memory != nullptr && !memory->empty() && config.memory_len > 0;
  if (use_memory) {
    if (memory->layers.size() != config.n_layers) {
      throw ContractError("encode: memory has " + std::to_string(memory->layers.size()) +
                          " layers, config has " + std::to_string(config.n_layers));
    }
    for (const auto& m : memory->layers) {
      if (m.rank() != 2 || m.dim(1) != config.d_model) {
        throw ShapeError("encode: memory entry shape " + ad::to_string(m.shape()) +
                         " incompatible with d_model " + std::to_string(config.d_model));
      }
    }
  }
  const std::size_t m_len = use_memory ? memory->length() : 0;

  // Memory rows are never masked; pad tokens in the current segment are.
  const std::size_t kv_len = m_len + tokens.size();
  const auto masked = std::make_unique<bool[]>(kv_len);
  for (std::size_t i = 0; i < tokens.size(); ++i) masked[m_len + i] = tokens[i] == kPadId;
  const std::span<const bool> key_masked(masked.get(), kv_len);

  Tensor x = ad::embedding_lookup(params.embedding, tokens);
  x = ad::dropout(x, config.dropout_p, mode, rng);

  EncodeResult result;
  for (std::size_t l = 0; l < config.n_layers; ++l) {
    const Tensor mem = use_memory ? memory->layers[l] : Tensor();
    if (config.memory_len > 0) {
      result.memory.layers.push_back(trailing_rows(mem, x, config.memory_len));
    }
    x = encoder_layer(config, params.layers[l], x, mem, key_masked, position_offset, mode, rng);
  }
  result.hidden = x;
  return result;
}

}  // namespace lyrnet::encoder
