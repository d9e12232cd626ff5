// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/train/grad_cases.hpp"

#include "lyrnet/ad/ops.hpp"
#include "lyrnet/encoder/encoder.hpp"
#include "lyrnet/heads/heads.hpp"
#include "lyrnet/model.hpp"
#include "lyrnet/train/loss.hpp"

namespace lyrnet::train {

using ad::Rng;
using ad::Shape;
using ad::Tensor;

namespace {

Tensor random_tensor(Rng& rng, Shape shape, double lo, double hi) {
  std::vector<double> v(ad::numel(shape));
  for (auto& x : v) x = lo + (hi - lo) * rng.uniform();
  return Tensor::from(std::move(shape), std::move(v), true);
}

Tensor probe(Rng& rng, Shape shape) {
  std::vector<double> v(ad::numel(shape));
  for (auto& x : v) x = -1.0 + 2.0 * rng.uniform();
  return Tensor::from(std::move(shape), std::move(v), false);
}

// Fresh leaf copies of a parameter list with values spread well away from the
// tiny init scale, so finite differences see real curvature.
std::vector<Tensor> randomized(const ParameterList& params, Rng& rng) {
  std::vector<Tensor> out;
  for (const auto& p : params) {
    const bool gain = p.name.ends_with("_gain");
    out.push_back(random_tensor(rng, p.tensor.shape(), gain ? 0.5 : -0.5, gain ? 1.5 : 0.5));
  }
  return out;
}

encoder::EncoderParams encoder_from(std::span<const Tensor> in, std::size_t n_layers) {
  encoder::EncoderParams p;
  p.embedding = in[0];
  std::size_t k = 1;
  for (std::size_t l = 0; l < n_layers; ++l) {
    encoder::LayerParams L;
    L.w_query = in[k++];
    L.w_key = in[k++];
    L.w_value = in[k++];
    L.w_position = in[k++];
    L.content_bias = in[k++];
    L.position_bias = in[k++];
    L.w_output = in[k++];
    L.attn_norm_gain = in[k++];
    L.attn_norm_bias = in[k++];
    L.ff_w1 = in[k++];
    L.ff_b1 = in[k++];
    L.ff_w2 = in[k++];
    L.ff_b2 = in[k++];
    L.ff_norm_gain = in[k++];
    L.ff_norm_bias = in[k++];
    p.layers.push_back(std::move(L));
  }
  return p;
}

constexpr std::size_t kHeadTensors = 8;

heads::HeadParams heads_from(std::span<const Tensor> in) {
  return {in[0], in[1], in[2], in[3], in[4], in[5], in[6], in[7]};
}

ModelConfig toy_config(std::size_t n_layers, std::size_t memory_len) {
  ModelConfig c;
  c.encoder.n_layers = n_layers;
  c.encoder.n_heads = 2;
  c.encoder.d_model = 8;
  c.encoder.d_ff = 12;
  c.encoder.vocab_size = 10;
  c.encoder.max_seq_len = 16;
  c.encoder.memory_len = memory_len;
  c.encoder.dropout_p = 0.1;
  c.heads.bottleneck_dim = 4;
  c.heads.dropout_p = 0.1;
  return c;
}

}  // namespace

std::vector<ad::GradCheckCase> model_grad_cases(std::uint64_t seed) {
  Rng rng(seed, 0x6d6f64656c);  // "model"
  std::vector<ad::GradCheckCase> cases;

  {
    // Two heads over four tokens, one of them a masked pad key.
    const std::size_t d = 8, h = 2;
    auto w = probe(rng, {h, 4, 4});
    std::vector<Tensor> in{random_tensor(rng, {4, d}, -1, 1), random_tensor(rng, {4, d}, -1, 1),
                           random_tensor(rng, {d, d}, -0.5, 0.5), random_tensor(rng, {h, d / h}, -0.5, 0.5),
                           random_tensor(rng, {h, d / h}, -0.5, 0.5)};
    cases.push_back({"attention_scores", std::move(in), [w](std::span<const Tensor> x) {
                       const std::vector<std::int64_t> pos{0, 1, 2, 3};
                       const bool masked[4] = {false, false, true, false};
                       const auto a = encoder::attention_scores(x[0], x[1], x[2], x[3], x[4], 2, pos, pos, masked);
                       return ad::sum(ad::mul(a, w));
                     }});
  }

  const std::vector<std::size_t> tokens{3, 7, 1, 4, 0};
  {
    const auto config = toy_config(2, 0);
    Rng init(seed, 1);
    const auto params = encoder::init_parameters(config.encoder, init);
    auto w = probe(rng, {tokens.size(), config.encoder.d_model});
    const Rng mask_stream = rng.split(11);
    cases.push_back({"encoder", randomized(encoder::named_parameters(params), rng),
                     [config, w, tokens, mask_stream](std::span<const Tensor> x) {
                       Rng r = mask_stream;
                       const auto p = encoder_from(x, config.encoder.n_layers);
                       const auto out = encoder::encode(config.encoder, p, tokens, nullptr, ad::Mode::train, r);
                       return ad::sum(ad::mul(out.hidden, w));
                     }});
  }
  {
    const auto config = toy_config(1, 3);
    Rng init(seed, 2);
    const auto params = encoder::init_parameters(config.encoder, init);
    auto inputs = randomized(encoder::named_parameters(params), rng);
    // Memory from a previous segment is a constant of this segment's graph.
    encoder::SegmentMemory memory{{probe(rng, {3, config.encoder.d_model})}};
    auto w = probe(rng, {3, config.encoder.d_model});
    cases.push_back({"encoder_with_memory", std::move(inputs),
                     [config, w, memory](std::span<const Tensor> x) {
                       Rng r(0);
                       const std::vector<std::size_t> segment{2, 5, 6};
                       const auto p = encoder_from(x, config.encoder.n_layers);
                       const auto out = encoder::encode(config.encoder, p, segment, &memory, ad::Mode::eval, r);
                       return ad::sum(ad::mul(out.hidden, w));
                     }});
  }
  {
    const auto config = toy_config(1, 0);
    Rng init(seed, 3);
    const auto hp = heads::init_head_parameters(config.heads, config.encoder.d_model, init);
    auto inputs = randomized(heads::named_parameters(hp), rng);
    inputs.insert(inputs.begin(), random_tensor(rng, {5, config.encoder.d_model}, -1, 1));
    const std::array<Tensor, 3> w{probe(rng, {4}), probe(rng, {2}), probe(rng, {2})};
    const Rng mask_stream = rng.split(12);
    cases.push_back({"head_stack", std::move(inputs), [config, w, mask_stream](std::span<const Tensor> x) {
                       Rng r = mask_stream;
                       const bool valid[5] = {true, true, true, false, false};
                       const auto summary = heads::summarize(x[0], heads::SummaryMode::mean, valid);
                       const auto logits =
                           heads::forward_heads(summary, heads_from(x.subspan(1)), config.heads, ad::Mode::train, r);
                       return ad::add(ad::add(ad::sum(ad::mul(logits.quadrant, w[0])),
                                              ad::sum(ad::mul(logits.valence, w[1]))),
                                      ad::sum(ad::mul(logits.arousal, w[2])));
                     }});
  }
  for (const auto mode : {ad::Mode::eval, ad::Mode::train}) {
    const auto config = toy_config(2, 0);
    Rng init(seed, 4);
    const EmotionModel model(config, init);
    const std::size_t n_enc = encoder::named_parameters(model.encoder_params()).size();
    const Lambdas lambdas{1.0, 0.7, 0.4};
    const Rng mask_stream = rng.split(mode == ad::Mode::train ? 14 : 13);
    cases.push_back({mode == ad::Mode::train ? "multi_task_loss_train" : "multi_task_loss_eval",
                     randomized(model.parameters(), rng),
                     [config, n_enc, lambdas, mode, mask_stream](std::span<const Tensor> x) {
                       Rng r = mask_stream;
                       const EmotionModel m(config, encoder_from(x.first(n_enc), config.encoder.n_layers),
                                            heads_from(x.subspan(n_enc, kHeadTensors)));
                       // Two documents, a batch as the training loop builds it.
                       const std::vector<std::vector<std::size_t>> docs{{3, 7, 1, 4}, {9, 2, 2}};
                       const std::array<std::vector<std::size_t>, 3> gold{{{1, 3}, {1, 0}, {0, 1}}};
                       std::array<std::vector<Tensor>, 3> rows;
                       for (const auto& doc : docs) {
                         const auto logits = m.forward(doc, mode, r);
                         for (auto task : heads::kTasks) {
                           const auto& l = logits.of(task);
                           rows[static_cast<std::size_t>(task)].push_back(ad::reshape(l, {1, l.dim(0)}));
                         }
                       }
                       std::array<Tensor, 3> losses;
                       for (std::size_t t = 0; t < 3; ++t) {
                         losses[t] = ad::cross_entropy(ad::concat(rows[t], 0), gold[t]);
                       }
                       return multi_task_loss(losses[0], losses[1], losses[2], lambdas);
                     }});
  }
  // Sinusoid columns that are nearly constant over the offset range give
  // gradients near zero (softmax is shift invariant), where 1e-5 steps are
  // dominated by rounding in the forward pass.
  for (auto& c : cases) c.step = 1e-4;
  return cases;
}

std::vector<ad::GradCheckCase> all_grad_cases(std::uint64_t seed) {
  auto cases = ad::primitive_grad_cases(seed);
  for (auto& c : model_grad_cases(seed)) cases.push_back(std::move(c));
  return cases;
}

}  // namespace lyrnet::train
