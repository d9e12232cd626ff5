// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "lyrnet/ad/ops.hpp"
#include "lyrnet/ad/rng.hpp"
#include "lyrnet/corpus/vocabulary.hpp"
#include "lyrnet/encoder/encoder.hpp"
#include "lyrnet/eval/metrics.hpp"

namespace {

using namespace lyrnet;

ad::Tensor random_tensor(ad::Shape shape, ad::Rng& rng, bool grad = false) {
  std::vector<double> v(ad::numel(shape));
  for (auto& x : v) x = rng.normal(0.0, 1.0);
  return ad::Tensor::from(std::move(shape), std::move(v), grad);
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ad::Rng rng(1);
  const auto a = random_tensor({n, n}, rng), b = random_tensor({n, n}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(ad::matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(64)->Arg(128);

struct EncoderFixture {
  encoder::EncoderConfig config;
  encoder::EncoderParams params;
  std::vector<std::size_t> tokens;

  explicit EncoderFixture(std::size_t seq_len) {
    config.vocab_size = 1000;
    ad::Rng rng(2);
    params = encoder::init_parameters(config, rng);
    for (std::size_t i = 0; i < seq_len; ++i) tokens.push_back(2 + rng.below(998));
  }
};

void BM_EncoderForward(benchmark::State& state) {
  EncoderFixture f(static_cast<std::size_t>(state.range(0)));
  ad::Rng rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(encoder::encode(f.config, f.params, f.tokens, nullptr, ad::Mode::eval, rng));
  }
}
BENCHMARK(BM_EncoderForward)->Arg(32)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_EncoderForwardBackward(benchmark::State& state) {
  EncoderFixture f(static_cast<std::size_t>(state.range(0)));
  ad::Rng rng(3);
  for (auto _ : state) {
    const auto out = encoder::encode(f.config, f.params, f.tokens, nullptr, ad::Mode::train, rng);
    ad::sum(out.hidden).backward();
  }
}
BENCHMARK(BM_EncoderForwardBackward)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_MacroF1(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ad::Rng rng(4);
  std::vector<std::size_t> gold(n), pred(n);
  for (std::size_t i = 0; i < n; ++i) {
    gold[i] = rng.below(4);
    pred[i] = rng.below(4);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval::macro_f1(eval::ConfusionMatrix::from_labels(4, gold, pred)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_MacroF1)->Arg(1000)->Arg(100000);

void BM_Tokenize(benchmark::State& state) {
  corpus::Vocabulary vocab;
  std::string text;
  ad::Rng rng(5);
  for (int i = 0; i < 400; ++i) {
    const std::string word = "w" + std::to_string(rng.below(300));
    vocab.add(word);
    text += word + (i % 9 == 0 ? ",\n" : " ");
  }
  vocab.freeze();
  for (auto _ : state) benchmark::DoNotOptimize(corpus::tokenize(text, vocab));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_Tokenize);

}  // namespace

BENCHMARK_MAIN();
