// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lyrnet/ad/grad_check.hpp"
#include "lyrnet/ad/ops.hpp"
#include "lyrnet/encoder/encoder.hpp"
#include "lyrnet/error.hpp"

namespace lyrnet::encoder {
namespace {

using ad::Tensor;
using Matrix = std::vector<std::vector<double>>;

Matrix to_matrix(const Tensor& t) {
  Matrix m(t.dim(0), std::vector<double>(t.dim(1)));
  for (std::size_t i = 0; i < t.dim(0); ++i) {
    for (std::size_t j = 0; j < t.dim(1); ++j) m[i][j] = t.at(i * t.dim(1) + j);
  }
  return m;
}

Matrix mm(const Matrix& a, const Matrix& b) {
  Matrix out(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

void norm_rows(Matrix& x, const Tensor& gain, const Tensor& bias) {
  for (auto& row : x) {
    double mu = 0.0, var = 0.0;
    for (double v : row) mu += v;
    mu /= row.size();
    for (double v : row) var += (v - mu) * (v - mu);
    var /= row.size();
    for (std::size_t i = 0; i < row.size(); ++i) {
      row[i] = gain.at(i) * (row[i] - mu) / std::sqrt(var + 1e-5) + bias.at(i);
    }
  }
}

// Loop-level relative-position encoder without memory, dropout or pads.
Matrix reference_encode(const EncoderConfig& c, const EncoderParams& p, const std::vector<std::size_t>& tokens) {
  const std::size_t n = tokens.size(), d = c.d_model, dh = c.d_head();
  Matrix x(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x[i][j] = p.embedding.at(tokens[i] * d + j);
  }
  for (const auto& L : p.layers) {
    const Matrix q = mm(x, to_matrix(L.w_query)), k = mm(x, to_matrix(L.w_key)), v = mm(x, to_matrix(L.w_value));
    const Matrix wr = to_matrix(L.w_position);
    Matrix merged(n, std::vector<double>(d, 0.0));
    for (std::size_t h = 0; h < c.n_heads; ++h) {
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> score(n);
        for (std::size_t j = 0; j < n; ++j) {
          const double offset = static_cast<double>(i) - static_cast<double>(j);
          std::vector<double> sinus(d);
          for (std::size_t col = 0; col < d; ++col) {
            const double freq = std::pow(10000.0, -static_cast<double>(2 * (col / 2)) / d);
            sinus[col] = col % 2 == 0 ? std::sin(offset * freq) : std::cos(offset * freq);
          }
          double s = 0.0;
          for (std::size_t e = 0; e < dh; ++e) {
            const std::size_t col = h * dh + e;
            double r = 0.0;
            for (std::size_t t = 0; t < d; ++t) r += sinus[t] * wr[t][col];
            s += (q[i][col] + L.content_bias.at(h * dh + e)) * k[j][col];
            s += (q[i][col] + L.position_bias.at(h * dh + e)) * r;
          }
          score[j] = s / std::sqrt(static_cast<double>(dh));
        }
        double mx = score[0], z = 0.0;
        for (double s : score) mx = std::max(mx, s);
        for (double& s : score) z += (s = std::exp(s - mx));
        for (std::size_t j = 0; j < n; ++j) {
          for (std::size_t e = 0; e < dh; ++e) merged[i][h * dh + e] += score[j] / z * v[j][h * dh + e];
        }
      }
    }
    Matrix h1 = mm(merged, to_matrix(L.w_output));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) h1[i][j] += x[i][j];
    }
    norm_rows(h1, L.attn_norm_gain, L.attn_norm_bias);
    Matrix ff = mm(h1, to_matrix(L.ff_w1));
    for (auto& row : ff) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        const double a = row[j] + L.ff_b1.at(j);
        row[j] = 0.5 * a * (1.0 + std::erf(a / std::sqrt(2.0)));
      }
    }
    Matrix out = mm(ff, to_matrix(L.ff_w2));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) out[i][j] += L.ff_b2.at(j) + h1[i][j];
    }
    norm_rows(out, L.ff_norm_gain, L.ff_norm_bias);
    x = std::move(out);
  }
  return x;
}

EncoderConfig small_config() {
  EncoderConfig c;
  c.n_layers = 2;
  c.n_heads = 2;
  c.d_model = 16;
  c.d_ff = 32;
  c.vocab_size = 50;
  c.dropout_p = 0.0;
  return c;
}

// Nonzero attention biases so every score term is exercised.
EncoderParams perturbed_params(const EncoderConfig& c, std::uint64_t seed) {
  ad::Rng rng(seed);
  auto p = init_parameters(c, rng);
  for (auto& L : p.layers) {
    for (auto* t : {&L.content_bias, &L.position_bias}) {
      for (auto& v : t->mutable_data()) v = rng.normal(0.0, 0.5);
    }
  }
  return p;
}

std::vector<std::size_t> random_tokens(ad::Rng& rng, std::size_t n, std::size_t vocab) {
  std::vector<std::size_t> out(n);
  for (auto& t : out) t = 2 + rng.below(vocab - 2);
  return out;
}

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

TEST(Encode, MatchesLoopReference) {
  const auto c = small_config();
  const auto p = perturbed_params(c, 3);
  ad::Rng rng(4);
  const auto tokens = random_tokens(rng, 9, c.vocab_size);
  const auto hidden = encode(c, p, tokens, nullptr, ad::Mode::eval, rng).hidden;
  const auto ref = reference_encode(c, p, tokens);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t j = 0; j < c.d_model; ++j) EXPECT_NEAR(hidden.at(i * c.d_model + j), ref[i][j], 1e-10);
  }
}

TEST(Encode, ZeroMemoryLengthIsExactDegenerateCase) {
  auto plain = small_config();
  auto recurrent = plain;
  recurrent.memory_len = 8;
  const auto p = perturbed_params(plain, 5);
  ad::Rng rng(6);
  const auto tokens = random_tokens(rng, 12, plain.vocab_size);
  ad::Rng r1(1), r2(1);
  const auto a = encode(plain, p, tokens, nullptr, ad::Mode::eval, r1);
  const auto b = encode(recurrent, p, tokens, nullptr, ad::Mode::eval, r2);
  EXPECT_EQ(values(a.hidden), values(b.hidden));
  EXPECT_TRUE(a.memory.empty());
  ASSERT_EQ(b.memory.layers.size(), plain.n_layers);
  // Memory handed to a config with memory_len 0 is ignored.
  ad::Rng r3(1);
  EXPECT_EQ(values(encode(plain, p, tokens, &b.memory, ad::Mode::eval, r3).hidden), values(a.hidden));
}

TEST(Encode, SingleTokenHasModelWidthAndIsFinite) {
  for (std::size_t heads : {1u, 2u, 4u}) {
    auto c = small_config();
    c.n_heads = heads;
    ad::Rng rng(heads);
    const auto p = init_parameters(c, rng);
    const std::vector<std::size_t> tokens{7};
    const auto h = encode(c, p, tokens, nullptr, ad::Mode::train, rng).hidden;
    EXPECT_EQ(h.shape(), (ad::Shape{1, c.d_model}));
    for (double v : h.data()) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(Encode, TwoSegmentsWithMemoryMatchSinglePass) {
  EncoderConfig c;
  c.n_layers = 1;
  c.dropout_p = 0.0;
  c.memory_len = 32;
  c.vocab_size = 100;
  const auto p = perturbed_params(c, 8);
  ad::Rng rng(9);
  const auto tokens = random_tokens(rng, 64, c.vocab_size);
  const std::vector<std::size_t> first(tokens.begin(), tokens.begin() + 32), second(tokens.begin() + 32, tokens.end());

  const auto full = encode(c, p, tokens, nullptr, ad::Mode::eval, rng).hidden;
  const auto seg1 = encode(c, p, first, nullptr, ad::Mode::eval, rng);
  ASSERT_EQ(seg1.memory.length(), 32u);
  const auto seg2 = encode(c, p, second, &seg1.memory, ad::Mode::eval, rng).hidden;
  double worst = 0.0;
  for (std::size_t i = 0; i < 32; ++i) {
    for (std::size_t j = 0; j < c.d_model; ++j) {
      worst = std::max(worst, std::abs(seg2.at(i * c.d_model + j) - full.at((32 + i) * c.d_model + j)));
    }
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(Encode, MemoryIsDetachedAndBoundedByMemoryLength) {
  auto c = small_config();
  c.memory_len = 5;
  ad::Rng rng(10);
  const auto p = init_parameters(c, rng);
  const auto tokens = random_tokens(rng, 3, c.vocab_size);
  const auto first = encode(c, p, tokens, nullptr, ad::Mode::eval, rng);
  EXPECT_EQ(first.memory.length(), 3u);
  const auto second = encode(c, p, tokens, &first.memory, ad::Mode::eval, rng);
  EXPECT_EQ(second.memory.length(), 5u);
  for (const auto& m : second.memory.layers) {
    EXPECT_EQ(m.dim(1), c.d_model);
    EXPECT_FALSE(m.requires_grad());
  }
  EXPECT_EQ(second.hidden.shape(), (ad::Shape{3, c.d_model}));
}

TEST(Encode, PositionOffsetLeavesOutputBitIdentical) {
  const auto c = small_config();
  const auto p = perturbed_params(c, 11);
  ad::Rng rng(12);
  const auto tokens = random_tokens(rng, 10, c.vocab_size);
  ad::Rng r1(0), r2(0);
  EXPECT_EQ(values(encode(c, p, tokens, nullptr, ad::Mode::eval, r1, 0).hidden),
            values(encode(c, p, tokens, nullptr, ad::Mode::eval, r2, 5).hidden));
}

TEST(Encode, RejectsOverLengthAndOutOfVocabulary) {
  auto c = small_config();
  c.max_seq_len = 4;
  ad::Rng rng(1);
  const auto p = init_parameters(c, rng);
  const std::vector<std::size_t> long_seq(5, 3);
  try {
    encode(c, p, long_seq, nullptr, ad::Mode::eval, rng);
    FAIL();
  } catch (const ContractError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("5"), std::string::npos);
    EXPECT_NE(what.find("4"), std::string::npos);
  }
  const std::vector<std::size_t> oov{3, 50};
  try {
    encode(c, p, oov, nullptr, ad::Mode::eval, rng);
    FAIL();
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("position 1"), std::string::npos) << e.what();
  }
}

TEST(EncoderConfig, RejectsWidthNotDivisibleByHeads) {
  auto c = small_config();
  c.n_heads = 3;
  EXPECT_THROW(c.validate(), ContractError);
}

TEST(InitParameters, CountMatchesIndependentFormula) {
  EncoderConfig c;
  c.n_layers = 2;
  c.n_heads = 2;
  c.d_model = 16;
  c.d_ff = 32;
  c.vocab_size = 100;
  // embedding 100*16; per layer: q,k,v,pos,out 5*256, two biases 2*2*8,
  // two norms 4*16, ff 16*32 + 32 + 32*16 + 16.
  const std::size_t expected = 1600 + 2 * (1280 + 32 + 64 + 1072);
  EXPECT_EQ(expected, 6496u);
  EXPECT_EQ(parameter_count(c), expected);
  ad::Rng rng(0);
  std::size_t built = 0;
  for (const auto& np : named_parameters(init_parameters(c, rng))) built += np.tensor.size();
  EXPECT_EQ(built, expected);
}

TEST(InitParameters, SameSeedIsBitIdentical) {
  const auto c = small_config();
  ad::Rng a(77), b(77);
  const auto pa = named_parameters(init_parameters(c, a));
  const auto pb = named_parameters(init_parameters(c, b));
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(values(pa[i].tensor), values(pb[i].tensor)) << pa[i].name;
}

TEST(InitParameters, GainsOneBiasesZeroWeightsSmall) {
  const auto c = small_config();
  ad::Rng rng(2);
  const auto p = init_parameters(c, rng);
  for (const auto& L : p.layers) {
    for (const auto* g : {&L.attn_norm_gain, &L.ff_norm_gain}) {
      for (double v : g->data()) EXPECT_EQ(v, 1.0);
    }
    for (const auto* b : {&L.attn_norm_bias, &L.ff_norm_bias, &L.ff_b1, &L.ff_b2, &L.content_bias, &L.position_bias}) {
      for (double v : b->data()) EXPECT_EQ(v, 0.0);
    }
  }
  double sq = 0.0;
  for (double v : p.embedding.data()) sq += v * v;
  EXPECT_NEAR(std::sqrt(sq / p.embedding.size()), 0.02, 0.002);
}

struct AttentionInputs {
  Tensor q, k, wr, u, v;
};

AttentionInputs random_attention(ad::Rng& rng, std::size_t q_len, std::size_t kv_len, std::size_t d, std::size_t h) {
  auto draw = [&](ad::Shape s) {
    std::vector<double> data(ad::numel(s));
    for (auto& x : data) x = rng.normal(0.0, 1.0);
    return Tensor::from(std::move(s), std::move(data), true);
  };
  return {draw({q_len, d}), draw({kv_len, d}), draw({d, d}), draw({h, d / h}), draw({h, d / h})};
}

TEST(AttentionScores, ConstantEqualQueriesAndKeysGiveUniformWeights) {
  const std::size_t n = 5, d = 4;
  const auto x = Tensor::full({n, d}, 0.7);
  const std::vector<std::int64_t> pos{0, 1, 2, 3, 4};
  const auto probs = attention_scores(x, x, Tensor::zeros({d, d}), Tensor::zeros({1, d}), Tensor::zeros({1, d}), 1,
                                      pos, pos);
  for (double p : probs.data()) EXPECT_NEAR(p, 1.0 / n, 1e-15);
}

TEST(AttentionScores, ShiftingPositionsIsBitExactNoOp) {
  ad::Rng rng(13);
  const auto a = random_attention(rng, 4, 6, 8, 2);
  const std::vector<std::int64_t> qp{2, 3, 4, 5}, kp{0, 1, 2, 3, 4, 5};
  std::vector<std::int64_t> qs = qp, ks = kp;
  for (auto& p : qs) p += 5;
  for (auto& p : ks) p += 5;
  EXPECT_EQ(values(attention_scores(a.q, a.k, a.wr, a.u, a.v, 2, qp, kp)),
            values(attention_scores(a.q, a.k, a.wr, a.u, a.v, 2, qs, ks)));
}

TEST(AttentionScoresProperty, RowsAreDistributions) {
  ad::Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t h = 1 + rng.below(3), d = h * (1 + rng.below(4));
    const std::size_t q_len = 1 + rng.below(6), m_len = rng.below(4), kv_len = q_len + m_len;
    const auto a = random_attention(rng, q_len, kv_len, d, h);
    std::vector<std::int64_t> qp(q_len), kp(kv_len);
    for (std::size_t i = 0; i < q_len; ++i) qp[i] = static_cast<std::int64_t>(m_len + i);
    for (std::size_t j = 0; j < kv_len; ++j) kp[j] = static_cast<std::int64_t>(j);
    const auto probs = attention_scores(a.q, a.k, a.wr, a.u, a.v, h, qp, kp);
    ASSERT_EQ(probs.shape(), (ad::Shape{h, q_len, kv_len}));
    for (std::size_t r = 0; r < h * q_len; ++r) {
      double s = 0.0;
      for (std::size_t j = 0; j < kv_len; ++j) s += probs.at(r * kv_len + j);
      EXPECT_NEAR(s, 1.0, 1e-6);
    }
  }
}

TEST(AttentionScores, GradientMatchesFiniteDifferences) {
  ad::Rng rng(15);
  const auto a = random_attention(rng, 4, 4, 8, 2);
  std::vector<Tensor> in{a.q, a.k, a.wr, a.u, a.v};
  std::vector<double> w(2 * 4 * 4);
  for (auto& x : w) x = rng.normal(0.0, 1.0);
  const auto weights = Tensor::from({2, 4, 4}, w);
  const std::vector<std::int64_t> pos{0, 1, 2, 3};
  const auto report = ad::grad_check(
      [&](std::span<const Tensor> x) {
        return ad::sum(ad::mul(attention_scores(x[0], x[1], x[2], x[3], x[4], 2, pos, pos), weights));
      },
      in);
  EXPECT_LT(report.worst(), 1e-4);
}

TEST(Encode, PadKeysReceiveNoAttention) {
  auto c = small_config();
  c.n_layers = 1;
  ad::Rng rng(16);
  const auto p = perturbed_params(c, 16);
  // Appending pads must not change the states of the real tokens.
  const std::vector<std::size_t> real{5, 9, 3}, padded{5, 9, 3, 0, 0};
  const auto a = encode(c, p, real, nullptr, ad::Mode::eval, rng).hidden;
  const auto b = encode(c, p, padded, nullptr, ad::Mode::eval, rng).hidden;
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.at(i), b.at(i), 1e-12);
}

TEST(EncodeProperty, GradientsAreFiniteOnRandomBatches) {
  const auto c = small_config();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ad::Rng rng(seed);
    auto p = init_parameters(c, rng);
    const auto tokens = random_tokens(rng, 1 + rng.below(20), c.vocab_size);
    ad::sum(ad::mul(encode(c, p, tokens, nullptr, ad::Mode::train, rng).hidden,
                    encode(c, p, tokens, nullptr, ad::Mode::eval, rng).hidden))
        .backward();
    for (const auto& np : named_parameters(p)) {
      for (double g : np.tensor.grad()) ASSERT_TRUE(std::isfinite(g)) << np.name;
    }
  }
}

}  // namespace
}  // namespace lyrnet::encoder
