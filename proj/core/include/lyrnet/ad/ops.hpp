// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lyrnet/ad/rng.hpp"
#include "lyrnet/ad/tensor.hpp"

namespace lyrnet::ad {

enum class Mode { train, eval };

/// [m,k] x [k,n] -> [m,n]. Throws ShapeError naming both shapes.
Tensor matmul(const Tensor& a, const Tensor& b);

/// Elementwise sum. `b` may also be a rank-1 tensor matching the last
/// dimension of `a`, in which case it is broadcast over rows (bias add).
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);

/// Exact (erf-based) Gaussian error linear unit.
Tensor gelu(const Tensor& x);
Tensor tanh(const Tensor& x);

/// Softmax along `axis` (negative counts from the back). Max-subtracted.
Tensor softmax(const Tensor& x, int axis = -1);

/// Mean over the batch of -log softmax(logits)[row, target]. logits: [batch, classes].
Tensor cross_entropy(const Tensor& logits, std::span<const std::size_t> targets);

/// Normalizes over the last dimension, then applies gain and bias.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5);

/// Inverted dropout. Eval mode and p == 0 return `x` itself.
Tensor dropout(const Tensor& x, double p, Mode mode, Rng& rng);

/// Rows of `table` ([vocab, d]) selected by `ids` -> [ids.size(), d].
Tensor embedding_lookup(const Tensor& table, std::span<const std::size_t> ids);

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
Tensor reshape(const Tensor& x, Shape shape);
/// 2-D transpose.
Tensor transpose(const Tensor& x);
/// Half-open range [begin, end) along `axis`.
Tensor slice(const Tensor& x, std::size_t axis, std::size_t begin, std::size_t end);

/// out[i, j] = x[i, index[i * cols + j]] for x of shape [m, n] -> [m, cols].
Tensor gather_columns(const Tensor& x, std::span<const std::size_t> index, std::size_t cols);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
/// [m, n] -> [n], average over rows.
Tensor mean_rows(const Tensor& x);

}  // namespace lyrnet::ad
