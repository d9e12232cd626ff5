// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "lyrnet/named_parameter.hpp"

namespace lyrnet::train {

struct AdamWConfig {
  double learning_rate = 2e-5;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Moment accumulators mirroring a parameter list, plus the step counter.
struct OptimizerState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::uint64_t step = 0;

  static OptimizerState for_parameters(const ParameterList& params);
};

/// One AdamW update from the gradients stored on `params` (a parameter
/// without a gradient buffer counts as zero gradient):
///
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
///   w <- w - lr * m_hat / (sqrt(v_hat) + eps) - lr * wd * w
///
/// with bias-corrected m_hat, v_hat. Throws DivergenceError naming the first
/// parameter holding a non-finite gradient, before anything is modified.
void adamw_step(const ParameterList& params, OptimizerState& state, const AdamWConfig& config);

}  // namespace lyrnet::train
