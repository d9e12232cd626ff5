// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/train/adamw.hpp"

#include <cmath>

#include "lyrnet/error.hpp"

namespace lyrnet::train {

OptimizerState OptimizerState::for_parameters(const ParameterList& params) {
  OptimizerState s;
  for (const auto& p : params) {
    s.first_moment.emplace_back(p.tensor.size(), 0.0);
    s.second_moment.emplace_back(p.tensor.size(), 0.0);
  }
  return s;
}

void adamw_step(const ParameterList& params, OptimizerState& state, const AdamWConfig& config) {
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
    throw ContractError("adamw_step: optimizer state does not match parameter list");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& t = params[i].tensor;
    if (state.first_moment[i].size() != t.size() || state.second_moment[i].size() != t.size()) {
      throw ContractError("adamw_step: accumulator shape mismatch for " + params[i].name);
    }
    if (!t.has_grad()) continue;
    for (double g : t.grad()) {
      if (!std::isfinite(g)) {
        throw DivergenceError("non-finite gradient in parameter " + params[i].name);
      }
    }
  }

  const std::uint64_t t = ++state.step;
  const double bias1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
  const double bias2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    ad::Tensor tensor = params[i].tensor;
    auto w = tensor.mutable_data();
    const auto grad = tensor.has_grad() ? tensor.grad() : std::span<const double>{};
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double g = grad.empty() ? 0.0 : grad[k];
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g;
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g * g;
      const double m_hat = m[k] / bias1;
      const double v_hat = v[k] / bias2;
      w[k] = w[k] - config.learning_rate * (m_hat / (std::sqrt(v_hat) + config.eps)) -
             config.learning_rate * config.weight_decay * w[k];
    }
  }
}

}  // namespace lyrnet::train
