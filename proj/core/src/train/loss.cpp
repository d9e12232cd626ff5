// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/train/loss.hpp"

#include <cmath>
#include <string>

#include "lyrnet/ad/ops.hpp"
#include "lyrnet/error.hpp"

namespace lyrnet::train {

void Lambdas::validate() const {
  for (double l : as_array()) {
    if (!std::isfinite(l) || l < 0.0) {
      throw ContractError("lambdas must be finite and nonnegative, got " + std::to_string(l));
    }
  }
  if (quadrant == 0.0 && valence == 0.0 && arousal == 0.0) {
    throw ContractError("all task weights are zero: no trainable objective");
  }
}

ad::Tensor multi_task_loss(const ad::Tensor& quadrant_loss, const ad::Tensor& valence_loss,
                           const ad::Tensor& arousal_loss, const Lambdas& lambdas) {
  lambdas.validate();
  const std::array<const ad::Tensor*, 3> losses{&quadrant_loss, &valence_loss, &arousal_loss};
  const auto weights = lambdas.as_array();
  ad::Tensor total;
  for (std::size_t i = 0; i < 3; ++i) {
    if (weights[i] == 0.0) continue;
    const auto& l = *losses[i];
    if (l.size() != 1) throw ShapeError("multi_task_loss: task losses must be scalars");
    if (l.item() < 0.0) throw ContractError("multi_task_loss: negative task loss");
    const ad::Tensor term = ad::scale(l, weights[i]);
    total = total.defined() ? ad::add(total, term) : term;
  }
  return total;
}

double multi_task_loss(double quadrant_loss, double valence_loss, double arousal_loss,
                       const Lambdas& lambdas) {
  lambdas.validate();
  double total = 0.0;
  const double losses[] = {quadrant_loss, valence_loss, arousal_loss};
  const auto weights = lambdas.as_array();
  for (std::size_t i = 0; i < 3; ++i) {
    if (weights[i] != 0.0) total += weights[i] * losses[i];
  }
  return total;
}

}  // namespace lyrnet::train
