// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "lyrnet/ad/tensor.hpp"

namespace lyrnet::train {

/// Task weights (quadrant, valence, arousal).
struct Lambdas {
  double quadrant = 1.0;
  double valence = 1.0;
  double arousal = 1.0;

  std::array<double, 3> as_array() const { return {quadrant, valence, arousal}; }
  /// Throws ContractError if any weight is negative/non-finite or all are zero.
  void validate() const;
  friend bool operator==(const Lambdas&, const Lambdas&) = default;
};

/// lambda_q * l_q + lambda_v * l_v + lambda_a * l_a.
///
/// Terms with a zero weight are left out of the graph entirely, so the
/// parameters private to a masked task receive no gradient at all (not a
/// signed zero). With weights (1, 0, 0) the result equals l_q exactly.
ad::Tensor multi_task_loss(const ad::Tensor& quadrant_loss, const ad::Tensor& valence_loss,
                           const ad::Tensor& arousal_loss, const Lambdas& lambdas);

double multi_task_loss(double quadrant_loss, double valence_loss, double arousal_loss,
                       const Lambdas& lambdas);

}  // namespace lyrnet::train
