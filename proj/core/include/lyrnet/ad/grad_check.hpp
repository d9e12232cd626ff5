// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lyrnet/ad/tensor.hpp"

namespace lyrnet::ad {

using ScalarFn = std::function<Tensor(std::span<const Tensor>)>;

struct GradCheckReport {
  /// Max elementwise relative error for each input, in input order.
  std::vector<double> max_rel_error;

  double worst() const;
  bool passed(double tolerance) const { return worst() < tolerance; }
};

/// Compares reverse-mode gradients of scalar `f` against central
/// differences (f(x+h) - f(x-h)) / 2h, element by element.
///
/// Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor);
/// the floor keeps elements whose true gradient is zero from dividing
/// rounding noise by zero. Inputs are perturbed in place and restored.
/// Throws ContractError if `f` does not return a scalar.
GradCheckReport grad_check(const ScalarFn& f, std::span<Tensor> inputs, double step = 1e-5,
                           double floor = 1e-6);

/// A named, self-contained gradient-check instance.
struct GradCheckCase {
  std::string name;
  std::vector<Tensor> inputs;
  ScalarFn fn;
  /// Finite-difference step for this case; 0 uses the runner's default.
  double step = 0.0;
};

struct GradCheckOutcome {
  std::string name;
  double max_rel_error = 0.0;
  bool passed = false;
};

/// Cases covering every differentiable primitive, on random inputs in [-2, 2].
std::vector<GradCheckCase> primitive_grad_cases(std::uint64_t seed);

std::vector<GradCheckOutcome> run_grad_checks(std::span<GradCheckCase> cases, double tolerance,
                                              double step = 1e-5);

/// Wraps a case so that its output's backward rule scales the incoming
/// gradient by `factor`. Used to show that the checker catches broken rules.
GradCheckCase with_corrupted_backward(GradCheckCase base, double factor = 1.5);

}  // namespace lyrnet::ad
