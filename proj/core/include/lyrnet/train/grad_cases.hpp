// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "lyrnet/ad/grad_check.hpp"

namespace lyrnet::train {

/// Composite gradient checks over a small model: the relative attention
/// block, a full encoder (with and without segment memory), the head stack,
/// and the weighted multi-task loss in eval and train mode.
std::vector<ad::GradCheckCase> model_grad_cases(std::uint64_t seed);

/// Primitive cases followed by model_grad_cases.
std::vector<ad::GradCheckCase> all_grad_cases(std::uint64_t seed);

}  // namespace lyrnet::train
