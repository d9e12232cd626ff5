// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

#include "lyrnet/ad/ops.hpp"
#include "lyrnet/ad/rng.hpp"
#include "lyrnet/ad/tensor.hpp"
#include "lyrnet/named_parameter.hpp"

namespace lyrnet::heads {

enum class SummaryMode { last_token, mean };

enum class Task { quadrant = 0, valence = 1, arousal = 2 };
inline constexpr std::array<Task, 3> kTasks{Task::quadrant, Task::valence, Task::arousal};

std::string_view task_name(Task task);
std::size_t task_classes(Task task);

struct HeadConfig {
  SummaryMode summary_mode = SummaryMode::last_token;
  std::size_t bottleneck_dim = 8;
  double dropout_p = 0.1;

  void validate() const;
};

/// Shared bottleneck plus one private classifier per task.
struct HeadParams {
  ad::Tensor bottleneck_w, bottleneck_b;  // [d_model, bottleneck], [bottleneck]
  ad::Tensor quadrant_w, quadrant_b;      // [bottleneck, 4], [4]
  ad::Tensor valence_w, valence_b;        // [bottleneck, 2], [2]
  ad::Tensor arousal_w, arousal_b;        // [bottleneck, 2], [2]
};

HeadParams init_head_parameters(const HeadConfig& config, std::size_t d_model, ad::Rng& rng);
std::size_t head_parameter_count(const HeadConfig& config, std::size_t d_model);

/// "heads.bottleneck.w", "heads.quadrant.w", ... in a fixed order.
ParameterList named_parameters(const HeadParams& params);

/// Name prefix owned exclusively by one task's classifier.
std::string_view task_parameter_prefix(Task task);

/// Reduces [seq_len, d_model] hidden states to one [d_model] vector.
///
/// `valid`, when non-empty, marks positions that count (pad positions are
/// false): last_token picks the last valid row, mean averages valid rows.
/// A sequence with no valid position falls back to using all rows.
ad::Tensor summarize(const ad::Tensor& hidden, SummaryMode mode, std::span<const bool> valid = {});

struct TaskLogits {
  ad::Tensor quadrant;  // [4]
  ad::Tensor valence;   // [2]
  ad::Tensor arousal;   // [2]

  const ad::Tensor& of(Task task) const;
};

/// summary -> dropout -> FC(d_model -> bottleneck) -> tanh -> three FC heads.
TaskLogits forward_heads(const ad::Tensor& summary, const HeadParams& params,
                         const HeadConfig& config, ad::Mode mode, ad::Rng& rng);

struct Prediction {
  std::size_t quadrant = 0;
  std::size_t valence = 0;
  std::size_t arousal = 0;

  std::size_t of(Task task) const;
  friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// First index of the maximum; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> values);

Prediction predict(const TaskLogits& logits);

}  // namespace lyrnet::heads
