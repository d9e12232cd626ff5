// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lyrnet/eval/metrics.hpp"

namespace lyrnet::eval {

struct TaskReport {
  std::string task;
  std::vector<std::string> class_names;
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
  std::size_t n_examples = 0;
  ConfusionMatrix confusion{1};

  friend bool operator==(const TaskReport&, const TaskReport&) = default;
};

TaskReport make_task_report(std::string task, std::vector<std::string> class_names,
                            const ConfusionMatrix& confusion);

struct EvaluationReport {
  std::size_t n_examples = 0;
  std::vector<TaskReport> tasks;  // quadrant, valence, arousal
  /// Share of examples whose predicted quadrant matches the quadrant implied
  /// by the predicted valence and arousal hemispheres.
  double agreement_rate = 0.0;

  const TaskReport& task(std::string_view name) const;
  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

/// Fixed field order; doubles printed with round-trip precision. The
/// "summary" block carries exactly accuracy / precision / recall / macro_f1
/// per task (precision and recall macro-averaged); "tasks" has the rest.
std::string to_json(const EvaluationReport& report);
/// Inverse of to_json. Throws DataError on malformed input.
EvaluationReport report_from_json(std::string_view text);

struct MetricStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

struct AggregatedMetric {
  std::string task;
  std::string metric;
  MetricStats stats;
};

struct AggregatedReport {
  std::size_t n_reports = 0;
  std::vector<AggregatedMetric> metrics;  // task-major, fixed metric order
  MetricStats agreement_rate;

  const MetricStats& get(std::string_view task, std::string_view metric) const;
};

/// Mean and population standard deviation of each per-task metric
/// (accuracy, precision, recall, macro_f1, micro_f1) across reports.
/// Throws ContractError on an empty list or mismatched task structures.
AggregatedReport multi_split_average(std::span<const EvaluationReport> reports);

std::string to_json(const AggregatedReport& report);

}  // namespace lyrnet::eval
