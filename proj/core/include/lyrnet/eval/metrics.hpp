// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lyrnet::eval {

/// Square count matrix, rows = gold class, columns = predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes);
  static ConfusionMatrix from_labels(std::size_t n_classes, std::span<const std::size_t> gold,
                                     std::span<const std::size_t> predicted);

  void add(std::size_t gold, std::size_t predicted, std::size_t count = 1);

  std::size_t n_classes() const { return n_; }
  std::size_t count(std::size_t gold, std::size_t predicted) const { return counts_[gold * n_ + predicted]; }
  std::size_t total() const { return total_; }
  std::size_t trace() const;
  /// Row-major counts.
  const std::vector<std::size_t>& counts() const { return counts_; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold count

  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

/// One-vs-rest precision, recall and F1 for every configured class.
/// A zero denominator makes the ratio 0; F1 is 0 when P + R = 0.
std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& matrix);

/// Unweighted mean of per-class F1 over all configured classes.
/// Throws ContractError on an empty matrix (same for the functions below).
double macro_f1(const ConfusionMatrix& matrix);
double macro_precision(const ConfusionMatrix& matrix);
double macro_recall(const ConfusionMatrix& matrix);

/// Pooled precision / recall / F1. For single-label data all three equal accuracy.
double micro_precision(const ConfusionMatrix& matrix);
double micro_recall(const ConfusionMatrix& matrix);
double micro_f1(const ConfusionMatrix& matrix);
double accuracy(const ConfusionMatrix& matrix);

}  // namespace lyrnet::eval
