// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/eval/metrics.hpp"

#include <string>

#include "lyrnet/error.hpp"

namespace lyrnet::eval {
namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

void require_examples(const ConfusionMatrix& m, const char* what) {
  if (m.total() == 0) throw ContractError(std::string(what) + ": empty confusion matrix");
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::size_t n_classes) : n_(n_classes), counts_(n_classes * n_classes, 0) {
  if (n_classes == 0) throw ContractError("ConfusionMatrix: n_classes must be positive");
}

ConfusionMatrix ConfusionMatrix::from_labels(std::size_t n_classes, std::span<const std::size_t> gold,
                                             std::span<const std::size_t> predicted) {
  if (gold.size() != predicted.size()) {
    throw ContractError("ConfusionMatrix: " + std::to_string(gold.size()) + " gold labels vs " +
                        std::to_string(predicted.size()) + " predictions");
  }
  ConfusionMatrix m(n_classes);
  for (std::size_t i = 0; i < gold.size(); ++i) m.add(gold[i], predicted[i]);
  return m;
}

void ConfusionMatrix::add(std::size_t gold, std::size_t predicted, std::size_t count) {
  if (gold >= n_ || predicted >= n_) {
    throw ContractError("ConfusionMatrix: class index out of range (gold " + std::to_string(gold) +
                        ", predicted " + std::to_string(predicted) + ", classes " +
                        std::to_string(n_) + ")");
  }
  counts_[gold * n_ + predicted] += count;
  total_ += count;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t c = 0; c < n_; ++c) t += count(c, c);
  return t;
}

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& m) {
  const std::size_t n = m.n_classes();
  std::vector<ClassMetrics> out(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t predicted = 0, gold = 0;
    for (std::size_t k = 0; k < n; ++k) {
      predicted += m.count(k, c);
      gold += m.count(c, k);
    }
    const auto tp = static_cast<double>(m.count(c, c));
    auto& r = out[c];
    r.precision = ratio(tp, static_cast<double>(predicted));
    r.recall = ratio(tp, static_cast<double>(gold));
    r.f1 = harmonic(r.precision, r.recall);
    r.support = gold;
  }
  return out;
}

double macro_f1(const ConfusionMatrix& m) {
  require_examples(m, "macro_f1");
  double total = 0.0;
  for (const auto& c : per_class_metrics(m)) total += c.f1;
  return total / static_cast<double>(m.n_classes());
}

double macro_precision(const ConfusionMatrix& m) {
  require_examples(m, "macro_precision");
  double total = 0.0;
  for (const auto& c : per_class_metrics(m)) total += c.precision;
  return total / static_cast<double>(m.n_classes());
}

double macro_recall(const ConfusionMatrix& m) {
  require_examples(m, "macro_recall");
  double total = 0.0;
  for (const auto& c : per_class_metrics(m)) total += c.recall;
  return total / static_cast<double>(m.n_classes());
}

double micro_precision(const ConfusionMatrix& m) {
  require_examples(m, "micro_precision");
  // Pooled TP / (TP + FP): every example is predicted exactly once.
  std::size_t tp = 0, predicted = 0;
  for (std::size_t c = 0; c < m.n_classes(); ++c) {
    tp += m.count(c, c);
    for (std::size_t g = 0; g < m.n_classes(); ++g) predicted += m.count(g, c);
  }
  return ratio(static_cast<double>(tp), static_cast<double>(predicted));
}

double micro_recall(const ConfusionMatrix& m) {
  require_examples(m, "micro_recall");
  std::size_t tp = 0, gold = 0;
  for (std::size_t c = 0; c < m.n_classes(); ++c) {
    tp += m.count(c, c);
    for (std::size_t p = 0; p < m.n_classes(); ++p) gold += m.count(c, p);
  }
  return ratio(static_cast<double>(tp), static_cast<double>(gold));
}

double micro_f1(const ConfusionMatrix& m) {
  return harmonic(micro_precision(m), micro_recall(m));
}

double accuracy(const ConfusionMatrix& m) {
  require_examples(m, "accuracy");
  return static_cast<double>(m.trace()) / static_cast<double>(m.total());
}

}  // namespace lyrnet::eval
