// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "lyrnet/ad/rng.hpp"
#include "lyrnet/error.hpp"
#include "lyrnet/eval/evaluate.hpp"
#include "lyrnet/eval/metrics.hpp"
#include "lyrnet/eval/report.hpp"
#include "lyrnet/train/experiment.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace lyrnet::eval {
namespace {

using Labels = std::vector<std::size_t>;

TEST(Metrics, HandEnumeratedCase) {
  const Labels gold{0, 0, 1, 1}, pred{0, 1, 1, 1};
  const auto cm = ConfusionMatrix::from_labels(2, gold, pred);
  const auto per_class = per_class_metrics(cm);
  EXPECT_NEAR(per_class[0].f1, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(per_class[1].f1, 0.8, 1e-15);
  EXPECT_NEAR(macro_f1(cm), (2.0 / 3.0 + 0.8) / 2.0, 1e-15);
  EXPECT_NEAR(micro_f1(cm), 0.75, 1e-15);
  EXPECT_EQ(accuracy(cm), 0.75);
}

TEST(Metrics, PerfectAndAllWrong) {
  for (std::size_t n : {2u, 3u, 4u, 7u}) {
    Labels gold(3 * n), wrong(3 * n);
    for (std::size_t i = 0; i < gold.size(); ++i) {
      gold[i] = i % n;
      wrong[i] = (i + 1) % n;
    }
    const auto perfect = ConfusionMatrix::from_labels(n, gold, gold);
    EXPECT_EQ(macro_f1(perfect), 1.0);
    EXPECT_EQ(micro_f1(perfect), 1.0);
    const auto bad = ConfusionMatrix::from_labels(n, gold, wrong);
    EXPECT_EQ(micro_f1(bad), 0.0);
    EXPECT_EQ(macro_f1(bad), 0.0);
  }
}

TEST(Metrics, AbsentClassContributesZero) {
  // Class 2 is configured but neither gold nor predicted.
  const Labels gold{0, 1}, pred{0, 1};
  const auto cm = ConfusionMatrix::from_labels(3, gold, pred);
  EXPECT_EQ(per_class_metrics(cm)[2].f1, 0.0);
  EXPECT_NEAR(macro_f1(cm), 2.0 / 3.0, 1e-15);
}

TEST(Metrics, EmptyMatrixIsContractError) {
  const ConfusionMatrix cm(4);
  EXPECT_THROW(macro_f1(cm), ContractError);
  EXPECT_THROW(micro_f1(cm), ContractError);
  EXPECT_THROW(accuracy(cm), ContractError);
}

TEST(MetricsProperty, AgreeWithBruteForceRecount) {
  ad::Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(5), m = 1 + rng.below(60);
    Labels gold(m), pred(m);
    for (std::size_t i = 0; i < m; ++i) {
      gold[i] = rng.below(n);
      pred[i] = rng.uniform() < 0.5 ? gold[i] : rng.below(n);
    }
    const auto cm = ConfusionMatrix::from_labels(n, gold, pred);
    const auto ref = lyrnet::testing::brute_force_f1(n, gold, pred);
    EXPECT_NEAR(macro_f1(cm), ref.macro_f1, 1e-12);
    EXPECT_NEAR(micro_f1(cm), ref.micro_f1, 1e-12);
    EXPECT_NEAR(micro_f1(cm), accuracy(cm), 1e-12);
    EXPECT_EQ(cm.total(), m);
    EXPECT_GE(macro_f1(cm), 0.0);
    EXPECT_LE(macro_f1(cm), 1.0);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    Labels pg(m), pp(m);
    for (std::size_t i = 0; i < m; ++i) {
      pg[i] = perm[gold[i]];
      pp[i] = perm[pred[i]];
    }
    EXPECT_NEAR(macro_f1(ConfusionMatrix::from_labels(n, pg, pp)), macro_f1(cm), 1e-12);
  }
}

TEST(MetricsProperty, MacroF1IsOneOnlyForDiagonalMatrices) {
  ad::Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(3);
    ConfusionMatrix cm(n);
    for (std::size_t c = 0; c < n; ++c) cm.add(c, c, 1 + rng.below(5));
    EXPECT_EQ(macro_f1(cm), 1.0);
    cm.add(rng.below(n), 0, 1);
    bool diagonal = true;
    for (std::size_t g = 0; g < n; ++g) {
      for (std::size_t p = 0; p < n; ++p) diagonal = diagonal && (g == p || cm.count(g, p) == 0);
    }
    EXPECT_EQ(macro_f1(cm) == 1.0, diagonal);
  }
}

EvaluationReport report_with_accuracy(std::size_t correct, std::size_t total) {
  EvaluationReport r;
  r.n_examples = total;
  const std::vector<std::pair<std::string, std::vector<std::string>>> tasks{
      {"quadrant", {"Q1", "Q2", "Q3", "Q4"}}, {"valence", {"positive", "negative"}}, {"arousal", {"high", "low"}}};
  for (const auto& [name, classes] : tasks) {
    ConfusionMatrix cm(classes.size());
    for (std::size_t i = 0; i < total; ++i) cm.add(i % 2, i < correct ? i % 2 : 1 - i % 2);
    r.tasks.push_back(make_task_report(name, classes, cm));
  }
  r.agreement_rate = double(correct) / double(total);
  return r;
}

TEST(MultiSplitAverage, SingletonAndTwoPoint) {
  const auto a = report_with_accuracy(8, 10), b = report_with_accuracy(9, 10);
  const std::vector<EvaluationReport> one{a};
  const auto single = multi_split_average(one);
  EXPECT_EQ(single.get("quadrant", "accuracy").mean, 0.8);
  EXPECT_EQ(single.get("quadrant", "accuracy").stddev, 0.0);
  EXPECT_EQ(single.get("valence", "macro_f1").mean, a.task("valence").macro_f1);

  const std::vector<EvaluationReport> two{a, b}, swapped{b, a};
  const auto agg = multi_split_average(two);
  EXPECT_NEAR(agg.get("arousal", "accuracy").mean, 0.85, 1e-15);
  EXPECT_NEAR(agg.get("arousal", "accuracy").stddev, 0.05, 1e-15);
  EXPECT_EQ(agg.n_reports, 2u);
  EXPECT_EQ(to_json(agg), to_json(multi_split_average(swapped)));
}

TEST(MultiSplitAverage, RejectsEmptyAndMismatched) {
  EXPECT_THROW(multi_split_average(std::vector<EvaluationReport>{}), ContractError);
  auto a = report_with_accuracy(8, 10), b = report_with_accuracy(8, 10);
  b.tasks.pop_back();
  EXPECT_THROW(multi_split_average(std::vector<EvaluationReport>{a, b}), ContractError);
}

TEST(Report, JsonRoundTripIsLossless) {
  ad::Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto total = 3 + rng.below(50);
    auto r = report_with_accuracy(rng.below(total + 1), total);
    r.agreement_rate = rng.uniform();
    const auto text = to_json(r);
    EXPECT_EQ(report_from_json(text), r);
    EXPECT_EQ(to_json(report_from_json(text)), text);
  }
  EXPECT_THROW(report_from_json("{\"tasks\": 3}"), DataError);
}

TEST(Report, SummaryCarriesRequiredFields) {
  const auto text = to_json(report_with_accuracy(7, 10));
  for (const char* key : {"\"summary\"", "\"accuracy\"", "\"precision\"", "\"recall\"", "\"macro_f1\""}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
}

TEST(Evaluate, DeterministicAndRejectsVocabularyMismatch) {
  const auto data = lyrnet::testing::encoded_synthetic(2, 4);
  const auto model = train::initial_model(lyrnet::testing::toy_config(data.vocab.size()), 1);
  const auto a = evaluate(model, data.vocab, data.documents);
  const auto b = evaluate(model, data.vocab, data.documents);
  EXPECT_EQ(to_json(a.report), to_json(b.report));
  EXPECT_EQ(a.predictions.size(), data.documents.size());
  EXPECT_EQ(a.report.n_examples, data.documents.size());
  for (const auto& t : a.report.tasks) EXPECT_NEAR(t.micro_f1, t.accuracy, 1e-12);

  corpus::Vocabulary other;
  other.add("extra");
  EXPECT_THROW(evaluate(model, other, data.documents), DataError);
}

TEST(Evaluate, EmptyDocumentIsFlaggedDegenerate) {
  const auto model = train::initial_model(lyrnet::testing::toy_config(10), 2);
  corpus::LyricsDocument doc;
  doc.id = "empty";
  const auto rec = predict_document(model, doc);
  EXPECT_TRUE(rec.degenerate);
  EXPECT_EQ(rec.logits[0].size(), 4u);
  EXPECT_EQ(rec.logits[1].size(), 2u);
  const auto line = to_jsonl(rec);
  EXPECT_NE(line.find("\"degenerate\":true"), std::string::npos) << line;
}

TEST(PredictionRecord, AgreementFollowsQuadrantConvention) {
  PredictionRecord rec;
  rec.predicted = {1, 1, 0};  // Q2 with negative valence, high arousal
  EXPECT_TRUE(rec.agreement());
  rec.predicted = {3, 1, 0};
  EXPECT_FALSE(rec.agreement());
}

}  // namespace
}  // namespace lyrnet::eval
