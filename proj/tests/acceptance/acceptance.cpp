// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Library checks call core directly; end-to-end checks go
// through the command line in-process.

#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli/cli.hpp"
#include "json.hpp"
#include "lyrnet/ad/grad_check.hpp"
#include "lyrnet/ad/ops.hpp"
#include "lyrnet/corpus/labels.hpp"
#include "lyrnet/error.hpp"
#include "lyrnet/eval/metrics.hpp"
#include "lyrnet/eval/report.hpp"
#include "lyrnet/fetch/crawler.hpp"
#include "lyrnet/fetch/fixture_site.hpp"
#include "lyrnet/train/experiment.hpp"
#include "lyrnet/train/grad_cases.hpp"
#include "lyrnet/train/loss.hpp"
#include "lyrnet/train/trainer.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace {

using namespace lyrnet;
using Clock = std::chrono::steady_clock;
using nlohmann::json;
using lyrnet::testing::slurp;
using lyrnet::testing::TempDir;

struct Verdict {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

int lyrnet_cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  if (code != 0) std::cerr << "lyrnet " << args.front() << " exited " << code << ":\n" << e.str();
  return code;
}

Verdict gradient_integrity() {
  const auto start = Clock::now();
  auto cases = train::all_grad_cases(0);
  double worst = 0.0;
  std::vector<std::string> failed;
  for (const auto& r : ad::run_grad_checks(cases, 1e-4)) {
    worst = std::max(worst, r.max_rel_error);
    if (!r.passed) failed.push_back(r.name);
  }
  std::string table;
  const int code = lyrnet_cli({"gradcheck"}, &table);
  const double elapsed = seconds_since(start);
  Verdict v;
  v.pass = failed.empty() && code == 0 && elapsed < 60.0;
  v.detail = std::to_string(cases.size()) + " cases, worst rel err " + fmt(worst) + ", gradcheck exit " +
             std::to_string(code) + ", " + fmt(elapsed, 3) + " s";
  for (const auto& f : failed) v.detail += " FAILED:" + f;
  return v;
}

Verdict multi_task_loss_contract() {
  Verdict v;
  ad::Rng rng(1);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double lq = 3 * rng.uniform(), lv = 3 * rng.uniform(), la = 3 * rng.uniform();
    const train::Lambdas l{rng.uniform(), rng.uniform(), 0.01 + rng.uniform()};
    const double alpha = 5 * rng.uniform();
    const double base = train::multi_task_loss(lq, lv, la, l);
    const double scaled =
        train::multi_task_loss(lq, lv, la, train::Lambdas{alpha * l.quadrant, alpha * l.valence, alpha * l.arousal + 1e-300});
    worst = std::max(worst, std::abs(scaled - alpha * base));
  }
  v.pass = worst <= 1e-12;

  const auto data = lyrnet::testing::encoded_synthetic(2, 0);
  const auto model = train::initial_model(lyrnet::testing::toy_config(data.vocab.size()), 3);
  ad::Rng fwd(0);
  const auto logits = model.forward(data.documents[1].tokens, ad::Mode::eval, fwd);
  auto ce = [](const ad::Tensor& t, std::size_t target) {
    return ad::cross_entropy(ad::reshape(t, {1, t.dim(0)}), std::span<const std::size_t>(&target, 1));
  };
  const auto lq = ce(logits.quadrant, 1);
  const auto total = train::multi_task_loss(lq, ce(logits.valence, 1), ce(logits.arousal, 0), train::Lambdas{1, 0, 0});
  const bool exact = total.item() == lq.item();
  total.backward();
  bool masked_zero = true;
  for (const auto& p : model.parameters()) {
    if (p.name.starts_with("heads.valence") || p.name.starts_with("heads.arousal")) {
      for (double g : p.tensor.grad()) masked_zero = masked_zero && g == 0.0 && !std::signbit(g);
    }
  }
  v.pass = v.pass && exact && masked_zero;
  v.detail = "linearity worst " + fmt(worst) + ", single-task exact " + (exact ? "yes" : "no") +
             ", masked heads bit-zero " + (masked_zero ? "yes" : "no");
  return v;
}

Verdict metric_contract() {
  ad::Rng rng(7);
  double worst_macro = 0.0, worst_micro = 0.0, worst_acc = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(3), m = 1 + rng.below(80);
    std::vector<std::size_t> gold(m), pred(m);
    for (std::size_t i = 0; i < m; ++i) {
      gold[i] = rng.below(n);
      pred[i] = rng.uniform() < 0.6 ? gold[i] : rng.below(n);
    }
    const auto cm = eval::ConfusionMatrix::from_labels(n, gold, pred);
    const auto ref = lyrnet::testing::brute_force_f1(n, gold, pred);
    worst_macro = std::max(worst_macro, std::abs(eval::macro_f1(cm) - ref.macro_f1));
    worst_micro = std::max(worst_micro, std::abs(eval::micro_f1(cm) - ref.micro_f1));
    worst_acc = std::max(worst_acc, std::abs(eval::micro_f1(cm) - eval::accuracy(cm)));
  }
  const std::vector<std::size_t> gold{0, 0, 1, 1}, pred{0, 1, 1, 1};
  const auto hand = eval::ConfusionMatrix::from_labels(2, gold, pred);
  const double macro = eval::macro_f1(hand), micro = eval::micro_f1(hand);
  Verdict v;
  v.pass = worst_macro <= 1e-12 && worst_micro <= 1e-12 && worst_acc <= 1e-12 &&
           std::abs(macro - 11.0 / 15.0) <= 1e-12 && std::abs(micro - 0.75) <= 1e-12;
  v.detail = "1000 instances: macro " + fmt(worst_macro) + ", micro " + fmt(worst_micro) + ", micro-acc " +
             fmt(worst_acc) + "; hand case macro " + fmt(macro, 6) + " micro " + fmt(micro, 6);
  return v;
}

Verdict uniform_baseline() {
  const auto data = lyrnet::testing::encoded_synthetic(8, 0);
  const double expected = std::log(4.0) + 2.0 * std::log(2.0);
  Verdict v;
  v.detail = "expected " + fmt(expected) + ", got";
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto model = train::initial_model(lyrnet::testing::toy_config(data.vocab.size()), seed);
    const double loss = train::evaluate_loss(model, data.documents, train::TrainingConfig::scratch_preset()).loss;
    v.pass = v.pass && std::abs(loss - expected) <= 0.1 * expected;
    v.detail += " " + fmt(loss);
  }
  return v;
}

std::string generate_corpus(const TempDir& dir, const std::string& name, std::size_t per_quadrant) {
  const auto path = (dir / name).string();
  if (lyrnet_cli({"generate", "--out", path, "--n-per-quadrant", std::to_string(per_quadrant), "--seed", "0"}) != 0) {
    throw Error("generate failed");
  }
  return path;
}

Verdict overfit() {
  TempDir dir;
  const auto corpus = generate_corpus(dir, "overfit.jsonl", 8);
  const auto ckpt = (dir / "overfit.ckpt").string();
  const auto start = Clock::now();
  if (lyrnet_cli({"train", "--corpus", corpus, "--out", ckpt, "--epochs", "200", "--seed", "7"}) != 0) {
    return {false, "train failed"};
  }
  const double elapsed = seconds_since(start);
  const auto report_path = (dir / "overfit.report.json").string();
  if (lyrnet_cli({"evaluate", "--checkpoint", ckpt, "--corpus", corpus, "--out", report_path}) != 0) {
    return {false, "evaluate failed"};
  }
  std::string last_line, line;
  std::istringstream log(slurp(ckpt + ".log.jsonl"));
  while (std::getline(log, line)) last_line = line;
  const auto last = json::parse(last_line);
  const auto report = json::parse(slurp(report_path));
  Verdict v;
  v.pass = elapsed < 300.0 && last["epoch"] == 200;
  v.detail = "32 docs, 200 epochs in " + fmt(elapsed, 3) + " s; train acc";
  for (std::size_t t = 0; t < 3; ++t) {
    const double acc = last["train_accuracy"][t];
    v.pass = v.pass && acc == 1.0;
    v.detail += " " + fmt(acc);
  }
  v.detail += "; evaluated macro-F1";
  for (const char* task : {"quadrant", "valence", "arousal"}) {
    const double f1 = report["summary"][task]["macro_f1"];
    const double acc = report["summary"][task]["accuracy"];
    v.pass = v.pass && f1 == 1.0 && acc == 1.0;
    v.detail += " " + fmt(f1);
  }
  return v;
}

Verdict generalization() {
  corpus::SyntheticOptions opts;
  opts.n_per_quadrant = 100;
  const auto docs = corpus::generate_synthetic(opts);
  train::ExperimentConfig cfg;
  cfg.training = train::TrainingConfig::scratch_preset();
  cfg.training.epochs = 10;
  cfg.training.log_train_metrics = false;
  cfg.test_ratio = 0.2;
  cfg.split_seeds = {0, 1, 2};
  const auto start = Clock::now();
  const auto reports = train::multi_split_reports(docs, cfg);
  const auto agg = eval::multi_split_average(reports);
  const double mean = agg.get("quadrant", "macro_f1").mean;
  Verdict v;
  v.pass = docs.size() == 400 && mean >= 0.90;
  v.detail = "400 docs, 80/20, 3 splits, 10 epochs: quadrant macro-F1 mean " + fmt(mean) + " (std " +
             fmt(agg.get("quadrant", "macro_f1").stddev) + ") per split";
  for (const auto& r : reports) v.detail += " " + fmt(r.task("quadrant").macro_f1);
  v.detail += ", " + fmt(seconds_since(start), 3) + " s";
  return v;
}

Verdict ablation() {
  TempDir dir;
  const auto corpus = generate_corpus(dir, "ablate.jsonl", 100);
  const auto out = (dir / "ablation.md").string();
  if (lyrnet_cli({"ablate", "--corpus", corpus, "--out", out, "--seeds", "0,1,2", "--epochs", "10"}) != 0) {
    return {false, "ablate failed"};
  }
  std::istringstream md(slurp(out));
  std::vector<std::string> lines;
  for (std::string l; std::getline(md, l);) lines.push_back(l);
  const std::array<std::string, 3> rows{"Quadrant", "Valence", "Arousal"};
  bool layout = lines.size() == 5 && lines[0].find("Classification") != std::string::npos &&
                lines[0].find("Accuracy (Multi-Task)") != std::string::npos &&
                lines[0].find("Accuracy (Single-Task)") != std::string::npos &&
                lines[0].find("F1-score (Multi-Task)") != std::string::npos &&
                lines[0].find("F1-score (Single-Task)") != std::string::npos;
  for (std::size_t i = 0; layout && i < 3; ++i) layout = lines[2 + i].rfind("| " + rows[i] + " |", 0) == 0;

  const auto table = json::parse(slurp(out + ".json"));
  Verdict v;
  v.pass = layout;
  v.detail = std::string("layout ") + (layout ? "ok" : "MISMATCH") + "; accuracy gap (points)";
  for (const auto& row : table["rows"]) {
    const double gap = 100.0 * std::abs(row["multi_accuracy"].get<double>() - row["single_accuracy"].get<double>());
    v.pass = v.pass && gap <= 5.0;
    v.detail += " " + row["task"].get<std::string>() + " " + fmt(gap, 3);
  }
  return v;
}

Verdict crawler_coverage() {
  const auto catalog = fetch::make_fixture_catalog({});
  fetch::CrawlConfig cfg;
  cfg.host_interval = std::chrono::milliseconds(20);
  cfg.retry.base_delay = std::chrono::milliseconds(20);
  fetch::FixtureTransport transport(catalog.site);
  const auto start = Clock::now();
  const auto result = fetch::crawl_batch(catalog.queries, transport, cfg);
  const auto violations = fetch::count_interval_violations(transport.log(), cfg.host_interval);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    if (result.records[i].lyrics && *result.records[i].lyrics == catalog.expected_lyrics[i]) ++correct;
  }
  Verdict v;
  v.pass = catalog.queries.size() == 100 && catalog.misspelled.size() == 20 && catalog.broken.size() == 10 &&
           result.summary.coverage >= 0.99 && result.summary.baseline_coverage <= 0.80 && violations == 0 &&
           correct == result.summary.fetched;
  v.detail = "resolver " + fmt(100 * result.summary.coverage, 4) + "% vs direct " +
             fmt(100 * result.summary.baseline_coverage, 4) + "%, " + std::to_string(correct) +
             " with expected text, " + std::to_string(transport.request_count()) + " requests, " +
             std::to_string(violations) + " interval violations, " + fmt(seconds_since(start), 3) + " s";
  return v;
}

Verdict determinism() {
  TempDir dir;
  const auto corpus = generate_corpus(dir, "det.jsonl", 4);
  const auto queries = (dir / "queries.jsonl").string();
  if (lyrnet_cli({"generate", "--fixture-queries", "--songs", "20", "--misspelled", "4", "--broken", "2", "--out",
                  queries}) != 0) {
    return {false, "generate --fixture-queries failed"};
  }
  const std::vector<std::string> fetch_args{"fetch",         "--fixture", "--queries",       queries,
                                            "--interval-ms", "1",         "--retry-base-ms", "1", "--songs", "20", "--misspelled", "4", "--broken", "2"};
  for (const char* run : {"a", "b"}) {
    const auto p = [&](const std::string& name) { return (dir / (std::string(run) + name)).string(); };
    if (lyrnet_cli({"train", "--corpus", corpus, "--out", p(".ckpt"), "--epochs", "3", "--seed", "11"}) != 0 ||
        lyrnet_cli({"evaluate", "--checkpoint", p(".ckpt"), "--corpus", corpus, "--out", p(".report.json"),
                    "--predictions", p(".pred.jsonl")}) != 0) {
      return {false, "train/evaluate failed"};
    }
    auto args = fetch_args;
    args.insert(args.end(), {"--out", p(".records.jsonl")});
    if (lyrnet_cli(args) != 0) return {false, "fetch failed"};
  }
  Verdict v;
  std::size_t compared = 0;
  for (const char* suffix : {".ckpt", ".ckpt.log.jsonl", ".report.json", ".pred.jsonl", ".records.jsonl",
                             ".records.jsonl.summary.json"}) {
    const auto a = slurp(dir / (std::string("a") + suffix));
    const auto b = slurp(dir / (std::string("b") + suffix));
    if (a.empty() || a != b) {
      v.pass = false;
      v.detail += std::string(" differs:") + suffix;
    }
    ++compared;
  }
  v.detail = std::to_string(compared) + " artifact pairs compared (checkpoint, log, report, predictions, records, "
             "summary)" + v.detail;
  return v;
}

Verdict label_algebra() {
  using corpus::Quadrant;
  bool bijection = true;
  for (auto q : {Quadrant::Q1, Quadrant::Q2, Quadrant::Q3, Quadrant::Q4}) {
    const auto [val, aro] = corpus::hemispheres_of(q);
    bijection = bijection && corpus::quadrant_of(val, aro) == q;
  }
  std::size_t constructed = 0, rejected = 0;
  for (const char* q : {"Q1", "Q2", "Q3", "Q4"}) {
    for (const char* val : {"positive", "negative"}) {
      for (const char* aro : {"high", "low"}) {
        const auto label = corpus::label_from_fields(std::nullopt, std::string(val), std::string(aro), "probe");
        if (corpus::to_string(label->quadrant()) == q) continue;
        ++constructed;
        std::istringstream in(json({{"id", "r"}, {"lyrics", "x"}, {"quadrant", q}, {"valence", val}, {"arousal", aro}})
                                  .dump());
        try {
          corpus::parse_documents(in);
        } catch (const DataError&) {
          ++rejected;
        }
      }
    }
  }
  for (const char* lone : {R"({"id":"r","lyrics":"x","valence":"positive"})", R"({"id":"r","lyrics":"x","arousal":"low"})"}) {
    ++constructed;
    std::istringstream in(lone);
    try {
      corpus::parse_documents(in);
    } catch (const DataError&) {
      ++rejected;
    }
  }
  Verdict v;
  v.pass = bijection && constructed == 14 && rejected == constructed;
  v.detail = std::string("bijection ") + (bijection ? "holds" : "BROKEN") + "; rejected " + std::to_string(rejected) +
             "/" + std::to_string(constructed) + " inconsistent records";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"gradient-integrity", gradient_integrity},
      {"multi-task-loss-contract", multi_task_loss_contract},
      {"metric-contract", metric_contract},
      {"uniform-logit-baseline", uniform_baseline},
      {"overfit-oracle", overfit},
      {"generalization", generalization},
      {"ablation-table", ablation},
      {"crawler-coverage", crawler_coverage},
      {"determinism", determinism},
      {"label-algebra", label_algebra},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
