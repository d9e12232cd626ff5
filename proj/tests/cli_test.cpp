// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cli/cli.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace lyrnet::cli {
namespace {

using lyrnet::testing::slurp;
using lyrnet::testing::TempDir;
using nlohmann::json;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus_ = (dir_ / "corpus.jsonl").string();
    ASSERT_EQ(invoke({"generate", "--out", corpus_, "--n-per-quadrant", "2", "--seed", "3"}).code, kOk);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Outcome train(const std::string& out, std::vector<std::string> extra = {}) const {
    std::vector<std::string> args{"train", "--corpus", corpus_, "--out", out, "--epochs", "2", "--seed", "5"};
    args.insert(args.end(), extra.begin(), extra.end());
    return invoke(args);
  }

  TempDir dir_;
  std::string corpus_;
};

TEST_F(CliTest, GenerateWritesCorpusAndManifest) {
  const auto text = slurp(corpus_);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 8);
  const auto manifest = json::parse(slurp(corpus_ + ".manifest.json"));
  EXPECT_EQ(manifest["subcommand"], "generate");
  EXPECT_EQ(manifest["seed"], 3);
  EXPECT_EQ(manifest["outputs"][0]["bytes"], slurp(corpus_).size());
}

TEST_F(CliTest, MissingCorpusIsUsageError) {
  const auto r = invoke({"train", "--corpus", path("nope.jsonl")});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("nope.jsonl"), std::string::npos) << r.err;
}

TEST_F(CliTest, ParseErrorsAndUnknownCommandsAreUsageErrors) {
  EXPECT_EQ(invoke({}).code, kUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, kUsage);
  EXPECT_EQ(invoke({"train", "--corpus", corpus_, "--epochs", "many"}).code, kUsage);
  EXPECT_EQ(invoke({"train", "--corpus", corpus_, "--lambdas", "0,0,0"}).code, kUsage);
  EXPECT_EQ(invoke({"--help"}).code, kOk);
}

TEST_F(CliTest, MalformedCorpusIsDataError) {
  std::ofstream(path("bad.jsonl")) << "{\"id\":\"a\",\"lyrics\":\"x\",\"quadrant\":\"Q1\",\"valence\":\"negative\"}\n";
  const auto r = invoke({"train", "--corpus", path("bad.jsonl"), "--out", path("m.ckpt")});
  EXPECT_EQ(r.code, kDataError) << r.err;
}

TEST_F(CliTest, TrainAndEvaluateAreByteIdenticalAcrossRuns) {
  ASSERT_EQ(train(path("a.ckpt")).code, kOk);
  ASSERT_EQ(train(path("b.ckpt")).code, kOk);
  EXPECT_EQ(slurp(path("a.ckpt")), slurp(path("b.ckpt")));
  EXPECT_EQ(slurp(path("a.ckpt.log.jsonl")), slurp(path("b.ckpt.log.jsonl")));

  for (const char* name : {"a", "b"}) {
    const auto r = invoke({"evaluate", "--checkpoint", path(std::string(name) + ".ckpt"), "--corpus", corpus_, "--out",
                           path(std::string(name) + ".json"), "--predictions", path(std::string(name) + ".pred.jsonl")});
    ASSERT_EQ(r.code, kOk) << r.err;
  }
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(slurp(path("a.pred.jsonl")), slurp(path("b.pred.jsonl")));

  const auto report = json::parse(slurp(path("a.json")));
  for (const char* task : {"quadrant", "valence", "arousal"}) {
    for (const char* field : {"accuracy", "precision", "recall", "macro_f1"}) {
      EXPECT_TRUE(report["summary"][task].contains(field)) << task << "." << field;
    }
  }
  const auto manifest = json::parse(slurp(path("a.ckpt.manifest.json")));
  EXPECT_EQ(manifest["config"]["task_mode"], "multi-task");
  EXPECT_EQ(manifest["config"]["epochs_run"], "2");
  EXPECT_EQ(manifest["seed"], 5);
}

TEST_F(CliTest, SingleTaskLambdasAreRecorded) {
  ASSERT_EQ(train(path("q.ckpt"), {"--lambdas", "1,0,0"}).code, kOk);
  const auto manifest = json::parse(slurp(path("q.ckpt.manifest.json")));
  EXPECT_EQ(manifest["config"]["task_mode"], "single-task:quadrant");
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  std::ofstream(path("cfg.json")) << R"({"train": {"epochs": 1, "batch_size": 4}, "encoder": {"d_model": 16}})";
  ASSERT_EQ(train(path("c.ckpt"), {"--config", path("cfg.json")}).code, kOk);
  const auto manifest = json::parse(slurp(path("c.ckpt.manifest.json")));
  EXPECT_EQ(manifest["config"]["epochs_run"], "2");  // --epochs 2 beats the file
  EXPECT_EQ(manifest["config"]["train.batch_size"], "4");
  EXPECT_EQ(manifest["config"]["encoder.d_model"], "16");
  std::ofstream(path("bad.json")) << R"({"train": {"no_such_key": 1}})";
  EXPECT_EQ(train(path("d.ckpt"), {"--config", path("bad.json")}).code, kUsage);
}

TEST_F(CliTest, PredictEmitsOneRecordPerInput) {
  ASSERT_EQ(train(path("m.ckpt")).code, kOk);
  const auto r = invoke({"predict", "--checkpoint", path("m.ckpt"), "--corpus", corpus_});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto rec = json::parse(line);
    for (const char* key : {"id", "predicted", "logits", "agreement", "degenerate"}) EXPECT_TRUE(rec.contains(key));
    EXPECT_EQ(rec["logits"]["quadrant"].size(), 4u);
    ++n;
  }
  EXPECT_EQ(n, 8u);

  const auto empty = invoke({"predict", "--checkpoint", path("m.ckpt"), "--text", ""});
  ASSERT_EQ(empty.code, kOk);
  EXPECT_TRUE(json::parse(empty.out)["degenerate"].get<bool>());
  EXPECT_FALSE(empty.err.empty());

  EXPECT_EQ(invoke({"predict", "--checkpoint", path("m.ckpt")}).code, kUsage);
  EXPECT_EQ(invoke({"predict", "--checkpoint", path("m.ckpt"), "--text", "a", "--corpus", corpus_}).code, kUsage);
  EXPECT_EQ(invoke({"predict", "--checkpoint", path("nope.ckpt"), "--text", "a"}).code, kUsage);
}

TEST_F(CliTest, CorruptCheckpointIsDataError) {
  std::ofstream(path("junk.ckpt")) << "not a checkpoint\n";
  EXPECT_EQ(invoke({"evaluate", "--checkpoint", path("junk.ckpt"), "--corpus", corpus_, "--out", path("r.json")}).code,
            kDataError);
}

TEST_F(CliTest, SplitAndImport) {
  ASSERT_EQ(invoke({"split", "--corpus", corpus_, "--ratios", "0.5,0.5", "--names", "a,b", "--out-dir", path("s")}).code,
            kOk);
  const auto half = slurp(path("s/a.jsonl"));
  EXPECT_EQ(std::count(half.begin(), half.end(), '\n'), 4);
  std::ofstream(path("d.csv")) << "artist,title,quadrant\nBeatles,Hey Jude,Q1\n";
  ASSERT_EQ(invoke({"import", "--csv", path("d.csv"), "--out", path("q.jsonl")}).code, kOk);
  EXPECT_NE(slurp(path("q.jsonl")).find("Hey Jude"), std::string::npos);
}

TEST_F(CliTest, FixtureFetchIsDeterministic) {
  ASSERT_EQ(invoke({"generate", "--fixture-queries", "--songs", "6", "--misspelled", "2", "--broken", "1", "--out",
                    path("queries.jsonl")})
                .code,
            kOk);
  const std::vector<std::string> base{"fetch",         "--fixture", "--queries",       path("queries.jsonl"),
                                      "--interval-ms", "1",         "--retry-base-ms", "1", "--songs", "6", "--misspelled", "2", "--broken", "1"};
  auto with_out = [&](const std::string& out) {
    auto args = base;
    args.insert(args.end(), {"--out", out});
    return invoke(args);
  };
  ASSERT_EQ(with_out(path("f1.jsonl")).code, kOk);
  ASSERT_EQ(with_out(path("f2.jsonl")).code, kOk);
  EXPECT_EQ(slurp(path("f1.jsonl")), slurp(path("f2.jsonl")));
  const auto summary = json::parse(slurp(path("f1.jsonl.summary.json")));
  EXPECT_EQ(summary["fetched"], 6);
}

TEST_F(CliTest, GradcheckPassesAndCatchesCorruption) {
  const auto ok = invoke({"gradcheck"});
  EXPECT_EQ(ok.code, kOk) << ok.err;
  EXPECT_NE(ok.out.find("PASS"), std::string::npos);
  const auto bad = invoke({"gradcheck", "--corrupt-op", "matmul"});
  EXPECT_EQ(bad.code, kGradcheckFailed);
  EXPECT_NE(bad.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(invoke({"gradcheck", "--corrupt-op", "no_such_op"}).code, kUsage);
}

}  // namespace
}  // namespace lyrnet::cli
