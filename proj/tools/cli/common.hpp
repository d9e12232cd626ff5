// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lyrnet/error.hpp"
#include "lyrnet/model.hpp"
#include "lyrnet/train/config_io.hpp"
#include "lyrnet/train/trainer.hpp"

namespace CLI {
class App;
}

namespace lyrnet::cli {

/// Bad arguments or unusable input paths; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A command that ran but reports failure through its exit code.
class CommandFailed : public Error {
 public:
  CommandFailed(int code, const std::string& what) : Error(what), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

struct Io {
  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> args;
};

using Action = std::function<void(Io&)>;

// Each registers a subcommand whose parse callback stores the action to run.

void setup_generate(CLI::App& app, Action& action);
void setup_import(CLI::App& app, Action& action);
void setup_split(CLI::App& app, Action& action);
void setup_fetch(CLI::App& app, Action& action);
void setup_train(CLI::App& app, Action& action);
void setup_evaluate(CLI::App& app, Action& action);
void setup_predict(CLI::App& app, Action& action);
void setup_ablate(CLI::App& app, Action& action);
void setup_gradcheck(CLI::App& app, Action& action);

/// Flat JSON object of scalars, values rendered as text. Throws UsageError.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Applies model/training keys of a config file; other sections are left to
/// their commands. Unknown model/training keys are a UsageError.
void apply_model_config(const std::map<std::string, std::string>& entries, ModelConfig& model,
                        train::TrainingConfig& training);

/// "q,v,a" -> Lambdas. Throws UsageError.
train::Lambdas parse_lambdas(const std::string& text);

void require_file(const std::filesystem::path& path, const std::string& what);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& content);

/// Audit record written as `<primary output>.manifest.json`.
class RunManifest {
 public:
  RunManifest(std::string subcommand, std::vector<std::string> args);

  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void set_config(train::ConfigEntries entries) { config_ = std::move(entries); }
  void add_config(const std::string& key, const std::string& value) { config_.emplace_back(key, value); }
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);

  /// Checksums every output and writes the manifest next to `primary`.
  std::filesystem::path write_beside(const std::filesystem::path& primary);

 private:
  std::string subcommand_;
  std::vector<std::string> args_;
  std::optional<std::uint64_t> seed_;
  train::ConfigEntries config_;
  std::vector<std::filesystem::path> inputs_, outputs_;
  std::string started_at_;
};

std::string utc_timestamp();

}  // namespace lyrnet::cli
