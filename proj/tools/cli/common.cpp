// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli/common.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lyrnet/train/checkpoint.hpp"

namespace lyrnet::cli {
namespace {

using nlohmann::json;

void flatten(const json& node, const std::string& prefix, std::map<std::string, std::string>& out,
             const std::string& source) {
  for (const auto& [key, value] : node.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      flatten(value, name, out, source);
    } else if (value.is_string()) {
      out[name] = value.get<std::string>();
    } else if (value.is_null()) {
      out[name] = "none";
    } else if (value.is_boolean() || value.is_number()) {
      out[name] = value.dump();
    } else {
      throw UsageError(source + ": value of '" + name + "' must be a scalar");
    }
  }
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  require_file(path, "config file");
  const std::string source = path.string();
  json root;
  try {
    root = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw UsageError(source + ": " + e.what());
  }
  if (!root.is_object()) throw UsageError(source + ": config must be a JSON object");
  std::map<std::string, std::string> entries;
  flatten(root, "", entries, source);
  return entries;
}

void apply_model_config(const std::map<std::string, std::string>& entries, ModelConfig& model,
                        train::TrainingConfig& training) {
  for (const auto& [key, value] : entries) {
    if (key.rfind("fetch.", 0) == 0) continue;
    try {
      train::apply_config_entry(key, value, model, training);
    } catch (const InvalidParameterError& e) {
      throw UsageError(std::string("config: ") + e.what());
    }
  }
}

train::Lambdas parse_lambdas(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError("--lambdas: '" + part + "' is not a number");
    }
  }
  if (values.size() != 3) throw UsageError("--lambdas expects three comma-separated weights q,v,a");
  train::Lambdas lambdas{values[0], values[1], values[2]};
  try {
    lambdas.validate();
  } catch (const ContractError& e) {
    throw UsageError(std::string("--lambdas: ") + e.what());
  }
  return lambdas;
}

void require_file(const std::filesystem::path& path, const std::string& what) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw UsageError(what + " not found: " + path.string());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.flush();
  if (!out) throw Error("cannot write " + path.string());
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest::RunManifest(std::string subcommand, std::vector<std::string> args)
    : subcommand_(std::move(subcommand)), args_(std::move(args)), started_at_(utc_timestamp()) {}

void RunManifest::add_input(const std::filesystem::path& path) { inputs_.push_back(path); }
void RunManifest::add_output(const std::filesystem::path& path) { outputs_.push_back(path); }

std::filesystem::path RunManifest::write_beside(const std::filesystem::path& primary) {
  json doc = json::object();
  doc["subcommand"] = subcommand_;
  doc["argv"] = args_;
  json config = json::object();
  for (const auto& [key, value] : config_) config[key] = value;
  doc["config"] = config;
  doc["seed"] = seed_ ? json(*seed_) : json(nullptr);
  json inputs = json::array();
  for (const auto& p : inputs_) inputs.push_back(p.string());
  doc["inputs"] = inputs;
  json outputs = json::array();
  for (const auto& p : outputs_) {
    const std::string bytes = read_text(p);
    char crc[9];
    std::snprintf(crc, sizeof crc, "%08x", train::crc32_of(bytes));
    outputs.push_back({{"path", p.string()}, {"bytes", bytes.size()}, {"crc32", crc}});
  }
  doc["outputs"] = outputs;
  doc["started_at"] = started_at_;
  doc["finished_at"] = utc_timestamp();

  std::filesystem::path manifest = primary;
  manifest += ".manifest.json";
  write_text(manifest, doc.dump(2) + "\n");
  return manifest;
}

}  // namespace lyrnet::cli
