// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

// generate, import, split and fetch.

#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cli/common.hpp"
#include "lyrnet/corpus/split.hpp"
#include "lyrnet/corpus/synthetic.hpp"
#include "lyrnet/fetch/crawler.hpp"
#include "lyrnet/fetch/fixture_site.hpp"

namespace lyrnet::cli {
namespace {

std::string queries_jsonl(const std::vector<fetch::SongQuery>& queries) {
  std::string text;
  for (const auto& q : queries) text += fetch::to_jsonl(q) + "\n";
  return text;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& flag) {
  std::vector<T> values;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if constexpr (std::is_same_v<T, std::string>) {
      values.push_back(part);
    } else {
      try {
        std::size_t used = 0;
        const double v = std::stod(part, &used);
        if (used != part.size()) throw std::invalid_argument(part);
        values.push_back(static_cast<T>(v));
      } catch (const std::exception&) {
        throw UsageError(flag + ": '" + part + "' is not a number");
      }
    }
  }
  return values;
}

// ---- generate ----

struct GenerateOptions {
  std::string out;
  std::size_t n_per_quadrant = 8;
  std::size_t vocab_size = 200;
  std::size_t keywords_per_doc = 8;
  std::size_t filler_per_doc = 12;
  std::uint64_t seed = 0;
  bool fixture_queries = false;
  std::size_t songs = 100, misspelled = 20, broken = 10;
};

void run_generate(const GenerateOptions& o, Io& io) {
  RunManifest manifest("generate", io.args);
  manifest.set_seed(o.seed);
  const std::filesystem::path out = o.out;
  if (o.fixture_queries) {
    fetch::FixtureCatalogOptions opt;
    opt.n_songs = o.songs;
    opt.n_misspelled = o.misspelled;
    opt.n_broken = o.broken;
    opt.seed = o.seed;
    const auto catalog = fetch::make_fixture_catalog(opt);
    write_text(out, queries_jsonl(catalog.queries));
    manifest.add_config("fixture.songs", std::to_string(o.songs));
    manifest.add_config("fixture.misspelled", std::to_string(o.misspelled));
    manifest.add_config("fixture.broken", std::to_string(o.broken));
    io.err << "wrote " << catalog.queries.size() << " fixture queries to " << out.string() << "\n";
  } else {
    corpus::SyntheticOptions opt;
    opt.n_per_quadrant = o.n_per_quadrant;
    opt.vocab_size = o.vocab_size;
    opt.keywords_per_doc = o.keywords_per_doc;
    opt.filler_per_doc = o.filler_per_doc;
    opt.seed = o.seed;
    const auto docs = corpus::generate_synthetic(opt);
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    corpus::write_documents(out, docs);
    manifest.add_config("synthetic.n_per_quadrant", std::to_string(o.n_per_quadrant));
    manifest.add_config("synthetic.vocab_size", std::to_string(o.vocab_size));
    manifest.add_config("synthetic.keywords_per_doc", std::to_string(o.keywords_per_doc));
    manifest.add_config("synthetic.filler_per_doc", std::to_string(o.filler_per_doc));
    io.err << "wrote " << docs.size() << " documents to " << out.string() << "\n";
  }
  manifest.add_output(out);
  manifest.write_beside(out);
}

// ---- import ----

struct ImportOptions {
  std::string csv, records, out;
};

void run_import(const ImportOptions& o, Io& io) {
  RunManifest manifest("import", io.args);
  const std::filesystem::path out = o.out;
  if (!o.csv.empty()) {
    require_file(o.csv, "CSV file");
    std::ifstream in(o.csv, std::ios::binary);
    const auto queries = fetch::parse_queries_csv(in, o.csv);
    write_text(out, queries_jsonl(queries));
    manifest.add_input(o.csv);
    io.err << "imported " << queries.size() << " queries\n";
  } else {
    require_file(o.records, "records file");
    std::ifstream in(o.records, std::ios::binary);
    const auto records = fetch::parse_records(in, o.records);
    const auto docs = fetch::documents_from_records(records);
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    corpus::write_documents(out, docs);
    manifest.add_input(o.records);
    io.err << "imported " << docs.size() << " of " << records.size() << " records (fetched only)\n";
  }
  manifest.add_output(out);
  manifest.write_beside(out);
}

// ---- split ----

struct SplitOptions {
  std::string corpus, ratios = "0.8,0.2", names = "train,test", out_dir;
  std::uint64_t seed = 0;
};

void run_split(const SplitOptions& o, Io& io) {
  require_file(o.corpus, "corpus");
  const auto ratios = parse_list<double>(o.ratios, "--ratios");
  const auto names = parse_list<std::string>(o.names, "--names");
  if (ratios.size() != names.size()) throw UsageError("--ratios and --names must have the same length");
  std::vector<corpus::SplitSpec> specs;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (names[i].empty()) throw UsageError("--names: empty split name");
    specs.push_back({names[i], ratios[i]});
  }

  std::ifstream in(o.corpus, std::ios::binary);
  const auto docs = corpus::parse_documents(in, o.corpus);
  const auto splits = corpus::split_corpus(docs, specs, o.seed);

  RunManifest manifest("split", io.args);
  manifest.set_seed(o.seed);
  manifest.add_input(o.corpus);
  const std::filesystem::path dir = o.out_dir;
  std::filesystem::create_directories(dir);
  for (const auto& s : splits) {
    const auto path = dir / (s.name + ".jsonl");
    corpus::write_documents(path, s.documents);
    manifest.add_output(path);
    io.err << s.name << ": " << s.documents.size() << " documents\n";
  }
  manifest.write_beside(dir / "split");
}

// ---- fetch ----

struct FetchOptions {
  std::string queries, out, config, cache_dir;
  bool fixture = false;
  std::uint64_t fixture_seed = 0;
  std::size_t songs = 100, misspelled = 20, broken = 10;
  std::optional<std::size_t> interval_ms, max_in_flight, retries, retry_base_ms;
  bool no_baseline = false;
};

std::size_t to_count(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw UsageError("config: " + key + " expects a non-negative integer, got '" + value + "'");
  }
}

void apply_fetch_entry(const std::string& key, const std::string& value, fetch::CrawlConfig& cfg) {
  if (key == "fetch.max_in_flight") {
    cfg.max_in_flight = to_count(key, value);
  } else if (key == "fetch.host_interval_ms") {
    cfg.host_interval = std::chrono::milliseconds(to_count(key, value));
  } else if (key == "fetch.retry_attempts") {
    cfg.retry.max_attempts = to_count(key, value);
  } else if (key == "fetch.retry_base_ms") {
    cfg.retry.base_delay = std::chrono::milliseconds(to_count(key, value));
  } else if (key == "fetch.retry_factor" || key == "fetch.threshold") {
    double v = 0.0;
    try {
      v = std::stod(value);
    } catch (const std::exception&) {
      throw UsageError("config: " + key + " expects a number");
    }
    (key == "fetch.threshold" ? cfg.threshold : cfg.retry.factor) = v;
  } else if (key == "fetch.cache_dir") {
    cfg.cache_dir = value;
  } else if (key == "fetch.search_url_template") {
    cfg.profile.search_url_template = value;
  } else if (key == "fetch.result_selector") {
    cfg.profile.result_selector = value;
  } else if (key == "fetch.result_attribute") {
    cfg.profile.result_attribute = value;
  } else if (key == "fetch.lyrics_selector") {
    cfg.profile.lyrics_selector = value;
  } else {
    throw UsageError("config: unknown key " + key);
  }
}

std::vector<std::pair<std::string, std::string>> crawl_entries(const fetch::CrawlConfig& c) {
  return {
      {"fetch.max_in_flight", std::to_string(c.max_in_flight)},
      {"fetch.host_interval_ms", std::to_string(c.host_interval.count())},
      {"fetch.retry_attempts", std::to_string(c.retry.max_attempts)},
      {"fetch.retry_base_ms", std::to_string(c.retry.base_delay.count())},
      {"fetch.retry_factor", train::format_real(c.retry.factor)},
      {"fetch.threshold", train::format_real(c.threshold)},
      {"fetch.cache_dir", c.cache_dir ? c.cache_dir->string() : "none"},
      {"fetch.search_url_template", c.profile.search_url_template},
      {"fetch.result_selector", c.profile.result_selector},
      {"fetch.result_attribute", c.profile.result_attribute},
      {"fetch.lyrics_selector", c.profile.lyrics_selector},
      {"fetch.baseline", c.compute_baseline ? "true" : "false"},
  };
}

void run_fetch(const FetchOptions& o, Io& io) {
  require_file(o.queries, "queries file");
  RunManifest manifest("fetch", io.args);
  manifest.add_input(o.queries);

  fetch::CrawlConfig cfg;
  if (!o.config.empty()) {
    for (const auto& [key, value] : read_config_file(o.config)) {
      if (key.rfind("fetch.", 0) == 0) apply_fetch_entry(key, value, cfg);
    }
    manifest.add_input(o.config);
  }
  if (const char* env = std::getenv("LYRNET_CACHE_DIR"); env != nullptr && *env != '\0') cfg.cache_dir = env;
  if (!o.cache_dir.empty()) cfg.cache_dir = o.cache_dir;
  if (o.interval_ms) cfg.host_interval = std::chrono::milliseconds(*o.interval_ms);
  if (o.max_in_flight) cfg.max_in_flight = *o.max_in_flight;
  if (o.retries) cfg.retry.max_attempts = *o.retries;
  if (o.retry_base_ms) cfg.retry.base_delay = std::chrono::milliseconds(*o.retry_base_ms);
  if (o.no_baseline) cfg.compute_baseline = false;
  try {
    cfg.validate();
  } catch (const ContractError& e) {
    throw UsageError(std::string("fetch config: ") + e.what());
  }

  std::vector<fetch::SongQuery> queries;
  {
    std::ifstream in(o.queries, std::ios::binary);
    queries = fetch::parse_queries(in, o.queries);
  }
  if (queries.empty()) throw DataError(o.queries + ": no queries");

  std::unique_ptr<fetch::Transport> transport;
  if (o.fixture) {
    fetch::FixtureCatalogOptions opt;
    opt.n_songs = o.songs;
    opt.n_misspelled = o.misspelled;
    opt.n_broken = o.broken;
    opt.seed = o.fixture_seed;
    transport = std::make_unique<fetch::FixtureTransport>(fetch::make_fixture_catalog(opt).site);
    manifest.set_seed(o.fixture_seed);
    manifest.add_config("transport", "fixture");
  } else {
    transport = std::make_unique<fetch::HttpTransport>();
    manifest.add_config("transport", "http");
  }
  for (const auto& [k, v] : crawl_entries(cfg)) manifest.add_config(k, v);

  io.err << "fetching " << queries.size() << " songs (" << cfg.max_in_flight << " in flight, "
         << cfg.host_interval.count() << " ms per host)\n";
  const auto result = fetch::crawl_batch(queries, *transport, cfg);

  const std::filesystem::path out = o.out;
  std::string records;
  for (const auto& r : result.records) records += fetch::to_jsonl(r) + "\n";
  write_text(out, records);
  std::filesystem::path summary = out;
  summary += ".summary.json";
  write_text(summary, fetch::summary_json(result.summary) + "\n");
  manifest.add_output(out);
  manifest.add_output(summary);
  manifest.write_beside(out);

  const auto& s = result.summary;
  io.err << "coverage " << s.fetched << "/" << s.total;
  if (cfg.compute_baseline) io.err << ", direct-URL baseline " << s.baseline_fetched << "/" << s.total;
  io.err << ", " << s.network_requests << " requests, " << s.cache_hits << " cache hits\n";
}

}  // namespace

void setup_generate(CLI::App& app, Action& action) {
  auto o = std::make_shared<GenerateOptions>();
  auto* sub = app.add_subcommand("generate", "Write a synthetic separable corpus (or fixture crawl queries)");
  sub->add_option("--out", o->out, "Output JSONL path")->required();
  sub->add_option("--n-per-quadrant", o->n_per_quadrant, "Documents per quadrant")->capture_default_str();
  sub->add_option("--vocab-size", o->vocab_size, "Distinct content words")->capture_default_str();
  sub->add_option("--keywords-per-doc", o->keywords_per_doc)->capture_default_str();
  sub->add_option("--filler-per-doc", o->filler_per_doc)->capture_default_str();
  sub->add_option("--seed", o->seed)->capture_default_str();
  sub->add_flag("--fixture-queries", o->fixture_queries, "Write the fixture site's crawl queries instead");
  sub->add_option("--songs", o->songs, "Fixture songs")->capture_default_str();
  sub->add_option("--misspelled", o->misspelled, "Fixture queries with a misspelled artist")->capture_default_str();
  sub->add_option("--broken", o->broken, "Fixture queries with a dead dataset URL")->capture_default_str();
  sub->callback([o, &action] { action = [o](Io& io) { run_generate(*o, io); }; });
}

void setup_import(CLI::App& app, Action& action) {
  auto o = std::make_shared<ImportOptions>();
  auto* sub = app.add_subcommand("import", "Convert a dataset CSV to queries, or crawl records to a corpus");
  auto* csv = sub->add_option("--csv", o->csv, "Dataset CSV (artist, title, ...)");
  auto* rec = sub->add_option("--records", o->records, "Crawl records JSONL");
  csv->excludes(rec);
  sub->add_option("--out", o->out, "Output JSONL path")->required();
  sub->callback([o, &action] {
    if (o->csv.empty() && o->records.empty()) throw CLI::RequiredError("--csv or --records");
    action = [o](Io& io) { run_import(*o, io); };
  });
}

void setup_split(CLI::App& app, Action& action) {
  auto o = std::make_shared<SplitOptions>();
  auto* sub = app.add_subcommand("split", "Quadrant-stratified seeded split of a corpus");
  sub->add_option("--corpus", o->corpus, "Corpus JSONL")->required();
  sub->add_option("--ratios", o->ratios, "Comma-separated ratios")->capture_default_str();
  sub->add_option("--names", o->names, "Comma-separated split names")->capture_default_str();
  sub->add_option("--seed", o->seed)->capture_default_str();
  sub->add_option("--out-dir", o->out_dir, "Directory for <name>.jsonl files")->required();
  sub->callback([o, &action] { action = [o](Io& io) { run_split(*o, io); }; });
}

void setup_fetch(CLI::App& app, Action& action) {
  auto o = std::make_shared<FetchOptions>();
  auto* sub = app.add_subcommand("fetch", "Resolve and download lyrics for a list of songs");
  sub->add_option("--queries", o->queries, "Queries JSONL")->required();
  sub->add_option("--out", o->out, "Crawl records JSONL")->required();
  sub->add_option("--config", o->config, "JSON config (fetch.* keys)");
  sub->add_option("--cache-dir", o->cache_dir, "Response cache (overrides LYRNET_CACHE_DIR)");
  sub->add_option("--interval-ms", o->interval_ms, "Minimum spacing of requests to one host");
  sub->add_option("--max-in-flight", o->max_in_flight, "Concurrent workers");
  sub->add_option("--retries", o->retries, "Attempts per page");
  sub->add_option("--retry-base-ms", o->retry_base_ms, "First backoff delay");
  sub->add_flag("--no-baseline", o->no_baseline, "Skip the direct-URL baseline pass");
  sub->add_flag("--fixture", o->fixture, "Serve from the built-in fixture site instead of the network");
  sub->add_option("--fixture-seed", o->fixture_seed)->capture_default_str();
  sub->add_option("--songs", o->songs)->capture_default_str();
  sub->add_option("--misspelled", o->misspelled)->capture_default_str();
  sub->add_option("--broken", o->broken)->capture_default_str();
  sub->callback([o, &action] { action = [o](Io& io) { run_fetch(*o, io); }; });
}

}  // namespace lyrnet::cli
