// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lyrnet/corpus/corpus.hpp"
#include "lyrnet/fetch/resolver.hpp"
#include "lyrnet/fetch/transport.hpp"

namespace lyrnet::fetch {

enum class CrawlStatus { resolved, fetched, parse_failed, not_found, transport_error };

std::string_view to_string(CrawlStatus status);
std::optional<CrawlStatus> parse_crawl_status(std::string_view text);

struct CrawlRecord {
  SongQuery query;
  std::optional<std::string> resolved_url;
  CrawlStatus status = CrawlStatus::not_found;
  std::optional<std::string> lyrics;  // present exactly when status == fetched
  std::size_t attempts = 0;           // GETs spent on the lyrics page
  double resolution_score = 0.0;
  std::optional<std::string> error;

  friend bool operator==(const CrawlRecord&, const CrawlRecord&) = default;
};

std::string to_jsonl(const CrawlRecord& record);
/// Throws DataError on malformed input.
CrawlRecord record_from_jsonl(std::string_view line);

std::string to_jsonl(const SongQuery& query);
/// One SongQuery per line: id, artist, title, url, and optional label fields.
/// Throws DataError naming source and line on malformed records.
std::vector<SongQuery> parse_queries(std::istream& in, const std::string& source = "<queries>");
std::vector<CrawlRecord> parse_records(std::istream& in, const std::string& source = "<records>");

/// Reads dataset CSV rows (header required; columns artist, title, and
/// optionally id, url, quadrant, valence, arousal in any order). RFC 4180
/// quoting.
std::vector<SongQuery> parse_queries_csv(std::istream& in, const std::string& source = "<csv>");

/// Fetched records as corpus documents, ids taken from the query or
/// generated as crawl-NNNNN.
std::vector<corpus::LyricsDocument> documents_from_records(const std::vector<CrawlRecord>& records);

/// Spaces requests to the same host by a minimum interval. reserve() hands
/// out strictly increasing slots per host; callers sleep until their slot.
class HostScheduler {
 public:
  explicit HostScheduler(std::chrono::milliseconds interval) : interval_(interval) {}
  std::chrono::steady_clock::time_point reserve(const std::string& host);

 private:
  std::chrono::milliseconds interval_;
  std::mutex mutex_;
  std::map<std::string, std::chrono::steady_clock::time_point> next_;
};

/// Directory of JSON files keyed by a hash of the normalized query.
class CrawlCache {
 public:
  explicit CrawlCache(std::filesystem::path dir);
  std::optional<CrawlRecord> get(const std::string& key) const;
  void put(const std::string& key, const CrawlRecord& record) const;
  const std::filesystem::path& dir() const { return dir_; }

  /// "resolve" or "direct" plus the normalized artist/title tokens and URL.
  static std::string key_for(const SongQuery& query, std::string_view mode);

 private:
  std::filesystem::path path_for(const std::string& key) const;
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

struct CrawlConfig {
  SiteProfile profile;
  std::size_t max_in_flight = 4;
  std::chrono::milliseconds host_interval{500};
  RetryPolicy retry;
  double threshold = kResolutionThreshold;
  std::optional<std::filesystem::path> cache_dir;
  bool compute_baseline = true;

  void validate() const;
};

struct CrawlSummary {
  std::size_t total = 0;
  std::size_t fetched = 0;
  double coverage = 0.0;
  std::size_t baseline_fetched = 0;
  double baseline_coverage = 0.0;
  std::size_t network_requests = 0;
  std::size_t cache_hits = 0;
};

struct CrawlResult {
  std::vector<CrawlRecord> records;   // input order
  std::vector<CrawlRecord> baseline;  // direct-URL-only, input order; empty if disabled
  CrawlSummary summary;
};

/// Resolves and fetches every query with up to max_in_flight workers, host
/// politeness, retries and optional caching. Failures are recorded per query,
/// never thrown; an empty query list is a ContractError.
CrawlResult crawl_batch(const std::vector<SongQuery>& queries, Transport& transport, const CrawlConfig& config);

/// One record: resolve then fetch.
CrawlRecord crawl_one(const SongQuery& query, const SiteProfile& profile, const Getter& get,
                      double threshold = kResolutionThreshold);

/// One record from the query's own URL only.
CrawlRecord crawl_direct(const SongQuery& query, const SiteProfile& profile, const Getter& get);

std::string summary_json(const CrawlSummary& summary);

}  // namespace lyrnet::fetch
