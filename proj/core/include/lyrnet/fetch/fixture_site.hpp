// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "lyrnet/fetch/resolver.hpp"
#include "lyrnet/fetch/transport.hpp"

namespace lyrnet::fetch {

/// "artist-title" from the normalized tokens of both.
std::string song_slug(std::string_view artist, std::string_view title);

/// Song page with a header, a div.lyrics container (lines joined by <br>)
/// and a footer.
std::string render_song_page(std::string_view artist, std::string_view title, std::string_view lyrics);

/// In-memory lyrics site: song pages under /lyrics/<slug>, a search endpoint
/// at /search?q=... listing up to ten songs that share a token with the query
/// (a.result links), and arbitrary extra pages. Thread-safe.
class FixtureSite {
 public:
  explicit FixtureSite(std::string base_url = "http://lyrics.fixture");

  const std::string& base_url() const { return base_url_; }

  /// Registers a song and returns its absolute page URL.
  std::string add_song(const std::string& artist, const std::string& title, const std::string& lyrics);
  void add_page(const std::string& target, std::string html, int status = 200);

  /// Response for a path plus query; unknown targets are 404.
  HttpResponse handle(const std::string& target) const;

 private:
  struct Song {
    std::string artist, title, target;
    std::vector<std::string> tokens;
  };
  std::string search_page(const std::string& query_text) const;

  std::string base_url_;
  mutable std::mutex mutex_;
  std::vector<Song> songs_;
  std::map<std::string, HttpResponse> pages_;
};

struct RequestLogEntry {
  std::string host;  // host:port
  std::string target;
  std::chrono::steady_clock::time_point at;
};

/// Transport answering from a FixtureSite, logging every request with its
/// arrival time. Requests for other hosts fail with TransportError.
class FixtureTransport final : public Transport {
 public:
  explicit FixtureTransport(std::shared_ptr<const FixtureSite> site);

  HttpResponse get(const std::string& url) override;

  /// The next `times` requests for `target` fail: with `status`, or with a
  /// TransportError when status is 0.
  void fail_next(const std::string& target, std::size_t times, int status = 503);

  std::vector<RequestLogEntry> log() const;
  std::size_t request_count() const;
  void clear_log();

 private:
  std::shared_ptr<const FixtureSite> site_;
  std::string host_key_;
  mutable std::mutex mutex_;
  std::map<std::string, std::pair<std::size_t, int>> failures_;
  std::vector<RequestLogEntry> log_;
};

/// Pairs of consecutive same-host requests closer than interval - tolerance.
std::size_t count_interval_violations(const std::vector<RequestLogEntry>& log, std::chrono::milliseconds interval,
                                      std::chrono::milliseconds tolerance = std::chrono::milliseconds(10));

struct FixtureCatalogOptions {
  std::size_t n_songs = 100;
  std::size_t n_misspelled = 20;  // query artist has two letters swapped; dataset URL built from it
  std::size_t n_broken = 10;      // dataset URL points at a retired path
  std::uint64_t seed = 0;
  std::string base_url = "http://lyrics.fixture";
};

struct FixtureCatalog {
  std::shared_ptr<FixtureSite> site;
  std::vector<SongQuery> queries;            // dataset view: possibly misspelled, with dataset URLs
  std::vector<std::string> expected_lyrics;  // normalized text each query should yield
  std::vector<std::size_t> misspelled;       // query indices
  std::vector<std::size_t> broken;
};

/// Songs with labeled synthetic lyrics, dataset-style queries and the
/// site that serves them.
FixtureCatalog make_fixture_catalog(const FixtureCatalogOptions& options = {});

/// Serves a FixtureSite over real HTTP on a loopback port.
class FixtureServer {
 public:
  FixtureServer();
  ~FixtureServer();
  FixtureServer(const FixtureServer&) = delete;
  FixtureServer& operator=(const FixtureServer&) = delete;

  int port() const { return port_; }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  void set_site(std::shared_ptr<const FixtureSite> site);

  std::vector<RequestLogEntry> log() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace lyrnet::fetch
