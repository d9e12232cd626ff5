// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lyrnet/corpus/labels.hpp"
#include "lyrnet/fetch/transport.hpp"

namespace lyrnet::fetch {

struct SongQuery {
  std::string id;  // carried through to imported documents; may be empty
  std::string artist;
  std::string title;
  std::optional<std::string> fallback_url;  // the dataset's own URL, if any
  std::optional<corpus::EmotionLabel> label;

  bool searchable() const { return !artist.empty() && !title.empty(); }
  /// Throws InvalidParameterError unless artist+title or a fallback URL is present.
  void validate() const;
  friend bool operator==(const SongQuery&, const SongQuery&) = default;
};

/// Where to search and what to extract. The search template's "{query}" is
/// replaced by the URL-encoded search text.
struct SiteProfile {
  std::string search_url_template = "http://lyrics.fixture/search?q={query}";
  std::string result_selector = "a.result";
  std::string result_attribute = "href";
  std::string lyrics_selector = "div.lyrics";
};

struct RetryPolicy {
  std::size_t max_attempts = 3;
  std::chrono::milliseconds base_delay{500};
  double factor = 2.0;

  /// Wait before attempt `attempt` (1-based); zero for the first.
  std::chrono::milliseconds delay_before(std::size_t attempt) const;
  void validate() const;
};

/// 429 and 5xx are retried; other statuses are final.
bool is_transient_status(int status);

/// Outcome of a GET after retries: a final response, or the last failure.
struct FetchResult {
  std::optional<HttpResponse> response;
  std::size_t attempts = 0;
  std::string error;  // last transient cause when response is absent or transient
};

using Getter = std::function<FetchResult(const std::string& url)>;

/// Lowercase ASCII alphanumeric runs; everything else separates tokens.
std::vector<std::string> normalize_tokens(std::string_view text);

/// Optimal string alignment distance (Levenshtein plus adjacent transposition).
std::size_t osa_distance(std::string_view a, std::string_view b);

/// 1 for equal tokens; 1 - d/max_len when the distance d is within the
/// tolerance max(1, max_len/4) and both tokens have at least 4 characters;
/// otherwise 0.
double token_similarity(std::string_view a, std::string_view b);

/// Dice-style overlap in [0,1]: 2*sum(best similarity per query token, each
/// slug token used once) / (|query| + |slug|).
double resolution_score(const std::vector<std::string>& query_tokens,
                        const std::vector<std::string>& slug_tokens);

/// Tokens of the last path segment of `url`.
std::vector<std::string> slug_tokens(std::string_view url);

/// "artist title lyrics".
std::string search_text(const SongQuery& query);

enum class ResolutionSource { search, fallback, none };

struct Resolution {
  std::optional<std::string> url;
  double score = 0.0;
  ResolutionSource source = ResolutionSource::none;
  std::optional<std::string> error;  // set when the search exhausted its retries
};

inline constexpr double kResolutionThreshold = 0.5;

/// Searches the site, scores every result URL against the query and picks the
/// best one at or above `threshold` (ties go to the earlier result); falls
/// back to the query's own URL, else nothing.
Resolution resolve(const SongQuery& query, const SiteProfile& profile, const Getter& get,
                   double threshold = kResolutionThreshold);

enum class PageStatus { fetched, empty, parse_failed, not_found, transport_error };

struct LyricsPage {
  PageStatus status = PageStatus::not_found;
  std::optional<std::string> lyrics;
  std::size_t attempts = 0;
  std::optional<std::string> error;
};

/// Downloads `url` and extracts the lyrics container.
LyricsPage fetch_lyrics(const std::string& url, const SiteProfile& profile, const Getter& get);

}  // namespace lyrnet::fetch
