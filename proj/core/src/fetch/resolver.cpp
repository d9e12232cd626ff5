// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/fetch/resolver.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "lyrnet/fetch/html.hpp"

namespace lyrnet::fetch {

void SongQuery::validate() const {
  if (!searchable() && !fallback_url) {
    throw InvalidParameterError("song query '" + id + "': needs artist and title, or a URL");
  }
}

std::chrono::milliseconds RetryPolicy::delay_before(std::size_t attempt) const {
  if (attempt <= 1) return std::chrono::milliseconds(0);
  const double ms = static_cast<double>(base_delay.count()) * std::pow(factor, static_cast<double>(attempt - 2));
  return std::chrono::milliseconds(static_cast<long long>(std::llround(ms)));
}

void RetryPolicy::validate() const {
  if (max_attempts == 0) throw InvalidParameterError("retry: max_attempts must be at least 1");
  if (base_delay.count() < 0) throw InvalidParameterError("retry: base_delay must be nonnegative");
  if (!(factor >= 1.0)) throw InvalidParameterError("retry: factor must be at least 1");
}

bool is_transient_status(int status) { return status == 429 || status >= 500; }

std::vector<std::string> normalize_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::size_t osa_distance(std::string_view a, std::string_view b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
      }
    }
  }
  return d[n][m];
}

double token_similarity(std::string_view a, std::string_view b) {
  if (a == b) return 1.0;
  const std::size_t len = std::max(a.size(), b.size());
  if (std::min(a.size(), b.size()) < 4) return 0.0;
  const std::size_t d = osa_distance(a, b);
  if (d > std::max<std::size_t>(1, len / 4)) return 0.0;
  return 1.0 - static_cast<double>(d) / static_cast<double>(len);
}

double resolution_score(const std::vector<std::string>& q, const std::vector<std::string>& s) {
  if (q.empty() || s.empty()) return 0.0;
  std::vector<bool> used(s.size(), false);
  double matched = 0.0;
  for (const auto& qt : q) {
    double best = 0.0;
    std::size_t best_j = s.size();
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (used[j]) continue;
      const double sim = token_similarity(qt, s[j]);
      if (sim > best) {
        best = sim;
        best_j = j;
      }
    }
    if (best_j < s.size()) {
      used[best_j] = true;
      matched += best;
    }
  }
  return std::min(1.0, 2.0 * matched / static_cast<double>(q.size() + s.size()));
}

std::vector<std::string> slug_tokens(std::string_view url) {
  auto path = url.substr(0, url.find_first_of("?#"));
  while (!path.empty() && path.back() == '/') path.remove_suffix(1);
  const auto slash = path.rfind('/');
  return normalize_tokens(slash == std::string_view::npos ? path : path.substr(slash + 1));
}

std::string search_text(const SongQuery& query) { return query.artist + " " + query.title + " lyrics"; }

Resolution resolve(const SongQuery& query, const SiteProfile& profile, const Getter& get, double threshold) {
  query.validate();
  Resolution out;
  if (query.searchable()) {
    std::string url = profile.search_url_template;
    const auto slot = url.find("{query}");
    if (slot == std::string::npos) throw InvalidParameterError("site profile: search template lacks {query}");
    url.replace(slot, 7, url_encode(search_text(query)));

    const auto result = get(url);
    if (!result.response || is_transient_status(result.response->status)) {
      out.error = "search failed after " + std::to_string(result.attempts) + " attempts: " + result.error;
      return out;
    }
    if (result.response->status == 200) {
      const auto base = Url::parse(url);
      auto query_tokens = normalize_tokens(query.artist + " " + query.title);
      for (const auto& href :
           extract_attribute(result.response->body, profile.result_selector, profile.result_attribute)) {
        const auto candidate = resolve_href(base, href);
        const double score = resolution_score(query_tokens, slug_tokens(candidate));
        if (score >= threshold && score > out.score) {
          out.url = candidate;
          out.score = score;
          out.source = ResolutionSource::search;
        }
      }
    }
  }
  if (!out.url && query.fallback_url) {
    out.url = query.fallback_url;
    out.score = 0.0;
    out.source = ResolutionSource::fallback;
  }
  return out;
}

LyricsPage fetch_lyrics(const std::string& url, const SiteProfile& profile, const Getter& get) {
  LyricsPage page;
  const auto result = get(url);
  page.attempts = result.attempts;
  if (!result.response || is_transient_status(result.response->status)) {
    page.status = PageStatus::transport_error;
    page.error = result.error;
    return page;
  }
  if (result.response->status != 200) {
    page.status = PageStatus::not_found;
    page.error = "HTTP " + std::to_string(result.response->status);
    return page;
  }
  const auto text = extract_text(result.response->body, profile.lyrics_selector);
  if (!text) {
    page.status = PageStatus::parse_failed;
    page.error = "selector '" + profile.lyrics_selector + "' matched nothing";
  } else if (text->empty()) {
    page.status = PageStatus::empty;
  } else {
    page.status = PageStatus::fetched;
    page.lyrics = *text;
  }
  return page;
}

}  // namespace lyrnet::fetch
