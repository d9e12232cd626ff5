// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/fetch/fixture_site.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "httplib.h"
#include "lyrnet/ad/rng.hpp"
#include "lyrnet/corpus/synthetic.hpp"
#include "lyrnet/fetch/html.hpp"

namespace lyrnet::fetch {

namespace {

std::string escape_html(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&#39;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string capitalized(std::string w) {
  if (!w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
  return w;
}

}  // namespace

std::string song_slug(std::string_view artist, std::string_view title) {
  auto tokens = normalize_tokens(artist);
  for (auto& t : normalize_tokens(title)) tokens.push_back(std::move(t));
  return join(tokens, "-");
}

std::string render_song_page(std::string_view artist, std::string_view title, std::string_view lyrics) {
  std::string body;
  std::size_t start = 0;
  while (start <= lyrics.size()) {
    auto nl = lyrics.find('\n', start);
    if (nl == std::string_view::npos) nl = lyrics.size();
    if (start) body += "<br>\n";
    body += escape_html(lyrics.substr(start, nl - start));
    start = nl + 1;
  }
  std::string page = "<!DOCTYPE html>\n<html><head><title>";
  page += escape_html(title) + " by " + escape_html(artist);
  page += "</title></head>\n<body>\n<div class=\"header\"><h1>" + escape_html(title) + "</h1><h2>" +
          escape_html(artist) + "</h2></div>\n";
  page += "<div class=\"lyrics\">\n" + body + "\n</div>\n";
  page += "<div class=\"footer\">fixture site</div>\n</body></html>\n";
  return page;
}

FixtureSite::FixtureSite(std::string base_url) : base_url_(std::move(base_url)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  (void)Url::parse(base_url_);
}

std::string FixtureSite::add_song(const std::string& artist, const std::string& title, const std::string& lyrics) {
  const std::string target = "/lyrics/" + song_slug(artist, title);
  std::lock_guard lock(mutex_);
  auto tokens = normalize_tokens(artist + " " + title);
  songs_.push_back({artist, title, target, std::move(tokens)});
  pages_[target] = {200, render_song_page(artist, title, lyrics)};
  return base_url_ + target;
}

void FixtureSite::add_page(const std::string& target, std::string html, int status) {
  std::lock_guard lock(mutex_);
  pages_[target] = {status, std::move(html)};
}

std::string FixtureSite::search_page(const std::string& query_text) const {
  auto q = normalize_tokens(query_text);
  q.erase(std::remove(q.begin(), q.end(), "lyrics"), q.end());
  std::vector<std::pair<std::size_t, std::size_t>> hits;  // (count, song index)
  for (std::size_t i = 0; i < songs_.size(); ++i) {
    std::size_t count = 0;
    for (const auto& t : q) count += static_cast<std::size_t>(std::count(songs_[i].tokens.begin(), songs_[i].tokens.end(), t));
    if (count > 0) hits.emplace_back(count, i);
  }
  std::stable_sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  if (hits.size() > 10) hits.resize(10);
  std::string page = "<!DOCTYPE html>\n<html><body>\n<ul class=\"results\">\n";
  for (const auto& [count, i] : hits) {
    const auto& s = songs_[i];
    page += "<li><a class=\"result\" href=\"" + s.target + "\">" + escape_html(s.artist) + " - " +
            escape_html(s.title) + "</a></li>\n";
  }
  page += "</ul>\n</body></html>\n";
  return page;
}

HttpResponse FixtureSite::handle(const std::string& target) const {
  std::lock_guard lock(mutex_);
  const auto q = target.find('?');
  const auto path = target.substr(0, q);
  if (path == "/search") {
    std::string text;
    if (q != std::string::npos) {
      const auto params = std::string_view(target).substr(q + 1);
      std::size_t start = 0;
      while (start <= params.size()) {
        auto amp = params.find('&', start);
        if (amp == std::string_view::npos) amp = params.size();
        const auto kv = params.substr(start, amp - start);
        if (kv.starts_with("q=")) text = url_decode(kv.substr(2));
        start = amp + 1;
      }
    }
    return {200, search_page(text)};
  }
  const auto it = pages_.find(target);
  if (it == pages_.end()) return {404, "<html><body><h1>Not found</h1></body></html>"};
  return it->second;
}

FixtureTransport::FixtureTransport(std::shared_ptr<const FixtureSite> site)
    : site_(std::move(site)), host_key_(Url::parse(site_->base_url()).host_key()) {}

HttpResponse FixtureTransport::get(const std::string& url) {
  const auto u = Url::parse(url);
  std::optional<int> fail;
  {
    std::lock_guard lock(mutex_);
    log_.push_back({u.host_key(), u.target, std::chrono::steady_clock::now()});
    const auto it = failures_.find(u.target);
    if (it != failures_.end() && it->second.first > 0) {
      --it->second.first;
      fail = it->second.second;
    }
  }
  if (u.host_key() != host_key_) throw TransportError("fixture: unknown host " + u.host);
  if (fail) {
    if (*fail == 0) throw TransportError("fixture: connection reset for " + u.target);
    return {*fail, "<html><body>temporarily unavailable</body></html>"};
  }
  return site_->handle(u.target);
}

void FixtureTransport::fail_next(const std::string& target, std::size_t times, int status) {
  std::lock_guard lock(mutex_);
  failures_[target] = {times, status};
}

std::vector<RequestLogEntry> FixtureTransport::log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

std::size_t FixtureTransport::request_count() const {
  std::lock_guard lock(mutex_);
  return log_.size();
}

void FixtureTransport::clear_log() {
  std::lock_guard lock(mutex_);
  log_.clear();
}

std::size_t count_interval_violations(const std::vector<RequestLogEntry>& log, std::chrono::milliseconds interval,
                                      std::chrono::milliseconds tolerance) {
  std::map<std::string, std::vector<std::chrono::steady_clock::time_point>> by_host;
  for (const auto& e : log) by_host[e.host].push_back(e.at);
  std::size_t violations = 0;
  for (auto& [host, times] : by_host) {
    std::sort(times.begin(), times.end());
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (times[i] - times[i - 1] < interval - tolerance) ++violations;
    }
  }
  return violations;
}

namespace {

// Pronounceable name words of three consonant-vowel syllables, letters only.
std::string name_word(ad::Rng& rng) {
  static constexpr std::string_view kC = "bdfgkmnprstvz";
  static constexpr std::string_view kV = "aeiou";
  std::string w;
  for (int s = 0; s < 3; ++s) {
    w += kC[rng.below(kC.size())];
    w += kV[rng.below(kV.size())];
  }
  return w;
}

// Swaps two adjacent interior letters that differ.
std::string misspell(const std::string& word) {
  std::string w = word;
  for (std::size_t i = 1; i + 1 < w.size(); ++i) {
    if (w[i] != w[i + 1]) {
      std::swap(w[i], w[i + 1]);
      return w;
    }
  }
  return w + w.back();
}

}  // namespace

FixtureCatalog make_fixture_catalog(const FixtureCatalogOptions& o) {
  if (o.n_misspelled + o.n_broken > o.n_songs) {
    throw InvalidParameterError("fixture catalog: more special songs than songs");
  }
  FixtureCatalog cat;
  cat.site = std::make_shared<FixtureSite>(o.base_url);

  corpus::SyntheticOptions so;
  so.n_per_quadrant = (o.n_songs + 3) / 4;
  so.seed = o.seed;
  auto docs = corpus::generate_synthetic(so);
  docs.resize(o.n_songs);

  ad::Rng rng(o.seed, 0x666978);  // "fix"
  std::vector<std::string> used;
  auto fresh_word = [&] {
    while (true) {
      auto w = name_word(rng);
      if (std::find(used.begin(), used.end(), w) == used.end() &&
          std::find(used.begin(), used.end(), misspell(w)) == used.end()) {
        used.push_back(w);
        used.push_back(misspell(w));
        return w;
      }
    }
  };

  std::vector<std::size_t> order(o.n_songs);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.split(1).shuffle(order);
  std::vector<int> kind(o.n_songs, 0);  // 0 clean, 1 misspelled, 2 broken
  for (std::size_t k = 0; k < o.n_misspelled; ++k) kind[order[k]] = 1;
  for (std::size_t k = 0; k < o.n_broken; ++k) kind[order[o.n_misspelled + k]] = 2;

  for (std::size_t i = 0; i < o.n_songs; ++i) {
    const std::string first = fresh_word();
    const std::string artist = capitalized(first) + " " + capitalized(fresh_word());
    const std::string title = capitalized(fresh_word()) + " " + fresh_word();
    const auto url = cat.site->add_song(artist, title, docs[i].lyrics);

    SongQuery q;
    char id[32];
    std::snprintf(id, sizeof id, "fx-%03zu", i);
    q.id = id;
    q.artist = artist;
    q.title = title;
    q.label = docs[i].label;
    if (kind[i] == 1) {
      q.artist = capitalized(misspell(first)) + artist.substr(first.size());
      q.fallback_url = o.base_url + "/lyrics/" + song_slug(q.artist, q.title);
      cat.misspelled.push_back(i);
    } else if (kind[i] == 2) {
      q.fallback_url = o.base_url + "/songs/" + std::to_string(4000 + i);
      cat.broken.push_back(i);
    } else {
      q.fallback_url = url;
    }
    cat.queries.push_back(std::move(q));
    cat.expected_lyrics.push_back(normalize_whitespace(docs[i].lyrics));
  }
  return cat;
}

struct FixtureServer::Impl {
  httplib::Server server;
  mutable std::mutex mutex;
  std::shared_ptr<const FixtureSite> site;
  std::vector<RequestLogEntry> log;
};

FixtureServer::FixtureServer() : impl_(std::make_unique<Impl>()) {
  impl_->server.Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
    std::shared_ptr<const FixtureSite> site;
    std::string target = req.path;
    if (!req.params.empty()) {
      std::string query;
      for (const auto& [k, v] : req.params) {
        query += (query.empty() ? "" : "&") + url_encode(k) + "=" + url_encode(v);
      }
      target += "?" + query;
    }
    {
      std::lock_guard lock(impl_->mutex);
      impl_->log.push_back({"127.0.0.1:" + std::to_string(port_), target, std::chrono::steady_clock::now()});
      site = impl_->site;
    }
    if (!site) {
      res.status = 503;
      return;
    }
    const auto r = site->handle(target);
    res.status = r.status;
    res.set_content(r.body, "text/html; charset=utf-8");
  });
  port_ = impl_->server.bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw TransportError("fixture server: cannot bind a loopback port");
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

FixtureServer::~FixtureServer() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

void FixtureServer::set_site(std::shared_ptr<const FixtureSite> site) {
  std::lock_guard lock(impl_->mutex);
  impl_->site = std::move(site);
}

std::vector<RequestLogEntry> FixtureServer::log() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->log;
}

}  // namespace lyrnet::fetch
