// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "lyrnet/error.hpp"
#include "lyrnet/fetch/crawler.hpp"
#include "lyrnet/fetch/fixture_site.hpp"
#include "lyrnet/fetch/html.hpp"
#include "lyrnet/fetch/resolver.hpp"
#include "lyrnet/fetch/transport.hpp"
#include "test_support.hpp"

namespace lyrnet::fetch {
namespace {

using namespace std::chrono_literals;

struct Site {
  std::shared_ptr<FixtureSite> site = std::make_shared<FixtureSite>();
  std::string jude_url = site->add_song("Beatles", "Hey Jude", "Hey Jude, don't make it bad\nTake a sad song");
  std::string help_url = site->add_song("Beatles", "Help", "Help! I need somebody");
  std::string kiss_url = site->add_song("Prince", "Kiss", "You don't have to be beautiful");
};

// One attempt per request, straight to the fixture.
Getter direct_getter(FixtureTransport& transport) {
  return [&transport](const std::string& url) {
    FetchResult r;
    r.attempts = 1;
    r.response = transport.get(url);
    return r;
  };
}

SongQuery query(std::string artist, std::string title, std::optional<std::string> url = std::nullopt) {
  SongQuery q;
  q.artist = std::move(artist);
  q.title = std::move(title);
  q.fallback_url = std::move(url);
  return q;
}

CrawlConfig fast_config() {
  CrawlConfig cfg;
  cfg.host_interval = 0ms;
  cfg.retry.base_delay = 1ms;
  cfg.compute_baseline = false;
  return cfg;
}

TEST(Resolve, ExactMatchScoresOne) {
  Site s;
  FixtureTransport transport(s.site);
  const auto res = resolve(query("Beatles", "Hey Jude"), SiteProfile{}, direct_getter(transport));
  ASSERT_TRUE(res.url);
  EXPECT_EQ(*res.url, s.jude_url);
  EXPECT_EQ(res.score, 1.0);
  EXPECT_EQ(res.source, ResolutionSource::search);
}

TEST(Resolve, MisspelledArtistStillResolves) {
  Site s;
  FixtureTransport transport(s.site);
  const auto res = resolve(query("Betales", "Hey Jude"), SiteProfile{}, direct_getter(transport));
  ASSERT_TRUE(res.url);
  EXPECT_EQ(*res.url, s.jude_url);
  EXPECT_GE(res.score, 0.5);
  // Independent check of the score: "betales" is one transposition from "beatles".
  EXPECT_EQ(osa_distance("betales", "beatles"), 1u);
  EXPECT_NEAR(res.score, 2.0 * (1.0 - 1.0 / 7.0 + 2.0) / 6.0, 1e-12);
}

TEST(Resolve, NonsenseWithoutFallbackIsNotFound) {
  Site s;
  FixtureTransport transport(s.site);
  const auto res = resolve(query("Zzxq", "Qqqv Wwwp"), SiteProfile{}, direct_getter(transport));
  EXPECT_FALSE(res.url);
  EXPECT_EQ(res.source, ResolutionSource::none);
  const auto rec = crawl_one(query("Zzxq", "Qqqv Wwwp"), SiteProfile{}, direct_getter(transport));
  EXPECT_EQ(rec.status, CrawlStatus::not_found);
}

TEST(Resolve, FallsBackToDatasetUrl) {
  Site s;
  FixtureTransport transport(s.site);
  const auto res = resolve(query("Nobody", "Nothing", s.kiss_url), SiteProfile{}, direct_getter(transport));
  EXPECT_EQ(res.source, ResolutionSource::fallback);
  EXPECT_EQ(*res.url, s.kiss_url);
}

TEST(Scoring, SimilarityRules) {
  EXPECT_EQ(osa_distance("", "abc"), 3u);
  EXPECT_EQ(osa_distance("kitten", "sitting"), 3u);
  EXPECT_EQ(osa_distance("ca", "ac"), 1u);
  EXPECT_EQ(token_similarity("jude", "jude"), 1.0);
  EXPECT_EQ(token_similarity("cat", "cut"), 0.0);  // short tokens must match exactly
  EXPECT_NEAR(token_similarity("prince", "prinse"), 1.0 - 1.0 / 6.0, 1e-15);
  EXPECT_EQ(resolution_score({"a", "b"}, {"a", "b"}), 1.0);
  EXPECT_EQ(resolution_score({"abcd"}, {"wxyz"}), 0.0);
  EXPECT_EQ(slug_tokens("http://x/lyrics/beatles-hey-jude/?p=1"), (std::vector<std::string>{"beatles", "hey", "jude"}));
}

TEST(ScoringProperty, ScoreIsBoundedAndSymmetricForEqualSets) {
  ad::Rng rng(3);
  auto word = [&] {
    std::string w;
    for (std::size_t i = 0, n = 2 + rng.below(6); i < n; ++i) w += static_cast<char>('a' + rng.below(5));
    return w;
  };
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> a(1 + rng.below(4)), b(1 + rng.below(4));
    for (auto& w : a) w = word();
    for (auto& w : b) w = word();
    const double s = resolution_score(a, b);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_EQ(resolution_score(a, a), 1.0);
    EXPECT_EQ(osa_distance(a[0], b[0]), osa_distance(b[0], a[0]));
  }
}

TEST(FetchLyrics, ExtractsNormalizedText) {
  Site s;
  FixtureTransport transport(s.site);
  const auto page = fetch_lyrics(s.jude_url, SiteProfile{}, direct_getter(transport));
  EXPECT_EQ(page.status, PageStatus::fetched);
  EXPECT_EQ(*page.lyrics, "Hey Jude, don't make it bad\nTake a sad song");
}

TEST(FetchLyrics, MissingContainerIsParseFailure) {
  Site s;
  s.site->add_page("/lyrics/odd", "<html><body><p>no lyrics here</p></body></html>");
  FixtureTransport transport(s.site);
  const auto page = fetch_lyrics(s.site->base_url() + "/lyrics/odd", SiteProfile{}, direct_getter(transport));
  EXPECT_EQ(page.status, PageStatus::parse_failed);
  const auto gone = fetch_lyrics(s.site->base_url() + "/lyrics/gone", SiteProfile{}, direct_getter(transport));
  EXPECT_EQ(gone.status, PageStatus::not_found);
}

TEST(Crawl, RetriesTransientFailuresUntilSuccess) {
  Site s;
  FixtureTransport transport(s.site);
  transport.fail_next(Url::parse(s.jude_url).target, 2);
  const auto result = crawl_batch({query("Beatles", "Hey Jude")}, transport, fast_config());
  ASSERT_EQ(result.records.size(), 1u);
  EXPECT_EQ(result.records[0].status, CrawlStatus::fetched);
  EXPECT_EQ(result.records[0].attempts, 3u);
}

TEST(Crawl, ExhaustedRetriesRecordTransportError) {
  Site s;
  FixtureTransport transport(s.site);
  transport.fail_next(Url::parse(s.jude_url).target, 5, 0);
  const auto result = crawl_batch({query("Beatles", "Hey Jude")}, transport, fast_config());
  EXPECT_EQ(result.records[0].status, CrawlStatus::transport_error);
  EXPECT_EQ(result.records[0].attempts, 3u);
  EXPECT_TRUE(result.records[0].error);
}

TEST(Crawl, EmptyLyricsPageIsNotCounted) {
  Site s;
  const auto url = s.site->add_song("Silent", "Nothing", "");
  FixtureTransport transport(s.site);
  const auto result = crawl_batch({query("Silent", "Nothing")}, transport, fast_config());
  EXPECT_NE(result.records[0].status, CrawlStatus::fetched);
  EXPECT_EQ(result.records[0].resolved_url, url);
  EXPECT_FALSE(result.records[0].lyrics);
  EXPECT_EQ(result.summary.fetched, 0u);
}

TEST(Crawl, EmptyQueryListIsContractError) {
  Site s;
  FixtureTransport transport(s.site);
  EXPECT_THROW(crawl_batch({}, transport, fast_config()), ContractError);
}

TEST(Crawl, WarmCacheMakesNoRequestsAndSameRecords) {
  lyrnet::testing::TempDir dir;
  FixtureCatalogOptions opts;
  opts.n_songs = 12;
  opts.n_misspelled = 3;
  opts.n_broken = 2;
  const auto catalog = make_fixture_catalog(opts);
  auto cfg = fast_config();
  cfg.cache_dir = dir.path();
  cfg.compute_baseline = true;
  FixtureTransport cold(catalog.site);
  const auto first = crawl_batch(catalog.queries, cold, cfg);
  EXPECT_GT(first.summary.network_requests, 0u);
  FixtureTransport warm(catalog.site);
  const auto second = crawl_batch(catalog.queries, warm, cfg);
  EXPECT_EQ(warm.request_count(), 0u);
  EXPECT_EQ(second.summary.network_requests, 0u);
  EXPECT_EQ(second.summary.cache_hits, 2 * catalog.queries.size());
  EXPECT_EQ(second.records, first.records);
  EXPECT_EQ(second.baseline, first.baseline);
}

TEST(Crawl, CatalogCoveragePolitenessAndOrder) {
  FixtureCatalogOptions opts;
  opts.n_songs = 20;
  opts.n_misspelled = 4;
  opts.n_broken = 2;
  const auto catalog = make_fixture_catalog(opts);
  auto cfg = fast_config();
  cfg.host_interval = 20ms;
  cfg.compute_baseline = true;
  FixtureTransport transport(catalog.site);
  const auto result = crawl_batch(catalog.queries, transport, cfg);
  EXPECT_EQ(count_interval_violations(transport.log(), 20ms), 0u);
  ASSERT_EQ(result.records.size(), catalog.queries.size());
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    EXPECT_EQ(result.records[i].query, catalog.queries[i]);
    ASSERT_EQ(result.records[i].status, CrawlStatus::fetched) << i;
    EXPECT_EQ(*result.records[i].lyrics, catalog.expected_lyrics[i]);
  }
  EXPECT_EQ(result.summary.coverage, 1.0);
  EXPECT_LE(result.summary.baseline_coverage, 0.8);
}

TEST(IntervalViolations, CountsCloseSameHostPairs) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<RequestLogEntry> log{
      {"a:80", "/1", t0}, {"b:80", "/1", t0 + 1ms}, {"a:80", "/2", t0 + 5ms}, {"a:80", "/3", t0 + 60ms}};
  EXPECT_EQ(count_interval_violations(log, 20ms, 0ms), 1u);
}

TEST(Html, SelectorsAndText) {
  const std::string html =
      "<div class='lyrics a'>One &amp; two<br>three<script>x()</script></div><div id=z><a class=result "
      "href='/l/x'>x</a><a href=/n>n</a></div>";
  EXPECT_EQ(*extract_text(html, "div.lyrics"), "One & two\nthree");
  EXPECT_EQ(extract_attribute(html, "#z a.result", "href"), (std::vector<std::string>{"/l/x"}));
  EXPECT_FALSE(extract_text(html, "span.missing"));
  EXPECT_THROW(HtmlDocument::parse(html).select("div..x"), InvalidParameterError);
}

TEST(Transport, UrlHandling) {
  const auto u = Url::parse("http://Example.com:8080/a/b?c=1");
  EXPECT_EQ(u.host, "example.com");
  EXPECT_EQ(u.port, 8080);
  EXPECT_EQ(u.target, "/a/b?c=1");
  EXPECT_EQ(resolve_href(u, "../x"), "http://example.com:8080/x");
  EXPECT_EQ(resolve_href(u, "/y"), "http://example.com:8080/y");
  EXPECT_EQ(resolve_href(u, "c"), "http://example.com:8080/a/c");
  EXPECT_EQ(resolve_href(u, "./d/"), "http://example.com:8080/a/d/");
  EXPECT_EQ(resolve_href(u, "../../../q?s=a/../b"), "http://example.com:8080/q?s=a/../b");
  EXPECT_EQ(url_encode("hey jude/é"), "hey+jude%2F%C3%A9");
  EXPECT_EQ(url_decode(url_encode("a b&c")), "a b&c");
  EXPECT_THROW(Url::parse("ftp://x"), InvalidParameterError);
}

TEST(Queries, CsvImportWithQuoting) {
  std::istringstream csv(
      "title,artist,quadrant\n"
      "\"Hey Jude\",\"Beatles, The\",Q1\n"
      "\"Say \"\"Hi\"\"\",Someone,Q3\n");
  const auto queries = parse_queries_csv(csv, "data.csv");
  ASSERT_EQ(queries.size(), 2u);
  EXPECT_EQ(queries[0].artist, "Beatles, The");
  EXPECT_EQ(queries[0].title, "Hey Jude");
  EXPECT_EQ(queries[1].title, "Say \"Hi\"");
  EXPECT_EQ(queries[1].label->quadrant(), corpus::Quadrant::Q3);

  std::istringstream no_header("x,y\n1,2\n");
  EXPECT_THROW(parse_queries_csv(no_header), DataError);
}

TEST(Records, JsonlRoundTrip) {
  CrawlRecord r;
  r.query = query("Beatles", "Hey Jude", "http://x/y");
  r.query.id = "s1";
  r.query.label = corpus::EmotionLabel(corpus::Quadrant::Q2);
  r.resolved_url = "http://x/z";
  r.status = CrawlStatus::fetched;
  r.lyrics = "line one\nline \"two\"";
  r.attempts = 2;
  r.resolution_score = 0.875;
  EXPECT_EQ(record_from_jsonl(to_jsonl(r)), r);
  EXPECT_THROW(record_from_jsonl("{bad"), DataError);

  const auto docs = documents_from_records({r});
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].id, "s1");
  EXPECT_EQ(docs[0].lyrics, *r.lyrics);
}

TEST(HttpTransport, CrawlsFixtureOverLoopback) {
  FixtureServer server;
  auto site = std::make_shared<FixtureSite>(server.base_url());
  site->add_song("Beatles", "Hey Jude", "Na na na");
  server.set_site(site);
  auto cfg = fast_config();
  cfg.profile.search_url_template = server.base_url() + "/search?q={query}";
  HttpTransport transport(2s);
  const auto result = crawl_batch({query("Beatles", "Hey Jude"), query("Nobody", "Nowhere")}, transport, cfg);
  EXPECT_EQ(result.records[0].status, CrawlStatus::fetched);
  EXPECT_EQ(*result.records[0].lyrics, "Na na na");
  EXPECT_EQ(result.records[1].status, CrawlStatus::not_found);
  EXPECT_EQ(server.log().size(), 3u);
  EXPECT_THROW(transport.get("http://127.0.0.1:1/"), TransportError);
}

}  // namespace
}  // namespace lyrnet::fetch
