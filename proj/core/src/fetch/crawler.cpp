// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/fetch/crawler.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace lyrnet::fetch {

using json = nlohmann::ordered_json;

std::string_view to_string(CrawlStatus s) {
  switch (s) {
    case CrawlStatus::resolved:
      return "resolved";
    case CrawlStatus::fetched:
      return "fetched";
    case CrawlStatus::parse_failed:
      return "parse_failed";
    case CrawlStatus::not_found:
      return "not_found";
    case CrawlStatus::transport_error:
      return "transport_error";
  }
  return "not_found";
}

std::optional<CrawlStatus> parse_crawl_status(std::string_view text) {
  for (auto s : {CrawlStatus::resolved, CrawlStatus::fetched, CrawlStatus::parse_failed, CrawlStatus::not_found,
                 CrawlStatus::transport_error}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

namespace {

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

json query_json(const SongQuery& q) {
  json j;
  j["id"] = q.id;
  j["artist"] = q.artist;
  j["title"] = q.title;
  if (q.fallback_url) j["url"] = *q.fallback_url;
  if (q.label) {
    j["quadrant"] = corpus::to_string(q.label->quadrant());
    j["valence"] = corpus::to_string(q.label->valence());
    j["arousal"] = corpus::to_string(q.label->arousal());
  }
  return j;
}

std::optional<std::string> opt_string(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DataError(where + ": field '" + key + "' must be a string");
  return it->get<std::string>();
}

SongQuery query_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw DataError(where + ": expected a JSON object");
  SongQuery q;
  q.id = opt_string(j, "id", where).value_or("");
  q.artist = opt_string(j, "artist", where).value_or("");
  q.title = opt_string(j, "title", where).value_or("");
  q.fallback_url = opt_string(j, "url", where);
  q.label = corpus::label_from_fields(opt_string(j, "quadrant", where), opt_string(j, "valence", where),
                                      opt_string(j, "arousal", where), where);
  try {
    q.validate();
  } catch (const InvalidParameterError& e) {
    throw DataError(where + ": " + e.what());
  }
  return q;
}

json parse_line(std::string_view line, const std::string& where) {
  try {
    return json::parse(line);
  } catch (const json::parse_error&) {
    throw DataError(where + ": malformed JSON");
  }
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

std::vector<std::string> split_csv_row(std::istream& in, bool& ok, std::size_t& line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line_no;
      break;
    } else if (c != '\r') {
      field += c;
    }
  }
  ok = any;
  if (quoted) throw DataError("csv: unterminated quoted field near line " + std::to_string(line_no));
  if (any) fields.push_back(std::move(field));
  return fields;
}

}  // namespace

std::string to_jsonl(const SongQuery& query) { return dump(query_json(query)); }

std::string to_jsonl(const CrawlRecord& r) {
  json j;
  j["query"] = query_json(r.query);
  j["status"] = to_string(r.status);
  j["resolved_url"] = r.resolved_url ? json(*r.resolved_url) : json(nullptr);
  j["resolution_score"] = r.resolution_score;
  j["attempts"] = r.attempts;
  j["lyrics"] = r.lyrics ? json(*r.lyrics) : json(nullptr);
  j["error"] = r.error ? json(*r.error) : json(nullptr);
  return dump(j);
}

CrawlRecord record_from_jsonl(std::string_view line) {
  const std::string where = "crawl record";
  const auto j = parse_line(line, where);
  if (!j.is_object() || !j.contains("query") || !j.contains("status")) {
    throw DataError(where + ": missing required field");
  }
  CrawlRecord r;
  r.query = query_from_json(j["query"], where);
  const auto status = j["status"].is_string() ? parse_crawl_status(j["status"].get<std::string>()) : std::nullopt;
  if (!status) throw DataError(where + ": bad status");
  r.status = *status;
  r.resolved_url = opt_string(j, "resolved_url", where);
  r.lyrics = opt_string(j, "lyrics", where);
  r.error = opt_string(j, "error", where);
  if (j.contains("attempts")) {
    if (!j["attempts"].is_number_unsigned()) throw DataError(where + ": bad attempts");
    r.attempts = j["attempts"].get<std::size_t>();
  }
  if (j.contains("resolution_score")) {
    if (!j["resolution_score"].is_number()) throw DataError(where + ": bad resolution_score");
    r.resolution_score = j["resolution_score"].get<double>();
  }
  if ((r.status == CrawlStatus::fetched) != (r.lyrics && !r.lyrics->empty())) {
    throw DataError(where + ": lyrics must be present exactly when status is fetched");
  }
  return r;
}

std::vector<SongQuery> parse_queries(std::istream& in, const std::string& source) {
  std::vector<SongQuery> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (blank(line)) continue;
    const std::string where = source + ":" + std::to_string(n);
    out.push_back(query_from_json(parse_line(line, where), where));
  }
  return out;
}

std::vector<CrawlRecord> parse_records(std::istream& in, const std::string& source) {
  std::vector<CrawlRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (blank(line)) continue;
    try {
      out.push_back(record_from_jsonl(line));
    } catch (const DataError& e) {
      throw DataError(source + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::vector<SongQuery> parse_queries_csv(std::istream& in, const std::string& source) {
  std::size_t line_no = 0;
  bool ok = false;
  auto header = split_csv_row(in, ok, line_no);
  if (!ok) throw DataError(source + ": empty CSV");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name;
    for (char c : header[i]) {
      if (c != ' ' && c != '\xEF' && c != '\xBB' && c != '\xBF') {
        name += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    col[name] = i;
  }
  if (!col.contains("artist") || !col.contains("title")) {
    throw DataError(source + ": header must name 'artist' and 'title' columns");
  }
  std::vector<SongQuery> out;
  while (true) {
    const std::size_t row_line = line_no + 1;
    auto row = split_csv_row(in, ok, line_no);
    if (!ok) break;
    if (row.size() == 1 && blank(row[0])) continue;
    const std::string where = source + ":" + std::to_string(row_line);
    if (row.size() != header.size()) {
      throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(row.size()));
    }
    auto field = [&](const char* name) -> std::optional<std::string> {
      const auto it = col.find(name);
      if (it == col.end() || row[it->second].empty()) return std::nullopt;
      return row[it->second];
    };
    SongQuery q;
    q.id = field("id").value_or("");
    q.artist = field("artist").value_or("");
    q.title = field("title").value_or("");
    q.fallback_url = field("url");
    q.label = corpus::label_from_fields(field("quadrant"), field("valence"), field("arousal"), where);
    try {
      q.validate();
    } catch (const InvalidParameterError& e) {
      throw DataError(where + ": " + e.what());
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<corpus::LyricsDocument> documents_from_records(const std::vector<CrawlRecord>& records) {
  std::vector<corpus::LyricsDocument> docs;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.status != CrawlStatus::fetched || !r.lyrics) continue;
    corpus::LyricsDocument d;
    if (r.query.id.empty()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "crawl-%05zu", i);
      d.id = buf;
    } else {
      d.id = r.query.id;
    }
    d.artist = r.query.artist;
    d.title = r.query.title;
    d.url = r.resolved_url.value_or("");
    d.lyrics = *r.lyrics;
    d.label = r.query.label;
    docs.push_back(std::move(d));
  }
  return docs;
}

std::chrono::steady_clock::time_point HostScheduler::reserve(const std::string& host) {
  std::lock_guard lock(mutex_);
  const auto now = std::chrono::steady_clock::now();
  auto& next = next_[host];
  const auto slot = std::max(now, next);
  next = slot + interval_;
  return slot;
}

CrawlCache::CrawlCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw InvalidParameterError("cache: cannot create " + dir_.string() + ": " + ec.message());
}

std::string CrawlCache::key_for(const SongQuery& q, std::string_view mode) {
  std::string text(mode);
  text += '\n';
  for (const auto& t : normalize_tokens(q.artist)) text += t + ' ';
  text += '\n';
  for (const auto& t : normalize_tokens(q.title)) text += t + ' ';
  text += '\n';
  text += q.fallback_url.value_or("");
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::filesystem::path CrawlCache::path_for(const std::string& key) const {
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<CrawlRecord> CrawlCache::get(const std::string& key) const {
  std::lock_guard lock(mutex_);
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  try {
    return record_from_jsonl(line);
  } catch (const DataError&) {
    return std::nullopt;  // a damaged entry is a miss
  }
}

void CrawlCache::put(const std::string& key, const CrawlRecord& record) const {
  std::lock_guard lock(mutex_);
  const auto path = path_for(key);
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << to_jsonl(record) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

void CrawlConfig::validate() const {
  if (max_in_flight == 0) throw InvalidParameterError("crawl: max_in_flight must be at least 1");
  if (host_interval.count() < 0) throw InvalidParameterError("crawl: host_interval must be nonnegative");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw InvalidParameterError("crawl: threshold must be in [0,1]");
  retry.validate();
}

namespace {

CrawlRecord record_from_page(const SongQuery& query, const std::string& url, double score, const LyricsPage& page) {
  CrawlRecord r;
  r.query = query;
  r.resolved_url = url;
  r.resolution_score = score;
  r.attempts = page.attempts;
  r.error = page.error;
  switch (page.status) {
    case PageStatus::fetched:
      r.status = CrawlStatus::fetched;
      r.lyrics = page.lyrics;
      break;
    case PageStatus::empty:
      r.status = CrawlStatus::resolved;
      break;
    case PageStatus::parse_failed:
      r.status = CrawlStatus::parse_failed;
      break;
    case PageStatus::not_found:
      r.status = CrawlStatus::not_found;
      break;
    case PageStatus::transport_error:
      r.status = CrawlStatus::transport_error;
      break;
  }
  return r;
}

}  // namespace

CrawlRecord crawl_one(const SongQuery& query, const SiteProfile& profile, const Getter& get, double threshold) {
  const auto res = resolve(query, profile, get, threshold);
  if (res.error) {
    CrawlRecord r;
    r.query = query;
    r.status = CrawlStatus::transport_error;
    r.error = res.error;
    return r;
  }
  if (!res.url) {
    CrawlRecord r;
    r.query = query;
    r.status = CrawlStatus::not_found;
    return r;
  }
  return record_from_page(query, *res.url, res.score, fetch_lyrics(*res.url, profile, get));
}

CrawlRecord crawl_direct(const SongQuery& query, const SiteProfile& profile, const Getter& get) {
  if (!query.fallback_url) {
    CrawlRecord r;
    r.query = query;
    r.status = CrawlStatus::not_found;
    return r;
  }
  return record_from_page(query, *query.fallback_url, 0.0, fetch_lyrics(*query.fallback_url, profile, get));
}

CrawlResult crawl_batch(const std::vector<SongQuery>& queries, Transport& transport, const CrawlConfig& config) {
  config.validate();
  if (queries.empty()) throw ContractError("crawl_batch: no queries");
  for (const auto& q : queries) q.validate();

  HostScheduler scheduler(config.host_interval);
  std::atomic<std::size_t> requests{0};
  std::atomic<std::size_t> cache_hits{0};
  std::optional<CrawlCache> cache;
  if (config.cache_dir) cache.emplace(*config.cache_dir);

  const Getter get = [&](const std::string& url) {
    FetchResult out;
    std::string host;
    try {
      host = Url::parse(url).host_key();
    } catch (const InvalidParameterError& e) {
      out.attempts = 1;
      out.error = e.what();
      out.response = HttpResponse{400, {}};
      return out;
    }
    for (std::size_t attempt = 1; attempt <= config.retry.max_attempts; ++attempt) {
      if (attempt > 1) std::this_thread::sleep_for(config.retry.delay_before(attempt));
      std::this_thread::sleep_until(scheduler.reserve(host));
      out.attempts = attempt;
      ++requests;
      try {
        auto response = transport.get(url);
        if (!is_transient_status(response.status)) {
          out.response = std::move(response);
          out.error.clear();
          return out;
        }
        out.error = "HTTP " + std::to_string(response.status);
        out.response = std::move(response);
      } catch (const TransportError& e) {
        out.error = e.what();
        out.response.reset();
      }
    }
    return out;
  };

  // Jobs: every query once through the resolver, once directly for the baseline.
  const std::size_t n = queries.size();
  const std::size_t n_jobs = config.compute_baseline ? 2 * n : n;
  CrawlResult result;
  result.records.resize(n);
  if (config.compute_baseline) result.baseline.resize(n);

  auto run_job = [&](std::size_t job) {
    const bool direct = job >= n;
    const std::size_t i = direct ? job - n : job;
    const auto& q = queries[i];
    const auto key = cache ? CrawlCache::key_for(q, direct ? "direct" : "resolve") : std::string();
    if (cache) {
      if (auto hit = cache->get(key)) {
        hit->query = q;
        ++cache_hits;
        (direct ? result.baseline : result.records)[i] = std::move(*hit);
        return;
      }
    }
    auto record = direct ? crawl_direct(q, config.profile, get) : crawl_one(q, config.profile, get, config.threshold);
    if (cache && record.status != CrawlStatus::transport_error) cache->put(key, record);
    (direct ? result.baseline : result.records)[i] = std::move(record);
  };

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  const std::size_t n_workers = std::min(config.max_in_flight, n_jobs);
  for (std::size_t w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      for (std::size_t job = next++; job < n_jobs; job = next++) run_job(job);
    });
  }
  for (auto& t : workers) t.join();

  auto& s = result.summary;
  s.total = n;
  s.fetched = static_cast<std::size_t>(std::count_if(result.records.begin(), result.records.end(),
                                                     [](const auto& r) { return r.status == CrawlStatus::fetched; }));
  s.coverage = static_cast<double>(s.fetched) / static_cast<double>(n);
  if (config.compute_baseline) {
    s.baseline_fetched = static_cast<std::size_t>(std::count_if(
        result.baseline.begin(), result.baseline.end(), [](const auto& r) { return r.status == CrawlStatus::fetched; }));
    s.baseline_coverage = static_cast<double>(s.baseline_fetched) / static_cast<double>(n);
  }
  s.network_requests = requests.load();
  s.cache_hits = cache_hits.load();
  return result;
}

std::string summary_json(const CrawlSummary& s) {
  json j;
  j["total"] = s.total;
  j["fetched"] = s.fetched;
  j["coverage"] = s.coverage;
  j["baseline_fetched"] = s.baseline_fetched;
  j["baseline_coverage"] = s.baseline_coverage;
  j["network_requests"] = s.network_requests;
  j["cache_hits"] = s.cache_hits;
  return dump(j);
}

}  // namespace lyrnet::fetch
