// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/fetch/transport.hpp"

#include <cctype>
#include <charconv>
#include <string>
#include <vector>

#include "httplib.h"

namespace lyrnet::fetch {

Url Url::parse(std::string_view text) {
  Url u;
  const auto sep = text.find("://");
  if (sep == std::string_view::npos) throw InvalidParameterError("url '" + std::string(text) + "': missing scheme");
  for (char c : text.substr(0, sep)) u.scheme += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (u.scheme != "http" && u.scheme != "https") {
    throw InvalidParameterError("url '" + std::string(text) + "': unsupported scheme");
  }
  u.port = u.scheme == "https" ? 443 : 80;
  auto rest = text.substr(sep + 3);
  const auto slash = rest.find_first_of("/?");
  auto authority = rest.substr(0, slash);
  u.target = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  if (!u.target.empty() && u.target.front() == '?') u.target.insert(u.target.begin(), '/');
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    const auto port = authority.substr(colon + 1);
    int p = 0;
    const auto res = std::from_chars(port.data(), port.data() + port.size(), p);
    if (res.ec != std::errc() || res.ptr != port.data() + port.size() || p <= 0 || p > 65535) {
      throw InvalidParameterError("url '" + std::string(text) + "': bad port");
    }
    u.port = p;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) throw InvalidParameterError("url '" + std::string(text) + "': missing host");
  for (char c : authority) u.host += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return u;
}

std::string Url::origin() const {
  const bool default_port = (scheme == "http" && port == 80) || (scheme == "https" && port == 443);
  return scheme + "://" + host + (default_port ? "" : ":" + std::to_string(port));
}

std::string Url::host_key() const { return host + ":" + std::to_string(port); }

std::string url_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += ch;
    } else if (c == ' ') {
      out += '+';
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

std::string url_decode(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '+') {
      out += ' ';
    } else if (text[i] == '%' && i + 2 < text.size()) {
      unsigned v = 0;
      const auto res = std::from_chars(text.data() + i + 1, text.data() + i + 3, v, 16);
      if (res.ec == std::errc() && res.ptr == text.data() + i + 3) {
        out += static_cast<char>(v);
        i += 2;
      } else {
        out += '%';
      }
    } else {
      out += text[i];
    }
  }
  return out;
}

std::string resolve_href(const Url& base, std::string_view href) {
  if (href.find("://") != std::string_view::npos) return std::string(href);
  if (href.starts_with("//")) return base.scheme + ":" + std::string(href);
  if (href.starts_with("/")) return base.origin() + std::string(href);
  auto path = base.target.substr(0, base.target.find('?'));
  path = path.substr(0, path.rfind('/') + 1) + std::string(href);
  const auto query_at = path.find('?');
  const std::string query = query_at == std::string::npos ? "" : path.substr(query_at);
  path = path.substr(0, query_at);

  std::vector<std::string> segments;
  std::size_t start = 1;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string::npos) end = path.size();
    const auto seg = path.substr(start, end - start);
    const bool last = end == path.size();
    if (seg == "..") {
      if (!segments.empty()) segments.pop_back();
      if (last) segments.emplace_back();
    } else if (seg == ".") {
      if (last) segments.emplace_back();
    } else {
      segments.push_back(seg);
    }
    start = end + 1;
  }
  std::string normalized;
  for (const auto& seg : segments) normalized += "/" + seg;
  if (normalized.empty()) normalized = "/";
  return base.origin() + normalized + query;
}

HttpTransport::HttpTransport(std::chrono::milliseconds timeout, std::string user_agent)
    : timeout_(timeout), user_agent_(std::move(user_agent)) {}

HttpResponse HttpTransport::get(const std::string& url) {
  const auto u = Url::parse(url);
  if (u.scheme != "http") throw TransportError("https is not supported by this build: " + url);
  httplib::Client client(u.host, u.port);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_follow_location(true);
  const auto res = client.Get(u.target, {{"User-Agent", user_agent_}});
  if (!res) throw TransportError("GET " + url + ": " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

}  // namespace lyrnet::fetch
