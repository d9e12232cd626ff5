// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <string>
#include <string_view>

#include "lyrnet/error.hpp"

namespace lyrnet::fetch {

/// Connection-level failure: refused, reset, timed out, unsupported scheme.
class TransportError : public Error {
 public:
  using Error::Error;
};

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;    // lowercase
  int port = 80;
  std::string target = "/";  // path plus query

  /// Throws InvalidParameterError unless `text` is an absolute http(s) URL.
  static Url parse(std::string_view text);

  std::string origin() const;    // scheme://host[:port]
  std::string host_key() const;  // host:port, the politeness unit
  std::string str() const { return origin() + target; }
};

/// Percent-encodes everything except unreserved characters; spaces become '+'.
std::string url_encode(std::string_view text);
std::string url_decode(std::string_view text);

/// Resolves `href` (absolute, root-relative or path-relative) against `base`.
std::string resolve_href(const Url& base, std::string_view href);

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Blocking GET. Implementations must be safe to call from several threads.
class Transport {
 public:
  virtual ~Transport() = default;
  /// Returns any HTTP status; throws TransportError when no response arrives.
  virtual HttpResponse get(const std::string& url) = 0;
};

/// Plain-HTTP transport backed by cpp-httplib.
class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(std::chrono::milliseconds timeout = std::chrono::seconds(10),
                         std::string user_agent = "lyrnet/0.1");
  HttpResponse get(const std::string& url) override;

 private:
  std::chrono::milliseconds timeout_;
  std::string user_agent_;
};

}  // namespace lyrnet::fetch
