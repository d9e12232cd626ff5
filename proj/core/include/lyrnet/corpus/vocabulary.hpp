// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lyrnet::corpus {

inline constexpr std::size_t kMaxTokens = 1024;

/// Token <-> id mapping with reserved ids pad = 0 and unknown = 1.
class Vocabulary {
 public:
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnknownToken = "<unk>";

  Vocabulary();
  /// Rebuilds a frozen vocabulary from its token list (ids are positions).
  /// Throws DataError if the reserved entries or uniqueness are violated.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  /// Returns the id of `token`, inserting it if absent. Throws ContractError
  /// when frozen and the token is new.
  std::size_t add(std::string_view token);
  std::optional<std::size_t> find(std::string_view token) const;
  /// Id of `token`, or the unknown id.
  std::size_t id_of(std::string_view token) const;
  const std::string& token_of(std::size_t id) const;

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.frozen_ == b.frozen_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  bool frozen_ = false;
};

/// Lowercases ASCII letters and splits on whitespace and ASCII punctuation,
/// dropping the punctuation. Bytes >= 0x80 are kept as word characters.
/// At most `max_words` words are returned (the first ones).
std::vector<std::string> split_words(std::string_view text,
                                     std::size_t max_words = static_cast<std::size_t>(-1));

/// split_words, then vocabulary lookup with unknown -> 1, truncated to max_len.
std::vector<std::size_t> tokenize(std::string_view text, const Vocabulary& vocab,
                                  std::size_t max_len = kMaxTokens);

/// Space-joined tokens for `ids`.
std::string detokenize(std::span<const std::size_t> ids, const Vocabulary& vocab);

}  // namespace lyrnet::corpus
