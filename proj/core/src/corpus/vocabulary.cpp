// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/corpus/vocabulary.hpp"

#include "lyrnet/error.hpp"
#include "lyrnet/tokens.hpp"

namespace lyrnet::corpus {

Vocabulary::Vocabulary() {
  add(kPadToken);
  add(kUnknownToken);
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < 2 || tokens[kPadId] != kPadToken || tokens[kUnknownId] != kUnknownToken) {
    throw DataError("vocabulary: reserved tokens missing from positions 0 and 1");
  }
  Vocabulary v;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    if (v.find(tokens[i])) throw DataError("vocabulary: duplicate token '" + tokens[i] + "'");
    v.add(tokens[i]);
  }
  v.freeze();
  return v;
}

std::size_t Vocabulary::add(std::string_view token) {
  if (auto id = find(token)) return *id;
  if (frozen_) {
    throw ContractError("vocabulary is frozen; cannot insert '" + std::string(token) + "'");
  }
  const std::size_t id = tokens_.size();
  tokens_.emplace_back(token);
  index_.emplace(tokens_.back(), id);
  return id;
}

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::id_of(std::string_view token) const {
  return find(token).value_or(kUnknownId);
}

const std::string& Vocabulary::token_of(std::size_t id) const {
  if (id >= tokens_.size()) {
    throw ContractError("vocabulary: id " + std::to_string(id) + " out of range");
  }
  return tokens_[id];
}

namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
         (c >= 0x7B && c <= 0x7E);
}

}  // namespace

std::vector<std::string> split_words(std::string_view text, std::size_t max_words) {
  std::vector<std::string> words;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_space(c) || is_punct(c) || c < 0x20 || c == 0x7F) {
      if (!current.empty()) {
        words.push_back(std::move(current));
        current.clear();
        if (words.size() >= max_words) return words;
      }
      continue;
    }
    current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
  }
  if (!current.empty() && words.size() < max_words) words.push_back(std::move(current));
  return words;
}

std::vector<std::size_t> tokenize(std::string_view text, const Vocabulary& vocab,
                                  std::size_t max_len) {
  std::vector<std::size_t> ids;
  for (const auto& w : split_words(text, max_len)) ids.push_back(vocab.id_of(w));
  return ids;
}

std::string detokenize(std::span<const std::size_t> ids, const Vocabulary& vocab) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out.push_back(' ');
    out += vocab.token_of(ids[i]);
  }
  return out;
}

}  // namespace lyrnet::corpus
