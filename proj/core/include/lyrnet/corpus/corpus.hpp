// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lyrnet/corpus/labels.hpp"
#include "lyrnet/corpus/vocabulary.hpp"

namespace lyrnet::corpus {

struct LyricsDocument {
  std::string id;
  std::string artist;
  std::string title;
  std::string lyrics;
  std::string url;
  std::optional<EmotionLabel> label;
  std::vector<std::size_t> tokens;  // filled by encode_documents
};

struct Corpus {
  std::vector<LyricsDocument> documents;
  Vocabulary vocab;
};

enum class VocabPolicy { build, frozen };

/// Parses corpus JSONL. Each non-blank line is an object with required
/// string fields `id` and `lyrics`; optional `artist`, `title`, `url`,
/// `quadrant` ("Q1".."Q4"), `valence` ("positive"|"negative"),
/// `arousal` ("high"|"low"). Hemispheres without a quadrant must come as a
/// pair. Throws DataError naming the line (syntax) or the id (labels,
/// duplicates).
std::vector<LyricsDocument> parse_documents(std::istream& in, const std::string& source = "<input>");

/// Vocabulary of the (truncated) words in first-appearance order, frozen.
Vocabulary build_vocabulary(const std::vector<LyricsDocument>& documents);

void encode_documents(std::vector<LyricsDocument>& documents, const Vocabulary& vocab);

/// Parses, then encodes with a vocabulary built from the documents (build)
/// or with `frozen_vocab` (frozen; required in that case).
Corpus load_corpus(const std::filesystem::path& path, VocabPolicy policy,
                   const Vocabulary* frozen_vocab = nullptr);
Corpus load_corpus(std::istream& in, VocabPolicy policy, const Vocabulary* frozen_vocab = nullptr,
                   const std::string& source = "<input>");

/// One JSONL line (without newline), fields in a fixed order.
std::string to_jsonl_record(const LyricsDocument& doc);
void write_documents(std::ostream& out, const std::vector<LyricsDocument>& documents);
void write_documents(const std::filesystem::path& path, const std::vector<LyricsDocument>& documents);

}  // namespace lyrnet::corpus
