// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/corpus/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "json.hpp"
#include "lyrnet/error.hpp"

namespace lyrnet::corpus {

using json = nlohmann::ordered_json;

namespace {

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DataError(where + ": field '" + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<EmotionLabel> parse_label(const json& obj, const std::string& id) {
  const std::string where = "document '" + id + "'";
  return label_from_fields(optional_string(obj, "quadrant", where), optional_string(obj, "valence", where),
                           optional_string(obj, "arousal", where), where);
}

}  // namespace

std::vector<LyricsDocument> parse_documents(std::istream& in, const std::string& source) {
  std::vector<LyricsDocument> docs;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object()) throw DataError(where + ": record is not a JSON object");
    const auto id = optional_string(obj, "id", where);
    const auto lyrics = optional_string(obj, "lyrics", where);
    if (!id || id->empty()) throw DataError(where + ": missing required field 'id'");
    if (!lyrics) throw DataError(where + ": missing required field 'lyrics'");
    if (!ids.insert(*id).second) throw DataError(where + ": duplicate id '" + *id + "'");

    LyricsDocument doc;
    doc.id = *id;
    doc.lyrics = *lyrics;
    doc.artist = optional_string(obj, "artist", where).value_or("");
    doc.title = optional_string(obj, "title", where).value_or("");
    doc.url = optional_string(obj, "url", where).value_or("");
    doc.label = parse_label(obj, doc.id);
    docs.push_back(std::move(doc));
  }
  return docs;
}

Vocabulary build_vocabulary(const std::vector<LyricsDocument>& documents) {
  Vocabulary vocab;
  for (const auto& doc : documents) {
    for (const auto& w : split_words(doc.lyrics, kMaxTokens)) vocab.add(w);
  }
  vocab.freeze();
  return vocab;
}

void encode_documents(std::vector<LyricsDocument>& documents, const Vocabulary& vocab) {
  for (auto& doc : documents) doc.tokens = tokenize(doc.lyrics, vocab, kMaxTokens);
}

Corpus load_corpus(std::istream& in, VocabPolicy policy, const Vocabulary* frozen_vocab,
                   const std::string& source) {
  Corpus corpus;
  corpus.documents = parse_documents(in, source);
  if (policy == VocabPolicy::build) {
    corpus.vocab = build_vocabulary(corpus.documents);
  } else {
    if (frozen_vocab == nullptr) throw ContractError("load_corpus: frozen policy needs a vocabulary");
    corpus.vocab = *frozen_vocab;
    corpus.vocab.freeze();
  }
  encode_documents(corpus.documents, corpus.vocab);
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, VocabPolicy policy,
                   const Vocabulary* frozen_vocab) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  return load_corpus(in, policy, frozen_vocab, path.string());
}

std::string to_jsonl_record(const LyricsDocument& doc) {
  json obj;
  obj["id"] = doc.id;
  if (!doc.artist.empty()) obj["artist"] = doc.artist;
  if (!doc.title.empty()) obj["title"] = doc.title;
  if (!doc.url.empty()) obj["url"] = doc.url;
  if (doc.label) {
    obj["quadrant"] = to_string(doc.label->quadrant());
    obj["valence"] = to_string(doc.label->valence());
    obj["arousal"] = to_string(doc.label->arousal());
  }
  obj["lyrics"] = doc.lyrics;
  return obj.dump(-1, ' ', false, json::error_handler_t::replace);
}

void write_documents(std::ostream& out, const std::vector<LyricsDocument>& documents) {
  for (const auto& d : documents) out << to_jsonl_record(d) << '\n';
}

void write_documents(const std::filesystem::path& path,
                     const std::vector<LyricsDocument>& documents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_documents(out, documents);
}

}  // namespace lyrnet::corpus
