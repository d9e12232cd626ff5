// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/corpus/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

#include "lyrnet/ad/rng.hpp"

namespace lyrnet::corpus {
namespace {

constexpr std::array<const char*, 16> kSyllables{"ka", "lo", "mi", "ren", "tu", "sha", "vi", "dor",
                                                 "pel", "nu", "quo", "bax", "fen", "gli", "zar", "wim"};

// Distinct letters-only word for every index.
std::string word(std::size_t index) {
  std::string w = "la";
  std::size_t v = index;
  do {
    w += kSyllables[v % kSyllables.size()];
    v /= kSyllables.size();
  } while (v > 0);
  return w;
}

struct Layout {
  std::size_t per_quadrant;
  std::size_t filler;
};

Layout layout(std::size_t vocab_size) {
  const std::size_t v = std::max<std::size_t>(vocab_size, 8);
  const std::size_t per_quadrant = v / 8;
  return {per_quadrant, v - 4 * per_quadrant};
}

}  // namespace

std::vector<std::string> synthetic_keywords(Quadrant quadrant, std::size_t vocab_size) {
  const auto L = layout(vocab_size);
  std::vector<std::string> out;
  const std::size_t base = static_cast<std::size_t>(quadrant) * L.per_quadrant;
  for (std::size_t i = 0; i < L.per_quadrant; ++i) out.push_back(word(base + i));
  return out;
}

std::vector<LyricsDocument> generate_synthetic(const SyntheticOptions& options) {
  const auto L = layout(options.vocab_size);
  const ad::Rng root(options.seed, 0x73796e);  // "syn"
  std::vector<LyricsDocument> docs;
  docs.reserve(4 * options.n_per_quadrant);
  for (std::size_t i = 0; i < options.n_per_quadrant; ++i) {
    for (std::size_t q = 0; q < 4; ++q) {
      const std::size_t index = docs.size();
      ad::Rng rng = root.split(index);
      std::vector<std::string> words;
      for (std::size_t k = 0; k < options.keywords_per_doc; ++k) {
        words.push_back(word(q * L.per_quadrant + rng.below(L.per_quadrant)));
      }
      for (std::size_t k = 0; k < options.filler_per_doc; ++k) {
        words.push_back(word(4 * L.per_quadrant + rng.below(L.filler)));
      }
      rng.shuffle(words);

      std::string text;
      for (std::size_t k = 0; k < words.size(); ++k) {
        if (k > 0) text += (k % 6 == 0) ? ",\n" : " ";
        std::string w = words[k];
        if (k % 6 == 0) w[0] = static_cast<char>(w[0] - 'a' + 'A');
        text += w;
      }

      char id[32];
      std::snprintf(id, sizeof id, "syn-%05zu", index);
      LyricsDocument doc;
      doc.id = id;
      doc.artist = "Synthetic Artist " + std::to_string(index % 17);
      doc.title = word(4 * L.per_quadrant + rng.below(L.filler)) + " " +
                  word(4 * L.per_quadrant + rng.below(L.filler));
      doc.lyrics = std::move(text);
      doc.label = EmotionLabel(static_cast<Quadrant>(q));
      docs.push_back(std::move(doc));
    }
  }
  return docs;
}

}  // namespace lyrnet::corpus
