// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lyrnet/corpus/corpus.hpp"

namespace lyrnet::corpus {

struct SyntheticOptions {
  std::size_t n_per_quadrant = 8;
  /// Distinct content words: one eighth per quadrant as keywords, the rest
  /// shared filler. Values below 8 are raised to 8.
  std::size_t vocab_size = 200;
  std::uint64_t seed = 0;
  std::size_t keywords_per_doc = 8;
  std::size_t filler_per_doc = 12;
};

/// Labeled corpus whose quadrants are separable by construction: every
/// document mixes words from its quadrant's private keyword set with shared
/// filler. Documents are interleaved Q1, Q2, Q3, Q4, Q1, ...
std::vector<LyricsDocument> generate_synthetic(const SyntheticOptions& options);

/// Keyword set of one quadrant under `vocab_size`.
std::vector<std::string> synthetic_keywords(Quadrant quadrant, std::size_t vocab_size);

}  // namespace lyrnet::corpus
