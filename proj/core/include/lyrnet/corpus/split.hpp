// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lyrnet/corpus/corpus.hpp"

namespace lyrnet::corpus {

struct SplitSpec {
  std::string name;
  double ratio = 0.0;
};

struct NamedSplit {
  std::string name;
  std::vector<LyricsDocument> documents;  // in original corpus order
};

/// Quadrant-stratified seeded split.
///
/// Within each quadrant the documents are shuffled and apportioned by the
/// largest-remainder rule, so every split's per-quadrant count is within one
/// document of ratio * quadrant size. Ratios must be positive and sum to 1
/// within 1e-9. Throws DataError when a document is unlabeled or a present
/// quadrant cannot give every split at least one document.
std::vector<NamedSplit> split_corpus(const std::vector<LyricsDocument>& documents,
                                     const std::vector<SplitSpec>& specs, std::uint64_t seed);

}  // namespace lyrnet::corpus
