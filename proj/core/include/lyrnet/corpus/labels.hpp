// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace lyrnet::corpus {

// Class indices double as classifier targets.
enum class Quadrant { Q1 = 0, Q2 = 1, Q3 = 2, Q4 = 3 };
enum class Valence { positive = 0, negative = 1 };
enum class Arousal { high = 0, low = 1 };

/// Q1 = (+V, +A), Q2 = (-V, +A), Q3 = (-V, -A), Q4 = (+V, -A).
std::pair<Valence, Arousal> hemispheres_of(Quadrant quadrant);
Quadrant quadrant_of(Valence valence, Arousal arousal);

std::string_view to_string(Quadrant q);
std::string_view to_string(Valence v);
std::string_view to_string(Arousal a);
std::optional<Quadrant> parse_quadrant(std::string_view text);
std::optional<Valence> parse_valence(std::string_view text);
std::optional<Arousal> parse_arousal(std::string_view text);

/// A quadrant together with its hemispheres; always consistent.
class EmotionLabel {
 public:
  explicit EmotionLabel(Quadrant quadrant);
  /// Throws DataError if the triple disagrees with the quadrant convention.
  EmotionLabel(Quadrant quadrant, Valence valence, Arousal arousal);
  static EmotionLabel from_hemispheres(Valence valence, Arousal arousal);

  Quadrant quadrant() const { return quadrant_; }
  Valence valence() const { return hemispheres_of(quadrant_).first; }
  Arousal arousal() const { return hemispheres_of(quadrant_).second; }

  friend bool operator==(const EmotionLabel&, const EmotionLabel&) = default;

 private:
  Quadrant quadrant_;
};

/// Label from optional textual fields. A quadrant alone, a quadrant with
/// consistent hemispheres, or both hemispheres form a label; no fields give
/// nullopt. Throws DataError (prefixed by `where`) on unknown values,
/// inconsistent hemispheres or a lone hemisphere.
std::optional<EmotionLabel> label_from_fields(const std::optional<std::string>& quadrant,
                                              const std::optional<std::string>& valence,
                                              const std::optional<std::string>& arousal,
                                              const std::string& where);

}  // namespace lyrnet::corpus
