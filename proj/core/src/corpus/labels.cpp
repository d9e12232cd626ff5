// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/corpus/labels.hpp"

#include <string>

#include "lyrnet/error.hpp"

namespace lyrnet::corpus {

std::pair<Valence, Arousal> hemispheres_of(Quadrant quadrant) {
  switch (quadrant) {
    case Quadrant::Q1: return {Valence::positive, Arousal::high};
    case Quadrant::Q2: return {Valence::negative, Arousal::high};
    case Quadrant::Q3: return {Valence::negative, Arousal::low};
    case Quadrant::Q4: return {Valence::positive, Arousal::low};
  }
  throw ContractError("hemispheres_of: invalid quadrant");
}

Quadrant quadrant_of(Valence valence, Arousal arousal) {
  if (arousal == Arousal::high) return valence == Valence::positive ? Quadrant::Q1 : Quadrant::Q2;
  return valence == Valence::positive ? Quadrant::Q4 : Quadrant::Q3;
}

std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::Q1: return "Q1";
    case Quadrant::Q2: return "Q2";
    case Quadrant::Q3: return "Q3";
    case Quadrant::Q4: return "Q4";
  }
  return "?";
}

std::string_view to_string(Valence v) { return v == Valence::positive ? "positive" : "negative"; }
std::string_view to_string(Arousal a) { return a == Arousal::high ? "high" : "low"; }

std::optional<Quadrant> parse_quadrant(std::string_view text) {
  if (text == "Q1") return Quadrant::Q1;
  if (text == "Q2") return Quadrant::Q2;
  if (text == "Q3") return Quadrant::Q3;
  if (text == "Q4") return Quadrant::Q4;
  return std::nullopt;
}

std::optional<Valence> parse_valence(std::string_view text) {
  if (text == "positive") return Valence::positive;
  if (text == "negative") return Valence::negative;
  return std::nullopt;
}

std::optional<Arousal> parse_arousal(std::string_view text) {
  if (text == "high") return Arousal::high;
  if (text == "low") return Arousal::low;
  return std::nullopt;
}

EmotionLabel::EmotionLabel(Quadrant quadrant) : quadrant_(quadrant) {}

EmotionLabel::EmotionLabel(Quadrant quadrant, Valence valence, Arousal arousal)
    : quadrant_(quadrant) {
  const auto [v, a] = hemispheres_of(quadrant);
  if (v != valence || a != arousal) {
    throw DataError("inconsistent label: " + std::string(to_string(quadrant)) + " implies (" +
                    std::string(to_string(v)) + ", " + std::string(to_string(a)) + "), got (" +
                    std::string(to_string(valence)) + ", " + std::string(to_string(arousal)) + ")");
  }
}

EmotionLabel EmotionLabel::from_hemispheres(Valence valence, Arousal arousal) {
  return EmotionLabel(quadrant_of(valence, arousal));
}

std::optional<EmotionLabel> label_from_fields(const std::optional<std::string>& q_text,
                                              const std::optional<std::string>& v_text,
                                              const std::optional<std::string>& a_text,
                                              const std::string& where) {
  std::optional<Quadrant> q;
  std::optional<Valence> v;
  std::optional<Arousal> a;
  if (q_text && !(q = parse_quadrant(*q_text))) {
    throw DataError(where + ": unknown quadrant '" + *q_text + "'");
  }
  if (v_text && !(v = parse_valence(*v_text))) {
    throw DataError(where + ": unknown valence '" + *v_text + "'");
  }
  if (a_text && !(a = parse_arousal(*a_text))) {
    throw DataError(where + ": unknown arousal '" + *a_text + "'");
  }
  if (q) {
    const auto [ev, ea] = hemispheres_of(*q);
    if ((v && *v != ev) || (a && *a != ea)) {
      throw DataError(where + ": inconsistent label: " + std::string(to_string(*q)) + " requires valence " +
                      std::string(to_string(ev)) + " and arousal " + std::string(to_string(ea)));
    }
    return EmotionLabel(*q);
  }
  if (v && a) return EmotionLabel::from_hemispheres(*v, *a);
  if (v || a) throw DataError(where + ": partial label (one hemisphere without quadrant)");
  return std::nullopt;
}

}  // namespace lyrnet::corpus
