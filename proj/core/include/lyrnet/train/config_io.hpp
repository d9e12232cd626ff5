// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lyrnet/model.hpp"
#include "lyrnet/train/trainer.hpp"

namespace lyrnet::train {

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// Flat "section.key" -> text view of a model and training config. Reals use
/// the shortest round-trip representation.
ConfigEntries config_entries(const ModelConfig& model, const TrainingConfig& training);

/// Applies one entry. Throws InvalidParameterError for an unknown key or an
/// unparsable value.
void apply_config_entry(std::string_view key, std::string_view value, ModelConfig& model,
                        TrainingConfig& training);

std::string format_real(double value);

}  // namespace lyrnet::train
