// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace lyrnet {

/// Reserved vocabulary ids shared by the tokenizer, encoder and heads.
inline constexpr std::size_t kPadId = 0;
inline constexpr std::size_t kUnknownId = 1;

}  // namespace lyrnet
