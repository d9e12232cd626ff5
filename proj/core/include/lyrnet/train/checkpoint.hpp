// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>

#include "lyrnet/corpus/vocabulary.hpp"
#include "lyrnet/model.hpp"
#include "lyrnet/train/trainer.hpp"

namespace lyrnet::train {

inline constexpr int kCheckpointFormatVersion = 1;

struct ModelCheckpoint {
  EmotionModel model;
  corpus::Vocabulary vocab;
  TrainingConfig training;
};

/// Writes a text manifest (magic, format version, config, vocabulary,
/// parameter table, precision, checksums) terminated by "end", followed by
/// the little-endian parameter payload in manifest order. Payload values are
/// float32 when training.precision is f32, float64 otherwise.
void save_checkpoint(const ModelCheckpoint& checkpoint, std::ostream& out);
void save_checkpoint(const ModelCheckpoint& checkpoint, const std::filesystem::path& path);

/// Throws CheckpointError whose kind distinguishes unreadable files, foreign
/// formats, version mismatches, truncation, parameter shape mismatches and
/// checksum failures.
ModelCheckpoint load_checkpoint(std::istream& in);
ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

/// CRC-32 (zlib polynomial) of a byte string.
std::uint32_t crc32_of(std::string_view bytes);

}  // namespace lyrnet::train
