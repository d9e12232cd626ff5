// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/train/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "lyrnet/error.hpp"
#include "lyrnet/train/config_io.hpp"

namespace lyrnet::train {

using Kind = CheckpointErrorKind;

namespace {

constexpr std::string_view kMagic = "lyrnet-checkpoint";
constexpr std::string_view kVersionKey = "format_version=";
constexpr std::string_view kManifestCrcKey = "manifest.crc32=";

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '\\') {
      out += "\\\\";
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\r') {
      out += "\\r";
    } else {
      out += c;
    }
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out += s[i];
      continue;
    }
    const char n = s[++i];
    out += n == 'n' ? '\n' : n == 'r' ? '\r' : n;
  }
  return out;
}

std::string shape_text(const ad::Shape& shape) {
  std::string out;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(shape[i]);
  }
  return out;
}

template <typename U>
void put_le(std::string& out, U bits) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out += static_cast<char>((bits >> (8 * i)) & 0xFF);
}

template <typename U>
U get_le(const char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

std::string payload_of(const ParameterList& params, Precision precision) {
  std::string out;
  for (const auto& p : params) {
    for (double v : p.tensor.data()) {
      if (precision == Precision::f32) {
        put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      } else {
        put_le(out, std::bit_cast<std::uint64_t>(v));
      }
    }
  }
  return out;
}

bool parse_u64(std::string_view text, std::uint64_t& out, int base = 10) {
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out, base);
  return res.ec == std::errc() && res.ptr == text.data() + text.size() && !text.empty();
}

}  // namespace

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

void save_checkpoint(const ModelCheckpoint& ck, std::ostream& out) {
  const auto params = ck.model.parameters();
  const auto payload = payload_of(params, ck.training.precision);

  std::string manifest;
  manifest += std::string(kMagic) + "\n";
  manifest += std::string(kVersionKey) + std::to_string(kCheckpointFormatVersion) + "\n";
  manifest += "precision=" + std::string(to_string(ck.training.precision)) + "\n";
  for (const auto& [k, v] : config_entries(ck.model.config(), ck.training)) manifest += k + "=" + v + "\n";
  manifest += "vocab.size=" + std::to_string(ck.vocab.size()) + "\n";
  for (const auto& tok : ck.vocab.tokens()) manifest += "vocab=" + escape(tok) + "\n";
  for (const auto& p : params) manifest += "param=" + p.name + " " + shape_text(p.tensor.shape()) + "\n";
  manifest += "payload.bytes=" + std::to_string(payload.size()) + "\n";
  manifest += "payload.crc32=" + hex32(crc32_of(payload)) + "\n";
  manifest += std::string(kManifestCrcKey) + hex32(crc32_of(manifest)) + "\n";
  manifest += "end\n";

  out.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw CheckpointError(Kind::io, "checkpoint: write failed");
}

void save_checkpoint(const ModelCheckpoint& ck, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError(Kind::io, "checkpoint: cannot open " + path.string() + " for writing");
  save_checkpoint(ck, out);
  out.close();
  if (!out) throw CheckpointError(Kind::io, "checkpoint: write failed for " + path.string());
}

ModelCheckpoint load_checkpoint(std::istream& in) {
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  // Manifest lines up to and including "end".
  std::vector<std::string_view> lines;
  std::vector<std::size_t> offsets;
  std::size_t pos = 0;
  std::size_t payload_begin = std::string::npos;
  while (pos < bytes.size()) {
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string::npos) break;
    const std::string_view line(bytes.data() + pos, nl - pos);
    lines.push_back(line);
    offsets.push_back(pos);
    pos = nl + 1;
    if (line == "end") {
      payload_begin = pos;
      break;
    }
  }
  if (lines.empty() || lines.front() != kMagic) {
    if (bytes.empty() || kMagic.starts_with(std::string_view(bytes).substr(0, kMagic.size()))) {
      throw CheckpointError(Kind::truncated, "checkpoint: file ends inside the header");
    }
    throw CheckpointError(Kind::format, "checkpoint: not a lyrnet checkpoint");
  }
  if (lines.size() >= 2 && lines[1].starts_with(kVersionKey)) {
    std::uint64_t version = 0;
    const auto text = lines[1].substr(kVersionKey.size());
    if (parse_u64(text, version) && version != static_cast<std::uint64_t>(kCheckpointFormatVersion)) {
      throw CheckpointError(Kind::version, "checkpoint: format version " + std::string(text) +
                                               " is not supported (expected " +
                                               std::to_string(kCheckpointFormatVersion) + ")");
    }
  }
  if (payload_begin == std::string::npos) {
    throw CheckpointError(Kind::truncated, "checkpoint: manifest has no end marker");
  }
  const std::size_t n = lines.size();
  if (n < 3 || !lines[n - 2].starts_with(kManifestCrcKey)) {
    throw CheckpointError(Kind::integrity, "checkpoint: manifest checksum line missing");
  }
  std::uint64_t stored_crc = 0;
  if (!parse_u64(lines[n - 2].substr(kManifestCrcKey.size()), stored_crc, 16) ||
      stored_crc != crc32_of(std::string_view(bytes).substr(0, offsets[n - 2]))) {
    throw CheckpointError(Kind::integrity, "checkpoint: manifest checksum mismatch");
  }
  if (lines[1] != std::string(kVersionKey) + std::to_string(kCheckpointFormatVersion)) {
    throw CheckpointError(Kind::version, "checkpoint: unsupported format version line '" +
                                             std::string(lines[1]) + "'");
  }

  ModelConfig model_config;
  TrainingConfig training;
  std::vector<std::string> vocab_tokens;
  std::uint64_t vocab_size = 0;
  std::vector<std::pair<std::string, std::string>> param_table;
  std::uint64_t payload_bytes = 0;
  std::uint64_t payload_crc = 0;
  std::optional<Precision> precision;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const auto line = lines[i];
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw CheckpointError(Kind::format, "checkpoint: malformed manifest line '" + std::string(line) + "'");
    }
    const auto key = line.substr(0, eq);
    const auto value = line.substr(eq + 1);
    if (key == "vocab") {
      vocab_tokens.push_back(unescape(value));
    } else if (key == "vocab.size") {
      if (!parse_u64(value, vocab_size)) throw CheckpointError(Kind::format, "checkpoint: bad vocab.size");
    } else if (key == "param") {
      const auto sp = value.rfind(' ');
      if (sp == std::string_view::npos) throw CheckpointError(Kind::format, "checkpoint: bad param line");
      param_table.emplace_back(std::string(value.substr(0, sp)), std::string(value.substr(sp + 1)));
    } else if (key == "payload.bytes") {
      if (!parse_u64(value, payload_bytes)) throw CheckpointError(Kind::format, "checkpoint: bad payload.bytes");
    } else if (key == "payload.crc32") {
      if (!parse_u64(value, payload_crc, 16)) throw CheckpointError(Kind::format, "checkpoint: bad payload.crc32");
    } else if (key == "precision") {
      precision = parse_precision(value);
      if (!precision) throw CheckpointError(Kind::format, "checkpoint: bad precision tag");
    } else {
      try {
        apply_config_entry(key, value, model_config, training);
      } catch (const InvalidParameterError& e) {
        throw CheckpointError(Kind::format, std::string("checkpoint: ") + e.what());
      }
    }
  }
  if (!precision) throw CheckpointError(Kind::format, "checkpoint: precision tag missing");
  training.precision = *precision;
  if (vocab_tokens.size() != vocab_size) {
    throw CheckpointError(Kind::format, "checkpoint: vocabulary has " + std::to_string(vocab_tokens.size()) +
                                            " entries, manifest declares " + std::to_string(vocab_size));
  }

  const std::string_view payload = std::string_view(bytes).substr(payload_begin);
  if (payload.size() < payload_bytes) {
    throw CheckpointError(Kind::truncated, "checkpoint: payload has " + std::to_string(payload.size()) +
                                               " bytes, expected " + std::to_string(payload_bytes));
  }
  if (payload.size() > payload_bytes) {
    throw CheckpointError(Kind::integrity, "checkpoint: trailing bytes after payload");
  }
  if (crc32_of(payload) != payload_crc) {
    throw CheckpointError(Kind::integrity, "checkpoint: payload checksum mismatch");
  }

  std::optional<EmotionModel> model;
  try {
    model_config.validate();
    ad::Rng placeholder(0);
    model.emplace(model_config, placeholder);
  } catch (const ContractError& e) {
    throw CheckpointError(Kind::format, std::string("checkpoint: invalid model config: ") + e.what());
  }
  const auto params = model->parameters();
  if (params.size() != param_table.size()) {
    throw CheckpointError(Kind::shape, "checkpoint: " + std::to_string(param_table.size()) +
                                           " parameters listed, config implies " + std::to_string(params.size()));
  }
  std::size_t expected_bytes = 0;
  const std::size_t width = *precision == Precision::f32 ? 4 : 8;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& [name, shape] = param_table[i];
    const auto want = shape_text(params[i].tensor.shape());
    if (name != params[i].name || shape != want) {
      throw CheckpointError(Kind::shape, "checkpoint: parameter " + std::to_string(i) + " is " + name + " [" +
                                             shape + "], config implies " + params[i].name + " [" + want + "]");
    }
    expected_bytes += params[i].tensor.size() * width;
  }
  if (expected_bytes != payload_bytes) {
    throw CheckpointError(Kind::shape, "checkpoint: payload of " + std::to_string(payload_bytes) +
                                           " bytes does not match the parameter table (" +
                                           std::to_string(expected_bytes) + ")");
  }
  const char* p = payload.data();
  for (const auto& param : params) {
    ad::Tensor t = param.tensor;
    for (auto& v : t.mutable_data()) {
      if (width == 4) {
        v = static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(p)));
      } else {
        v = std::bit_cast<double>(get_le<std::uint64_t>(p));
      }
      p += width;
    }
  }

  corpus::Vocabulary vocab;
  try {
    vocab = corpus::Vocabulary::from_tokens(std::move(vocab_tokens));
  } catch (const Error& e) {
    throw CheckpointError(Kind::format, std::string("checkpoint: bad vocabulary: ") + e.what());
  }
  return ModelCheckpoint{std::move(*model), std::move(vocab), training};
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(Kind::io, "checkpoint: cannot open " + path.string());
  return load_checkpoint(in);
}

}  // namespace lyrnet::train
