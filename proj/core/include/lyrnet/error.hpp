// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace lyrnet {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor shapes that do not compose (matmul inner dims, concat axes, ...).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A precondition of an operation was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A numeric argument outside its admissible range (dropout p >= 1, ...).
class InvalidParameterError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// Malformed or inconsistent input data: corpus files, labels, splits.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss or gradient.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

enum class CheckpointErrorKind { io, format, version, truncated, shape, integrity };

/// Loading or saving a checkpoint failed; kind() says how.
class CheckpointError : public Error {
 public:
  CheckpointError(CheckpointErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  CheckpointErrorKind kind() const noexcept { return kind_; }

 private:
  CheckpointErrorKind kind_;
};

}  // namespace lyrnet
