// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dorfhar {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates a documented precondition or type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed interchange file. Carries the absolute byte offset and the
// header field (or payload section) where decoding stopped.
class DecodeError : public Error {
 public:
  DecodeError(std::uint64_t offset, std::string field, const std::string& message);

  std::uint64_t offset() const noexcept { return offset_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::uint64_t offset_;
  std::string field_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// (R R^T + lambda I) or (V^T V + gamma I) could not be factorized.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// A direction update produced a zero column that cannot be normalized.
class DegenerateDirectionError : public Error {
 public:
  DegenerateDirectionError(std::size_t column, const std::string& message);
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

// An iterative procedure produced a non-finite objective.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration is invalid. field() names the offending key path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace dorfhar
