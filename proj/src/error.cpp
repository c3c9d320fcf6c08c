// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include "dorfhar/error.hpp"

#include <utility>

namespace dorfhar {

DecodeError::DecodeError(std::uint64_t offset, std::string field, const std::string& message)
    : Error("decode error at byte " + std::to_string(offset) + " (" + field + "): " + message),
      offset_(offset),
      field_(std::move(field)) {}

DegenerateDirectionError::DegenerateDirectionError(std::size_t column, const std::string& message)
    : Error("degenerate direction in column " + std::to_string(column) + ": " + message),
      column_(column) {}

ConfigError::ConfigError(std::string field, const std::string& message)
    : Error("config error in '" + field + "': " + message), field_(std::move(field)) {}

}  // namespace dorfhar
