// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace dorfhar {

// Binary container shared by datasets, fitted models and fields:
//
//   bytes 0..7    magic "DORFHAR\0"
//   bytes 8..15   header length H, uint64 little-endian
//   bytes 16..    H bytes of UTF-8 JSON header
//   bytes 16+H..  payload; offsets in the header are relative to its start
//
// Every header carries "version": "MAJOR.MINOR". Readers reject other majors.
inline constexpr char kContainerMagic[8] = {'D', 'O', 'R', 'F', 'H', 'A', 'R', '\0'};
inline constexpr int kContainerMajorVersion = 1;
inline constexpr const char* kContainerVersion = "1.0";

struct Container {
  nlohmann::json header;
  std::vector<std::byte> payload;
  std::uint64_t payload_offset = 0;  // absolute file offset of payload[0]
};

void write_container(const std::filesystem::path& path, const nlohmann::json& header,
                     std::span<const std::byte> payload);

/// Throws IoError if unreadable, DecodeError on malformed structure or an
/// unsupported major version.
Container read_container(const std::filesystem::path& path);

/// Appends IEEE-754 binary64 values in little-endian byte order.
class PayloadWriter {
 public:
  std::uint64_t size() const noexcept { return bytes_.size(); }
  void put_f64(double v);
  void put_f64s(std::span<const double> values);
  std::span<const std::byte> bytes() const noexcept { return bytes_; }

 private:
  std::vector<std::byte> bytes_;
};

/// Bounds-checked little-endian reads; errors report absolute file offsets.
class PayloadReader {
 public:
  explicit PayloadReader(const Container& c) : bytes_(c.payload), base_(c.payload_offset) {}

  double f64(std::uint64_t offset, const std::string& field) const;
  void f64s(std::uint64_t offset, std::span<double> out, const std::string& field) const;

 private:
  std::span<const std::byte> bytes_;
  std::uint64_t base_;
};

/// Fetch header[key] with a type check; `field` names the full key path
/// used in DecodeError messages.
template <typename T>
T header_get(const nlohmann::json& object, const char* key, const std::string& field,
             std::uint64_t offset);

}  // namespace dorfhar
