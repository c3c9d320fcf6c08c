// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include "dorfhar/container.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "dorfhar/error.hpp"

namespace dorfhar {

namespace {

constexpr std::uint64_t kPrefixBytes = 16;

void put_u64_le(std::vector<std::byte>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
}

std::uint64_t get_u64_le(const std::byte* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

void PayloadWriter::put_f64(double v) { put_u64_le(bytes_, std::bit_cast<std::uint64_t>(v)); }

void PayloadWriter::put_f64s(std::span<const double> values) {
  bytes_.reserve(bytes_.size() + 8 * values.size());
  for (double v : values) put_f64(v);
}

double PayloadReader::f64(std::uint64_t offset, const std::string& field) const {
  if (offset > bytes_.size() || bytes_.size() - offset < 8)
    throw DecodeError(base_ + offset, field, "payload truncated");
  return std::bit_cast<double>(get_u64_le(bytes_.data() + offset));
}

void PayloadReader::f64s(std::uint64_t offset, std::span<double> out,
                         const std::string& field) const {
  const std::uint64_t need = 8 * static_cast<std::uint64_t>(out.size());
  if (offset > bytes_.size() || bytes_.size() - offset < need)
    throw DecodeError(base_ + std::min<std::uint64_t>(offset, bytes_.size()), field,
                      "payload truncated: need " + std::to_string(need) + " bytes");
  const std::byte* p = bytes_.data() + offset;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::bit_cast<double>(get_u64_le(p + 8 * i));
}

void write_container(const std::filesystem::path& path, const nlohmann::json& header,
                     std::span<const std::byte> payload) {
  const std::string text = header.dump();
  std::vector<std::byte> prefix;
  for (char c : kContainerMagic) prefix.push_back(static_cast<std::byte>(c));
  put_u64_le(prefix, text.size());

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(prefix.data()), static_cast<std::streamsize>(prefix.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Container read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");

  if (raw.size() < kPrefixBytes) throw DecodeError(raw.size(), "magic", "file shorter than prefix");
  if (std::memcmp(raw.data(), kContainerMagic, 8) != 0)
    throw DecodeError(0, "magic", "not a dorfhar container");
  const std::uint64_t header_len = get_u64_le(reinterpret_cast<const std::byte*>(raw.data() + 8));
  if (header_len > raw.size() - kPrefixBytes)
    throw DecodeError(8, "header_length", "header length exceeds file size");

  Container c;
  try {
    c.header = nlohmann::json::parse(raw.begin() + kPrefixBytes,
                                     raw.begin() + static_cast<std::ptrdiff_t>(kPrefixBytes + header_len));
  } catch (const nlohmann::json::parse_error& e) {
    throw DecodeError(kPrefixBytes + (e.byte > 0 ? e.byte - 1 : 0), "header", e.what());
  }
  if (!c.header.is_object()) throw DecodeError(kPrefixBytes, "header", "header is not a JSON object");

  const auto version = header_get<std::string>(c.header, "version", "version", kPrefixBytes);
  const auto dot = version.find('.');
  int major = -1;
  try {
    major = std::stoi(version.substr(0, dot));
  } catch (const std::exception&) {
    throw DecodeError(kPrefixBytes, "version", "unparseable version '" + version + "'");
  }
  if (major != kContainerMajorVersion)
    throw DecodeError(kPrefixBytes, "version", "unsupported major version " + std::to_string(major));

  c.payload_offset = kPrefixBytes + header_len;
  c.payload.resize(raw.size() - c.payload_offset);
  std::memcpy(c.payload.data(), raw.data() + c.payload_offset, c.payload.size());
  return c;
}

template <typename T>
T header_get(const nlohmann::json& object, const char* key, const std::string& field,
             std::uint64_t offset) {
  if (!object.is_object() || !object.contains(key)) throw DecodeError(offset, field, "missing field");
  const auto& v = object.at(key);
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw DecodeError(offset, field, "expected string");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw DecodeError(offset, field, "expected boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw DecodeError(offset, field, "expected integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw DecodeError(offset, field, "expected number");
    }
    return v.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(offset, field, e.what());
  }
}

template std::string header_get<std::string>(const nlohmann::json&, const char*, const std::string&, std::uint64_t);
template int header_get<int>(const nlohmann::json&, const char*, const std::string&, std::uint64_t);
template std::int64_t header_get<std::int64_t>(const nlohmann::json&, const char*, const std::string&, std::uint64_t);
template std::uint64_t header_get<std::uint64_t>(const nlohmann::json&, const char*, const std::string&, std::uint64_t);
template double header_get<double>(const nlohmann::json&, const char*, const std::string&, std::uint64_t);
template bool header_get<bool>(const nlohmann::json&, const char*, const std::string&, std::uint64_t);

}  // namespace dorfhar
