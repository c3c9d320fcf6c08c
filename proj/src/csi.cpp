// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include "dorfhar/csi.hpp"

#include <cmath>
#include <cstdint>
#include <utility>

#include "dorfhar/error.hpp"

namespace dorfhar {

std::string to_string(const AntennaId& id) {
  return "(" + std::to_string(id.ap) + "," + std::to_string(id.antenna) + ")";
}

std::vector<AntennaId> ArrayLayout::antennas() const {
  std::vector<AntennaId> out;
  out.reserve(static_cast<std::size_t>(antenna_count()));
  for (int q = 0; q < ap_count; ++q)
    for (int a = 0; a < antennas_per_ap; ++a) out.push_back({q, a});
  return out;
}

bool ArrayLayout::contains(const AntennaId& id) const noexcept {
  return id.ap >= 0 && id.ap < ap_count && id.antenna >= 0 && id.antenna < antennas_per_ap;
}

CsiFrameSet::CsiFrameSet(RadioConfig radio, ArrayLayout layout, std::vector<double> timestamps,
                         std::vector<cdouble> samples)
    : radio_(radio),
      layout_(layout),
      timestamps_(std::move(timestamps)),
      samples_(std::move(samples)) {
  if (layout_.ap_count < 1 || layout_.antennas_per_ap < 1)
    throw ValidationError("csi: layout needs at least one AP and one antenna per AP");
  if (timestamps_.empty()) throw ValidationError("csi: at least one frame is required");
  const std::size_t expected = timestamps_.size() *
                               static_cast<std::size_t>(radio_.subcarrier_count()) *
                               static_cast<std::size_t>(layout_.antenna_count());
  if (samples_.size() != expected)
    throw ValidationError("csi: expected " + std::to_string(expected) + " samples, got " +
                          std::to_string(samples_.size()));
  for (std::size_t s = 0; s < timestamps_.size(); ++s) {
    if (!std::isfinite(timestamps_[s]))
      throw ValidationError("csi: non-finite timestamp at frame " + std::to_string(s));
    if (s > 0 && !(timestamps_[s] > timestamps_[s - 1]))
      throw ValidationError("csi: timestamps must be strictly increasing (frame " +
                            std::to_string(s) + ")");
  }
}

std::vector<cdouble> CsiFrameSet::frame(std::size_t s, const AntennaId& id) const {
  const int n_sub = radio_.subcarrier_count();
  std::vector<cdouble> out(static_cast<std::size_t>(n_sub));
  for (int n = 0; n < n_sub; ++n) out[static_cast<std::size_t>(n)] = at(s, n, id.antenna, id.ap);
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  std::uint64_t z = base ^ ((stream << 32) | (stream >> 32)) ^ (stream * 0x9E3779B97F4A7C15ULL);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace dorfhar
