// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

#include <compare>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dorfhar/radio.hpp"

namespace dorfhar {

using cdouble = std::complex<double>;

/// Receive antenna `antenna` on access point `ap`, both zero-based.
struct AntennaId {
  int ap = 0;
  int antenna = 0;

  auto operator<=>(const AntennaId&) const = default;
};

std::string to_string(const AntennaId& id);

/// Q access points with the same number of antennas each.
struct ArrayLayout {
  int ap_count = 1;
  int antennas_per_ap = 1;

  int antenna_count() const noexcept { return ap_count * antennas_per_ap; }
  std::vector<AntennaId> antennas() const;
  bool contains(const AntennaId& id) const noexcept;

  bool operator==(const ArrayLayout&) const = default;
};

/// Dense CSI tensor H_n(s) for every (time, subcarrier, antenna, ap).
///
/// Samples are stored in (s, n, a, q) row-major order, i.e. the AP index
/// varies fastest. This is also the on-disk order of the dataset payload.
class CsiFrameSet {
 public:
  /// Throws ValidationError if the sample count does not match the declared
  /// dimensions or timestamps are not strictly increasing.
  CsiFrameSet(RadioConfig radio, ArrayLayout layout, std::vector<double> timestamps,
              std::vector<cdouble> samples);

  const RadioConfig& radio() const noexcept { return radio_; }
  const ArrayLayout& layout() const noexcept { return layout_; }
  std::size_t time_count() const noexcept { return timestamps_.size(); }
  int subcarrier_count() const noexcept { return radio_.subcarrier_count(); }
  std::span<const double> timestamps() const noexcept { return timestamps_; }
  std::span<const cdouble> samples() const noexcept { return samples_; }

  std::size_t index(std::size_t s, int n, int a, int q) const noexcept {
    return ((s * static_cast<std::size_t>(radio_.subcarrier_count()) + static_cast<std::size_t>(n)) *
                static_cast<std::size_t>(layout_.antennas_per_ap) +
            static_cast<std::size_t>(a)) *
               static_cast<std::size_t>(layout_.ap_count) +
           static_cast<std::size_t>(q);
  }
  const cdouble& at(std::size_t s, int n, int a, int q) const noexcept {
    return samples_[index(s, n, a, q)];
  }

  /// Copy of the subcarrier vector H_0..H_{N-1}(s) for one antenna.
  std::vector<cdouble> frame(std::size_t s, const AntennaId& id) const;

  bool operator==(const CsiFrameSet&) const = default;

 private:
  RadioConfig radio_;
  ArrayLayout layout_;
  std::vector<double> timestamps_;
  std::vector<cdouble> samples_;
};

struct LabeledTrial {
  CsiFrameSet frames;
  int label = 0;
  int subject = 0;

  bool operator==(const LabeledTrial&) const = default;
};

/// Trials plus the class vocabulary their labels index into.
struct Dataset {
  std::vector<std::string> classes;
  std::vector<LabeledTrial> trials;
};

/// Deterministic 64-bit seed mixing (splitmix64 finalizer over a ^ rot(b)).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

}  // namespace dorfhar
