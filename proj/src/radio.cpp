// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include "dorfhar/radio.hpp"

#include <cmath>

#include "dorfhar/error.hpp"

namespace dorfhar {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

RadioConfig::RadioConfig(double carrier_frequency_hz, double subcarrier_spacing_hz,
                         int subcarrier_count, double sample_rate_hz,
                         double propagation_speed_m_per_s)
    : carrier_frequency_hz_(carrier_frequency_hz),
      subcarrier_spacing_hz_(subcarrier_spacing_hz),
      subcarrier_count_(subcarrier_count),
      sample_rate_hz_(sample_rate_hz),
      propagation_speed_m_per_s_(propagation_speed_m_per_s),
      wavelength_m_(propagation_speed_m_per_s / carrier_frequency_hz) {
  if (!positive_finite(carrier_frequency_hz))
    throw ValidationError("radio: carrier_frequency_hz must be > 0");
  if (!positive_finite(subcarrier_spacing_hz))
    throw ValidationError("radio: subcarrier_spacing_hz must be > 0");
  if (subcarrier_count < 2) throw ValidationError("radio: subcarrier_count must be >= 2");
  if (!positive_finite(sample_rate_hz)) throw ValidationError("radio: sample_rate_hz must be > 0");
  if (!positive_finite(propagation_speed_m_per_s))
    throw ValidationError("radio: propagation_speed_m_per_s must be > 0");
}

RadioConfig RadioConfig::uthamo() { return RadioConfig(2.4e9, 312.5e3, 64, 100.0, 3.0e8); }

double RadioConfig::delay_resolution_s() const noexcept {
  return 1.0 / (static_cast<double>(subcarrier_count_) * subcarrier_spacing_hz_);
}

}  // namespace dorfhar
