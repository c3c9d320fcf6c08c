// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

namespace dorfhar {

/// OFDM radio constants. The wavelength is derived as c / f_c at
/// construction; all fields are immutable afterwards.
class RadioConfig {
 public:
  /// Throws ValidationError unless f_c > 0, spacing > 0, N >= 2, fs > 0, c > 0.
  RadioConfig(double carrier_frequency_hz, double subcarrier_spacing_hz, int subcarrier_count,
              double sample_rate_hz, double propagation_speed_m_per_s);

  /// 2.4 GHz, 64 subcarriers at 312.5 kHz, 100 Hz CSI rate, c = 3e8 m/s.
  static RadioConfig uthamo();

  double carrier_frequency_hz() const noexcept { return carrier_frequency_hz_; }
  double subcarrier_spacing_hz() const noexcept { return subcarrier_spacing_hz_; }
  int subcarrier_count() const noexcept { return subcarrier_count_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  double propagation_speed_m_per_s() const noexcept { return propagation_speed_m_per_s_; }
  double wavelength_m() const noexcept { return wavelength_m_; }

  // Delay bin spacing 1 / (N * spacing).
  double delay_resolution_s() const noexcept;

  bool operator==(const RadioConfig&) const = default;

 private:
  double carrier_frequency_hz_;
  double subcarrier_spacing_hz_;
  int subcarrier_count_;
  double sample_rate_hz_;
  double propagation_speed_m_per_s_;
  double wavelength_m_;
};

}  // namespace dorfhar
