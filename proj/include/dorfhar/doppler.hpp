// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dorfhar/csi.hpp"

namespace dorfhar {

/// h(s, tau_i) = (1/N) sum_n H_n(s) e^{j 2 pi n i / N}, the N-point IDFT
/// across subcarriers. Bin i corresponds to delay i / (N * spacing).
std::vector<cdouble> delay_profile(std::span<const cdouble> csi_row);

struct DopplerSpectrum {
  // power(w, k) for window w at frequencies_hz[k].
  Eigen::MatrixXd power;
  // Ascending, k * fs / L for k = -L/2 .. ceil(L/2) - 1.
  std::vector<double> frequencies_hz;
  // First sample index of each window.
  std::vector<std::size_t> window_starts;
};

/// Short-time periodogram of a complex delay-bin series.
///
/// Each window of `window_len` samples (advanced by `hop`) is mean-removed,
/// Hann-weighted and transformed; power is |X_k|^2 / L so that the sum over
/// frequencies equals the energy of the weighted segment.
DopplerSpectrum doppler_psd(std::span<const cdouble> bin_series, int window_len, int hop,
                            double sample_rate_hz);

/// Signed frequency of the spectral peak in one window, refined by a
/// 3-point parabola on log-power. A window with no power maps to 0 Hz.
double peak_frequency_hz(const DopplerSpectrum& spectrum, Eigen::Index window);

struct DopplerConfig {
  int window_len = 64;
  int hop = 16;
  int bins_per_antenna = 8;
};

struct ColumnTag {
  AntennaId antenna;
  int delay_bin = 0;

  auto operator<=>(const ColumnTag&) const = default;
};

/// Radial-velocity matrix V_r (windows x columns, m/s) with the column to
/// (antenna, delay bin) map.
struct ProjectionMatrix {
  Eigen::MatrixXd values;
  std::vector<ColumnTag> columns;
  std::vector<double> window_times_s;

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index cols() const noexcept { return values.cols(); }

  /// Column indices belonging to one antenna, ascending.
  std::vector<Eigen::Index> columns_of(const AntennaId& id) const;
  /// Distinct antennas in column order of first appearance, sorted.
  std::vector<AntennaId> antennas() const;
  /// Sub-matrix restricted to the given column indices (in that order).
  ProjectionMatrix select_columns(std::span<const Eigen::Index> indices) const;
  /// Sub-matrix with the columns of one access point.
  ProjectionMatrix for_ap(int ap) const;

  /// Throws ValidationError if dims or the window time count disagree.
  void validate() const;
};

/// Splits a multi-AP matrix by access point, ascending AP index.
std::vector<ProjectionMatrix> split_by_ap(const ProjectionMatrix& vr);

/// Full Doppler extraction for sanitized CSI.
///
/// Per antenna, the `bins_per_antenna` delay bins with the largest
/// dynamic energy (sum over time of |h - mean_s h|^2; ties go to the lower
/// bin) are kept in ascending bin order. For each kept bin and window,
/// v_r = f_peak * wavelength.
ProjectionMatrix radial_velocity_field(const CsiFrameSet& frames, const DopplerConfig& cfg);

/// CSV with header "time_s,<ap>:<antenna>:<bin>,..." and one row per window.
/// Values use 17 significant digits so the text round-trips exactly.
void write_projection_csv(std::ostream& out, const ProjectionMatrix& vr);
ProjectionMatrix read_projection_csv(std::istream& in);

}  // namespace dorfhar
