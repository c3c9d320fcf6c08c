// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include "dorfhar/preprocess.hpp"

#include <cmath>
#include <numbers>

#include "dorfhar/error.hpp"

namespace dorfhar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Maps d into (-pi, pi].
double wrap_difference(double d) {
  return d - kTwoPi * std::ceil((d - std::numbers::pi) / kTwoPi);
}

}  // namespace

std::vector<double> unwrap_phase(std::span<const double> wrapped) {
  if (wrapped.empty()) throw ValidationError("unwrap_phase: empty input");
  for (std::size_t i = 0; i < wrapped.size(); ++i)
    if (!std::isfinite(wrapped[i]))
      throw ValidationError("unwrap_phase: non-finite value at index " + std::to_string(i));

  std::vector<double> out(wrapped.size());
  out[0] = wrapped[0];
  for (std::size_t i = 1; i < wrapped.size(); ++i)
    out[i] = out[i - 1] + wrap_difference(wrapped[i] - wrapped[i - 1]);
  return out;
}

std::vector<cdouble> sanitize_frame(std::span<const cdouble> frame) {
  const std::size_t n = frame.size();
  if (n < 2) throw ValidationError("sanitize_frame: need at least 2 subcarriers for an affine fit");

  std::vector<double> phase(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(frame[i].real()) || !std::isfinite(frame[i].imag()))
      throw ValidationError("sanitize_frame: non-finite sample at subcarrier " + std::to_string(i));
    phase[i] = std::arg(frame[i]);
  }
  const std::vector<double> unwrapped = unwrap_phase(phase);

  const double nd = static_cast<double>(n);
  const double index_mean = (nd - 1.0) / 2.0;
  double phase_mean = 0.0;
  for (double p : unwrapped) phase_mean += p;
  phase_mean /= nd;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - index_mean;
    sxy += dx * (unwrapped[i] - phase_mean);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;

  std::vector<double> residual(n);
  double residual_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    residual[i] = (unwrapped[i] - phase_mean) - slope * (static_cast<double>(i) - index_mean);
    residual_mean += residual[i];
  }
  // Removes the O(eps) rounding bias left by the closed-form fit.
  residual_mean /= nd;

  std::vector<cdouble> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::polar(std::abs(frame[i]), residual[i] - residual_mean);
  return out;
}

CsiFrameSet sanitize(const CsiFrameSet& frames) {
  const int n_sub = frames.subcarrier_count();
  const ArrayLayout& layout = frames.layout();
  std::vector<cdouble> out(frames.samples().begin(), frames.samples().end());
  std::vector<cdouble> row(static_cast<std::size_t>(n_sub));
  for (std::size_t s = 0; s < frames.time_count(); ++s) {
    for (int q = 0; q < layout.ap_count; ++q) {
      for (int a = 0; a < layout.antennas_per_ap; ++a) {
        for (int n = 0; n < n_sub; ++n) row[static_cast<std::size_t>(n)] = frames.at(s, n, a, q);
        const auto clean = sanitize_frame(row);
        for (int n = 0; n < n_sub; ++n) out[frames.index(s, n, a, q)] = clean[static_cast<std::size_t>(n)];
      }
    }
  }
  return CsiFrameSet(frames.radio(), layout, std::vector<double>(frames.timestamps().begin(), frames.timestamps().end()),
                     std::move(out));
}

}  // namespace dorfhar
