// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include "dorfhar/doppler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "dorfhar/error.hpp"
#include "dorfhar/fft.hpp"

namespace dorfhar {

std::vector<cdouble> delay_profile(std::span<const cdouble> csi_row) {
  if (csi_row.size() < 2) throw ValidationError("delay_profile: need at least 2 subcarriers");
  std::vector<cdouble> out(csi_row.size());
  fft::transform(csi_row, out, fft::Direction::Backward);
  const double inv_n = 1.0 / static_cast<double>(csi_row.size());
  for (auto& z : out) z *= inv_n;
  return out;
}

DopplerSpectrum doppler_psd(std::span<const cdouble> bin_series, int window_len, int hop,
                            double sample_rate_hz) {
  if (window_len < 4) throw ValidationError("doppler_psd: window_len must be >= 4");
  if (hop < 1) throw ValidationError("doppler_psd: hop must be >= 1");
  if (!(sample_rate_hz > 0.0)) throw ValidationError("doppler_psd: sample rate must be > 0");
  const auto len = static_cast<std::size_t>(window_len);
  if (bin_series.size() < len)
    throw ValidationError("doppler_psd: series of " + std::to_string(bin_series.size()) +
                          " samples is shorter than one window of " + std::to_string(len));

  const std::size_t windows = (bin_series.size() - len) / static_cast<std::size_t>(hop) + 1;
  DopplerSpectrum spec;
  spec.power.resize(static_cast<Eigen::Index>(windows), window_len);
  const int half = window_len / 2;
  for (int k = 0; k < window_len; ++k)
    spec.frequencies_hz.push_back(static_cast<double>(k - half) * sample_rate_hz / window_len);

  // Periodic Hann: w_n = 0.5 (1 - cos(2 pi n / L)).
  std::vector<double> hann(len);
  for (std::size_t n = 0; n < len; ++n)
    hann[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(len)));

  std::vector<cdouble> segment(len), spectrum(len);
  for (std::size_t w = 0; w < windows; ++w) {
    const std::size_t start = w * static_cast<std::size_t>(hop);
    spec.window_starts.push_back(start);
    cdouble mean = 0.0;
    for (std::size_t n = 0; n < len; ++n) mean += bin_series[start + n];
    mean /= static_cast<double>(len);
    for (std::size_t n = 0; n < len; ++n) segment[n] = (bin_series[start + n] - mean) * hann[n];
    fft::transform(segment, spectrum, fft::Direction::Forward);
    // fftshift: column k holds DFT bin (k - half) mod L.
    for (int k = 0; k < window_len; ++k) {
      const auto bin = static_cast<std::size_t>((k - half + window_len) % window_len);
      spec.power(static_cast<Eigen::Index>(w), k) = std::norm(spectrum[bin]) / static_cast<double>(len);
    }
  }
  return spec;
}

double peak_frequency_hz(const DopplerSpectrum& spectrum, Eigen::Index window) {
  const auto row = spectrum.power.row(window);
  const Eigen::Index bins = row.size();
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < bins; ++k)
    if (row(k) > row(best)) best = k;
  const double total = row.sum();
  if (!(row(best) > 0.0) || !(total > 0.0)) return 0.0;

  const double df = spectrum.frequencies_hz.size() > 1
                        ? spectrum.frequencies_hz[1] - spectrum.frequencies_hz[0]
                        : 0.0;
  double offset = 0.0;
  if (best > 0 && best + 1 < bins) {
    // Floor keeps log finite when a neighbour is exactly zero.
    const double floor = row(best) * 1e-300;
    const double a = std::log(std::max(row(best - 1), floor));
    const double b = std::log(row(best));
    const double c = std::log(std::max(row(best + 1), floor));
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  }
  return spectrum.frequencies_hz[static_cast<std::size_t>(best)] + offset * df;
}

std::vector<Eigen::Index> ProjectionMatrix::columns_of(const AntennaId& id) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].antenna == id) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

std::vector<AntennaId> ProjectionMatrix::antennas() const {
  std::set<AntennaId> ids;
  for (const auto& c : columns) ids.insert(c.antenna);
  return {ids.begin(), ids.end()};
}

ProjectionMatrix ProjectionMatrix::select_columns(std::span<const Eigen::Index> indices) const {
  ProjectionMatrix out;
  out.values.resize(values.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] < 0 || indices[j] >= values.cols())
      throw ValidationError("ProjectionMatrix: column index out of range");
    out.values.col(static_cast<Eigen::Index>(j)) = values.col(indices[j]);
    out.columns.push_back(columns[static_cast<std::size_t>(indices[j])]);
  }
  out.window_times_s = window_times_s;
  return out;
}

ProjectionMatrix ProjectionMatrix::for_ap(int ap) const {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].antenna.ap == ap) idx.push_back(static_cast<Eigen::Index>(i));
  return select_columns(idx);
}

void ProjectionMatrix::validate() const {
  if (static_cast<std::size_t>(values.cols()) != columns.size())
    throw ValidationError("ProjectionMatrix: column map size does not match value columns");
  if (!window_times_s.empty() && static_cast<std::size_t>(values.rows()) != window_times_s.size())
    throw ValidationError("ProjectionMatrix: window time count does not match rows");
}

std::vector<ProjectionMatrix> split_by_ap(const ProjectionMatrix& vr) {
  std::set<int> aps;
  for (const auto& c : vr.columns) aps.insert(c.antenna.ap);
  std::vector<ProjectionMatrix> out;
  for (int q : aps) out.push_back(vr.for_ap(q));
  return out;
}

ProjectionMatrix radial_velocity_field(const CsiFrameSet& frames, const DopplerConfig& cfg) {
  if (cfg.bins_per_antenna < 1) throw ValidationError("radial_velocity_field: bins_per_antenna must be >= 1");
  const int n_sub = frames.subcarrier_count();
  if (cfg.bins_per_antenna > n_sub)
    throw ValidationError("radial_velocity_field: bins_per_antenna exceeds subcarrier count");
  const std::size_t t_count = frames.time_count();
  if (cfg.window_len < 4 || t_count < static_cast<std::size_t>(cfg.window_len))
    throw ValidationError("radial_velocity_field: trial of " + std::to_string(t_count) +
                          " frames is shorter than one window of " + std::to_string(cfg.window_len));
  if (cfg.hop < 1) throw ValidationError("radial_velocity_field: hop must be >= 1");

  const double fs = frames.radio().sample_rate_hz();
  const double wavelength = frames.radio().wavelength_m();
  const auto windows = static_cast<Eigen::Index>((t_count - static_cast<std::size_t>(cfg.window_len)) /
                                                     static_cast<std::size_t>(cfg.hop) + 1);
  const auto antennas = frames.layout().antennas();

  ProjectionMatrix out;
  out.values.resize(windows, static_cast<Eigen::Index>(antennas.size()) * cfg.bins_per_antenna);
  const auto ts = frames.timestamps();
  for (Eigen::Index w = 0; w < windows; ++w) {
    const auto start = static_cast<std::size_t>(w) * static_cast<std::size_t>(cfg.hop);
    out.window_times_s.push_back(0.5 * (ts[start] + ts[start + static_cast<std::size_t>(cfg.window_len) - 1]));
  }

  // profile[i][s]: delay-bin time series for the current antenna.
  std::vector<std::vector<cdouble>> profile(static_cast<std::size_t>(n_sub), std::vector<cdouble>(t_count));
  Eigen::Index col = 0;
  for (const AntennaId& id : antennas) {
    for (std::size_t s = 0; s < t_count; ++s) {
      const auto h = delay_profile(frames.frame(s, id));
      for (int i = 0; i < n_sub; ++i) profile[static_cast<std::size_t>(i)][s] = h[static_cast<std::size_t>(i)];
    }

    std::vector<double> energy(static_cast<std::size_t>(n_sub), 0.0);
    for (int i = 0; i < n_sub; ++i) {
      const auto& series = profile[static_cast<std::size_t>(i)];
      cdouble mean = std::accumulate(series.begin(), series.end(), cdouble{0.0});
      mean /= static_cast<double>(t_count);
      double e = 0.0;
      for (const auto& z : series) e += std::norm(z - mean);
      energy[static_cast<std::size_t>(i)] = e;
    }
    std::vector<int> order(static_cast<std::size_t>(n_sub));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return energy[static_cast<std::size_t>(a)] > energy[static_cast<std::size_t>(b)];
    });
    std::vector<int> kept(order.begin(), order.begin() + cfg.bins_per_antenna);
    std::sort(kept.begin(), kept.end());

    for (int bin : kept) {
      const auto spec = doppler_psd(profile[static_cast<std::size_t>(bin)], cfg.window_len, cfg.hop, fs);
      for (Eigen::Index w = 0; w < windows; ++w) out.values(w, col) = peak_frequency_hz(spec, w) * wavelength;
      out.columns.push_back({id, bin});
      ++col;
    }
  }
  return out;
}

void write_projection_csv(std::ostream& out, const ProjectionMatrix& vr) {
  vr.validate();
  out << "time_s";
  for (const auto& c : vr.columns) out << ',' << c.antenna.ap << ':' << c.antenna.antenna << ':' << c.delay_bin;
  out << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < vr.rows(); ++r) {
    const double t = static_cast<std::size_t>(r) < vr.window_times_s.size()
                         ? vr.window_times_s[static_cast<std::size_t>(r)]
                         : static_cast<double>(r);
    std::snprintf(buf, sizeof buf, "%.17g", t);
    out << buf;
    for (Eigen::Index c = 0; c < vr.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", vr.values(r, c));
      out << ',' << buf;
    }
    out << '\n';
  }
}

ProjectionMatrix read_projection_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("projection csv: missing header");
  std::vector<ColumnTag> columns;
  {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    if (cell != "time_s") throw ValidationError("projection csv: first header cell must be time_s");
    while (std::getline(ss, cell, ',')) {
      ColumnTag tag;
      if (std::sscanf(cell.c_str(), "%d:%d:%d", &tag.antenna.ap, &tag.antenna.antenna, &tag.delay_bin) != 3)
        throw ValidationError("projection csv: bad column tag '" + cell + "'");
      columns.push_back(tag);
    }
  }
  std::vector<std::vector<double>> rows;
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    std::getline(ss, cell, ',');
    times.push_back(std::stod(cell));
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != columns.size())
      throw ValidationError("projection csv: row " + std::to_string(rows.size()) + " has wrong width");
    rows.push_back(std::move(row));
  }
  ProjectionMatrix out;
  out.columns = std::move(columns);
  out.window_times_s = std::move(times);
  out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(out.columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return out;
}

}  // namespace dorfhar
