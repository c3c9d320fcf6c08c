// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include "dorfhar/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dorfhar/error.hpp"

namespace dorfhar {

namespace {

constexpr int kLengths[] = {7, 9, 11};

int padding_of(const RandomKernel& k) { return k.padding ? (k.effective_length() - 1) / 2 : 0; }

int output_length(const RandomKernel& k, int series_length) {
  return series_length + 2 * padding_of(k) - k.effective_length() + 1;
}

// Raw response (no bias) of one kernel; out must hold output_length values.
void convolve(std::span<const double> x, const RandomKernel& k, std::span<double> out) {
  const int n = static_cast<int>(x.size());
  const int pad = padding_of(k);
  const int taps = static_cast<int>(k.weights.size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    double acc = 0.0;
    int idx = static_cast<int>(t) - pad;
    for (int j = 0; j < taps; ++j, idx += k.dilation)
      if (idx >= 0 && idx < n) acc += k.weights[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(idx)];
    out[t] = acc;
  }
}

void check_length(const KernelBank& bank, std::size_t length) {
  if (bank.kernels.empty()) throw ValidationError("kernel bank is empty");
  if (static_cast<int>(length) < bank.max_effective_length())
    throw ValidationError("series of length " + std::to_string(length) + " is shorter than the longest kernel (" +
                          std::to_string(bank.max_effective_length()) + ")");
}

}  // namespace

int KernelBank::max_effective_length() const noexcept {
  int m = 0;
  for (const auto& k : kernels) m = std::max(m, k.effective_length());
  return m;
}

KernelBank make_kernels(int d_kernels, std::uint64_t seed, int series_length) {
  if (d_kernels < 1) throw ValidationError("make_kernels: d_kernels must be >= 1");
  if (series_length < 1) throw ValidationError("make_kernels: series_length must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_length(0, 2);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform_bias(-1.0, 1.0);
  std::bernoulli_distribution coin(0.5);

  KernelBank bank;
  bank.seed = seed;
  bank.series_length = series_length;
  bank.kernels.reserve(static_cast<std::size_t>(d_kernels));
  for (int i = 0; i < d_kernels; ++i) {
    RandomKernel k;
    const int len = kLengths[pick_length(rng)];
    k.weights.resize(static_cast<std::size_t>(len));
    for (auto& w : k.weights) w = normal(rng);
    k.bias = uniform_bias(rng);
    int max_exp = 0;
    while ((len - 1) * (1 << (max_exp + 1)) + 1 <= series_length) ++max_exp;
    std::uniform_int_distribution<int> pick_exp(0, max_exp);
    k.dilation = 1 << pick_exp(rng);
    k.padding = coin(rng);
    bank.kernels.push_back(std::move(k));
  }
  return bank;
}

std::vector<double> encode_projection(std::span<const double> series, const KernelBank& bank) {
  check_length(bank, series.size());
  std::vector<double> out;
  out.reserve(bank.feature_dim());
  std::vector<double> response;
  for (const auto& k : bank.kernels) {
    response.resize(static_cast<std::size_t>(output_length(k, static_cast<int>(series.size()))));
    convolve(series, k, response);
    double mx = -std::numeric_limits<double>::infinity();
    std::size_t positive = 0;
    for (double r : response) {
      const double v = r + k.bias;
      mx = std::max(mx, v);
      positive += v > 0.0 ? 1 : 0;
    }
    out.push_back(mx);
    out.push_back(static_cast<double>(positive) / static_cast<double>(response.size()));
  }
  return out;
}

std::vector<double> pool_projections(std::span<const std::vector<double>> per_projection) {
  if (per_projection.empty()) throw ValidationError("pool_projections: empty projection list");
  std::vector<double> out = per_projection.front();
  for (const auto& v : per_projection.subspan(1)) {
    if (v.size() != out.size()) throw ValidationError("pool_projections: vectors differ in length");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], v[i]);
  }
  return out;
}

std::vector<double> encode_field(const Eigen::MatrixX3d& velocities, const SphereGrid& grid,
                                 const KernelBank& bank) {
  const auto t_len = static_cast<std::size_t>(velocities.rows());
  check_length(bank, t_len);
  std::vector<double> out;
  out.reserve(bank.feature_dim());

  std::vector<std::vector<double>> components(3, std::vector<double>(t_len));
  for (int c = 0; c < 3; ++c)
    for (std::size_t t = 0; t < t_len; ++t) components[static_cast<std::size_t>(c)][t] = velocities(static_cast<Eigen::Index>(t), c);

  std::vector<double> rx, ry, rz;
  for (const auto& k : bank.kernels) {
    const auto len = static_cast<std::size_t>(output_length(k, static_cast<int>(t_len)));
    rx.resize(len);
    ry.resize(len);
    rz.resize(len);
    convolve(components[0], k, rx);
    convolve(components[1], k, ry);
    convolve(components[2], k, rz);
    double pooled_max = -std::numeric_limits<double>::infinity();
    double pooled_ppv = 0.0;
    for (Eigen::Index d = 0; d < grid.size(); ++d) {
      const double dx = grid.directions(0, d), dy = grid.directions(1, d), dz = grid.directions(2, d);
      double mx = -std::numeric_limits<double>::infinity();
      std::size_t positive = 0;
      for (std::size_t t = 0; t < len; ++t) {
        const double v = dx * rx[t] + dy * ry[t] + dz * rz[t] + k.bias;
        mx = std::max(mx, v);
        positive += v > 0.0 ? 1 : 0;
      }
      pooled_max = std::max(pooled_max, mx);
      pooled_ppv = std::max(pooled_ppv, static_cast<double>(positive) / static_cast<double>(len));
    }
    out.push_back(pooled_max);
    out.push_back(pooled_ppv);
  }
  return out;
}

std::vector<double> encode_zero_series(const KernelBank& bank) {
  std::vector<double> out;
  out.reserve(bank.feature_dim());
  for (const auto& k : bank.kernels) {
    out.push_back(k.bias);
    out.push_back(k.bias > 0.0 ? 1.0 : 0.0);
  }
  return out;
}

std::vector<double> encode_trial(const std::map<AntennaId, AntennaDorf>& antennas,
                                 const SphereGrid& grid, const KernelBank& bank) {
  if (antennas.empty()) throw ValidationError("encode_trial: no antennas");
  std::vector<std::vector<double>> per_antenna;
  bool any_zero = false;
  for (const auto& [id, entry] : antennas) {
    if (entry.selected)
      per_antenna.push_back(encode_field(entry.model.velocities, grid, bank));
    else
      any_zero = true;
  }
  if (any_zero) per_antenna.push_back(encode_zero_series(bank));
  return pool_projections(per_antenna);
}

}  // namespace dorfhar
