// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dorfhar/dorf.hpp"
#include "dorfhar/selection.hpp"

namespace dorfhar {

struct RandomKernel {
  std::vector<double> weights;  // length 7, 9 or 11, standard normal
  double bias = 0.0;            // uniform(-1, 1)
  int dilation = 1;             // power of two
  bool padding = false;         // zero padding of (len - 1) * dilation / 2 per side

  int effective_length() const noexcept {
    return (static_cast<int>(weights.size()) - 1) * dilation + 1;
  }
};

struct KernelBank {
  std::vector<RandomKernel> kernels;
  std::uint64_t seed = 0;
  int series_length = 0;  // length the dilations were drawn for

  std::size_t feature_dim() const noexcept { return 2 * kernels.size(); }
  int max_effective_length() const noexcept;
};

/// Draws `d_kernels` kernels for series of length `series_length`.
/// Dilation is 2^e with e uniform over the integers for which the dilated
/// kernel still fits the series. Deterministic per seed.
KernelBank make_kernels(int d_kernels, std::uint64_t seed, int series_length);

/// Dilated convolution per kernel followed by two pooled statistics, the
/// maximum and the proportion of positive values, stored as
/// [max_0, ppv_0, max_1, ppv_1, ...]. Throws ValidationError if the series
/// is shorter than the longest dilated kernel.
std::vector<double> encode_projection(std::span<const double> series, const KernelBank& bank);

/// Element-wise maximum over equally sized vectors.
std::vector<double> pool_projections(std::span<const std::vector<double>> per_projection);

/// Encodes every column of P = V D and max-pools along the projection axis.
///
/// Uses linearity of convolution: each kernel is applied to the three
/// velocity components once and the K projections are formed from those
/// responses. Equal to pooling encode_projection over the columns of P up
/// to floating-point rounding.
std::vector<double> encode_field(const Eigen::MatrixX3d& velocities, const SphereGrid& grid,
                                 const KernelBank& bank);

/// Encoding of an all-zero series (what a discarded antenna contributes).
std::vector<double> encode_zero_series(const KernelBank& bank);

/// f_s for one trial: per-antenna fields concatenated along the projection
/// axis and max-pooled. Discarded antennas enter as zero fields.
std::vector<double> encode_trial(const std::map<AntennaId, AntennaDorf>& antennas,
                                 const SphereGrid& grid, const KernelBank& bank);

}  // namespace dorfhar
