// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

#include <span>

#include "dorfhar/csi.hpp"

namespace dorfhar::fft {

enum class Direction {
  Forward,   // X_k = sum_n x_n e^{-j 2 pi n k / N}
  Backward,  // x_n = sum_k X_k e^{+j 2 pi n k / N}
};

/// Unnormalized DFT of in into out (equal sizes, may not alias).
/// Thread-safe; plans are cached per (size, direction).
void transform(std::span<const cdouble> in, std::span<cdouble> out, Direction dir);

}  // namespace dorfhar::fft
