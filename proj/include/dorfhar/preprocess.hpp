// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

#include <span>
#include <vector>

#include "dorfhar/csi.hpp"

namespace dorfhar {

/// Unwraps a phase sequence across consecutive samples. out[0] = in[0];
/// every successive difference of the output lies in (-pi, pi] and
/// out[i] = in[i] (mod 2 pi). Throws ValidationError on empty or non-finite input.
std::vector<double> unwrap_phase(std::span<const double> wrapped);

/// Removes the affine SFO/STO phase trend from one subcarrier vector.
///
/// The phase is unwrapped across subcarriers, an ordinary least-squares
/// line over the subcarrier index is subtracted, and the magnitudes are
/// kept. The residual phase has zero mean. Requires at least two
/// subcarriers.
std::vector<cdouble> sanitize_frame(std::span<const cdouble> frame);

/// Applies sanitize_frame to every (time, antenna, AP) subcarrier vector.
CsiFrameSet sanitize(const CsiFrameSet& frames);

}  // namespace dorfhar
