// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

#include <filesystem>

#include <json.hpp>

#include "dorfhar/csi.hpp"

namespace dorfhar {

/// Writes the dataset container: a JSON header
///   {version, kind: "dataset", radio, layout, classes,
///    trials: [{label, subject, T, offsets: {timestamps, samples}}]}
/// followed by each trial's timestamps and then its complex samples as
/// (real, imag) binary64 pairs in (s, n, a, q) row-major order.
///
/// Throws ValidationError for an empty trial list, trials whose radio or
/// layout differ, or labels outside `classes`; IoError if unwritable.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// Inverse of save_dataset; samples round-trip bit-exactly. Throws
/// DecodeError for malformed files and ValidationError naming the trial
/// index when a decoded trial violates a CsiFrameSet invariant.
Dataset load_dataset(const std::filesystem::path& path);

nlohmann::json radio_to_json(const RadioConfig& radio);
RadioConfig radio_from_json(const nlohmann::json& j, std::uint64_t offset = 0);

}  // namespace dorfhar
