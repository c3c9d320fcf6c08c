// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dorfhar/doppler.hpp"
#include "dorfhar/dorf.hpp"

namespace dorfhar {

inline constexpr double kDefaultSelectionDelta = 1e-8;
// Antenna errors closer together than this are treated as equal.
inline constexpr double kErrorResolution = 1e-12;

using ErrorMap = std::map<AntennaId, double>;

/// Normalized per-antenna fitting error
///   E_{q,a} = sum_{i in I_{q,a}} |V_r(:,i) - V r_i|^2 / (sum_{i in I_{q,a}} |V_r(:,i)|^2 + delta)
/// for every antenna present in vr's column map. The model must have been
/// fitted on exactly these columns.
ErrorMap antenna_errors(const ProjectionMatrix& vr, const DorfModel& model, double delta);

/// Farthest-point knee of a nondecreasing curve e_1 <= ... <= e_M.
/// Returns the 1-based rank k* = argmax_i d_i with
///   d_i = |u_x (e_i - e_1) - u_y (i - 1)| / sqrt(u_x^2 + u_y^2),  u = (M - 1, e_M - e_1),
/// the smallest i winning ties. Throws ValidationError for M < 2, a
/// decreasing pair, or non-finite values.
std::size_t knee_index(std::span<const double> sorted_errors);

struct SelectionTable {
  ErrorMap errors;
  // Pooled errors in nondecreasing order, ties by (ap, antenna).
  std::vector<std::pair<AntennaId, double>> sorted;
  std::size_t knee_rank = 1;  // 1-based
  double threshold = 0.0;
  std::set<AntennaId> selected;
  double delta = kDefaultSelectionDelta;

  bool is_selected(const AntennaId& id) const { return selected.count(id) != 0; }
};

/// Global selection S = {(q,a) : E_{q,a} <= e_(k*)} over all APs pooled.
SelectionTable select_antennas(const ErrorMap& errors, double delta = kDefaultSelectionDelta);

/// Table that keeps every antenna (the no-selection baseline); knee and
/// threshold are still computed for reporting when possible.
SelectionTable select_all(const ErrorMap& errors, double delta = kDefaultSelectionDelta);

struct StageOneResult {
  std::vector<DorfModel> ap_models;  // parallel to the per-AP input
  ErrorMap errors;
};

/// Fits one DoRF per AP on its full projection matrix and scores its antennas.
StageOneResult fit_access_points(std::span<const ProjectionMatrix> per_ap, const FitConfig& cfg,
                                 double delta);

struct AntennaDorf {
  AntennaId antenna;
  bool selected = false;
  // Refit on fewer than 3 columns; ridge terms were floored to keep it solvable.
  bool low_rank = false;
  DorfModel model;   // empty for discarded antennas
  DorfField field;   // T x K, all zeros for discarded antennas
};

/// Per-antenna refits on V_r^{(q)}(:, I_{q,a}) for antennas in `selected`;
/// the rest get an all-zero field of the same shape.
std::map<AntennaId, AntennaDorf> refit_antennas(std::span<const ProjectionMatrix> per_ap,
                                                const std::set<AntennaId>& selected,
                                                const FitConfig& cfg, const SphereGrid& grid);

struct TwoStageResult {
  SelectionTable table;
  std::vector<DorfModel> ap_models;
  std::map<AntennaId, AntennaDorf> antennas;
};

/// Stage 1 (per-AP fits, pooled knee selection) followed by Stage 2
/// (per-antenna refits on the selected set). Each AP needs >= 3 columns.
TwoStageResult run_two_stage(std::span<const ProjectionMatrix> per_ap, const FitConfig& cfg,
                             double delta, const SphereGrid& grid);

/// "ap,antenna,error,selected" with one row per antenna in (ap, antenna) order.
void write_selection_csv(std::ostream& out, const SelectionTable& table);

/// Bar chart of errors grouped by AP with the knee threshold drawn across.
std::string selection_svg(const SelectionTable& table, const std::string& title);

}  // namespace dorfhar
