// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include "dorfhar/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "dorfhar/error.hpp"
#include "dorfhar/svg.hpp"

namespace dorfhar {

ErrorMap antenna_errors(const ProjectionMatrix& vr, const DorfModel& model, double delta) {
  vr.validate();
  if (!(delta > 0.0)) throw ValidationError("antenna_errors: delta must be > 0");
  if (model.velocities.rows() != vr.rows() || model.directions.cols() != vr.cols())
    throw ValidationError("antenna_errors: model was not fitted on this projection matrix");

  const Eigen::MatrixXd residual = vr.values - model.velocities * model.directions;
  ErrorMap out;
  for (const AntennaId& id : vr.antennas()) {
    const auto cols = vr.columns_of(id);
    if (cols.empty()) throw ValidationError("antenna_errors: antenna " + to_string(id) + " has no columns");
    double num = 0.0, den = 0.0;
    for (Eigen::Index c : cols) {
      num += residual.col(c).squaredNorm();
      den += vr.values.col(c).squaredNorm();
    }
    out[id] = num / (den + delta);
  }
  return out;
}

std::size_t knee_index(std::span<const double> e) {
  if (e.size() < 2) throw ValidationError("knee_index: need at least 2 values");
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!std::isfinite(e[i])) throw ValidationError("knee_index: non-finite value at " + std::to_string(i));
    if (i > 0 && e[i] < e[i - 1]) throw ValidationError("knee_index: input is not nondecreasing at " + std::to_string(i));
  }
  const double ux = static_cast<double>(e.size() - 1);
  const double uy = e.back() - e.front();
  const double norm = std::sqrt(ux * ux + uy * uy);
  std::vector<double> d(e.size());
  for (std::size_t i = 1; i <= e.size(); ++i)
    d[i - 1] = std::abs(ux * (e[i - 1] - e.front()) - uy * static_cast<double>(i - 1)) / norm;
  // Exactly collinear points produce distances of rounding size, so ties
  // are resolved within a tolerance relative to the chord.
  const double tol = 1e-12 * ux * std::abs(uy) / norm;
  const double dmax = *std::max_element(d.begin(), d.end());
  std::size_t best = 1;
  while (d[best - 1] < dmax - tol) ++best;
  return best;
}

namespace {

SelectionTable rank_errors(const ErrorMap& errors, double delta) {
  if (errors.size() < 2) throw ValidationError("select_antennas: need at least 2 antennas");
  SelectionTable t;
  t.errors = errors;
  t.delta = delta;
  for (const auto& [id, err] : errors) {
    if (!std::isfinite(err) || err < 0.0)
      throw ValidationError("select_antennas: error of antenna " + to_string(id) + " must be finite and >= 0");
    t.sorted.emplace_back(id, err);
  }
  // ErrorMap iterates in (ap, antenna) order, so a stable sort on the value
  // gives the lexicographic tie rule.
  std::stable_sort(t.sorted.begin(), t.sorted.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });
  std::vector<double> values;
  for (const auto& p : t.sorted) values.push_back(p.second);
  // A pool whose spread is below the resolution is uniform; the knee of
  // floating-point residue would otherwise drop arbitrary antennas.
  const double spread = values.back() - values.front();
  t.knee_rank = spread > 0.0 && spread <= kErrorResolution ? values.size() : knee_index(values);
  t.threshold = values[t.knee_rank - 1];
  return t;
}

}  // namespace

SelectionTable select_antennas(const ErrorMap& errors, double delta) {
  SelectionTable t = rank_errors(errors, delta);
  for (const auto& [id, err] : t.errors)
    if (err <= t.threshold) t.selected.insert(id);
  return t;
}

SelectionTable select_all(const ErrorMap& errors, double delta) {
  SelectionTable t;
  if (errors.size() >= 2) {
    t = rank_errors(errors, delta);
  } else {
    t.errors = errors;
    t.delta = delta;
    for (const auto& p : errors) t.sorted.emplace_back(p.first, p.second);
    t.threshold = errors.empty() ? 0.0 : errors.begin()->second;
  }
  for (const auto& p : errors) t.selected.insert(p.first);
  return t;
}

StageOneResult fit_access_points(std::span<const ProjectionMatrix> per_ap, const FitConfig& cfg,
                                 double delta) {
  if (per_ap.empty()) throw ValidationError("fit_access_points: no access points");
  StageOneResult out;
  for (const ProjectionMatrix& vr : per_ap) {
    vr.validate();
    if (vr.cols() < 3)
      throw ValidationError("fit_access_points: AP needs >= 3 projection columns, got " + std::to_string(vr.cols()));
    DorfModel model = fit_dorf(vr.values, cfg);
    for (const auto& [id, err] : antenna_errors(vr, model, delta)) {
      if (out.errors.count(id)) throw ValidationError("fit_access_points: antenna " + to_string(id) + " appears in two APs");
      out.errors[id] = err;
    }
    out.ap_models.push_back(std::move(model));
  }
  return out;
}

std::map<AntennaId, AntennaDorf> refit_antennas(std::span<const ProjectionMatrix> per_ap,
                                                const std::set<AntennaId>& selected,
                                                const FitConfig& cfg, const SphereGrid& grid) {
  constexpr double kRidgeFloor = 1e-6;
  std::map<AntennaId, AntennaDorf> out;
  for (const ProjectionMatrix& vr : per_ap) {
    for (const AntennaId& id : vr.antennas()) {
      AntennaDorf entry;
      entry.antenna = id;
      entry.selected = selected.count(id) != 0;
      if (!entry.selected) {
        entry.field.projections = Eigen::MatrixXd::Zero(vr.rows(), grid.size());
        out.emplace(id, std::move(entry));
        continue;
      }
      const auto cols = vr.columns_of(id);
      const ProjectionMatrix sub = vr.select_columns(cols);
      FitConfig local = cfg;
      if (sub.cols() < 3) {
        entry.low_rank = true;
        local.mu = std::max(local.mu, kRidgeFloor);
        local.gamma = std::max(local.gamma, kRidgeFloor);
        local.lambda_ridge = std::max(local.lambda_ridge, kRidgeFloor);
        entry.model = detail::fit_dorf_unchecked(sub.values, local);
      } else {
        entry.model = fit_dorf(sub.values, local);
      }
      entry.field = project_dorf(entry.model.velocities, grid);
      out.emplace(id, std::move(entry));
    }
  }
  return out;
}

TwoStageResult run_two_stage(std::span<const ProjectionMatrix> per_ap, const FitConfig& cfg,
                             double delta, const SphereGrid& grid) {
  StageOneResult stage_one = fit_access_points(per_ap, cfg, delta);
  TwoStageResult out;
  out.table = select_antennas(stage_one.errors, delta);
  out.ap_models = std::move(stage_one.ap_models);
  out.antennas = refit_antennas(per_ap, out.table.selected, cfg, grid);
  return out;
}

void write_selection_csv(std::ostream& out, const SelectionTable& table) {
  out << "ap,antenna,error,selected\n";
  char buf[32];
  for (const auto& [id, err] : table.errors) {
    std::snprintf(buf, sizeof buf, "%.17g", err);
    out << id.ap << ',' << id.antenna << ',' << buf << ',' << (table.is_selected(id) ? 1 : 0) << '\n';
  }
}

std::string selection_svg(const SelectionTable& table, const std::string& title) {
  std::vector<svg::BarGroup> groups;
  for (const auto& [id, err] : table.errors) {
    const std::string label = "AP" + std::to_string(id.ap + 1);
    if (groups.empty() || groups.back().label != label) groups.push_back({label, {}});
    groups.back().bars.push_back({"A" + std::to_string(id.antenna + 1), err, table.is_selected(id)});
  }
  return svg::grouped_bar_chart(title, "DoRF fitting error", groups, table.threshold);
}

}  // namespace dorfhar
