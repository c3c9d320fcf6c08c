// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include <vector>

#include "dorfhar/container.hpp"
#include "dorfhar/dorf.hpp"
#include "dorfhar/error.hpp"

namespace dorfhar {

namespace {

constexpr std::uint64_t kHeaderOffset = 16;

// Row-major dump of a dense matrix.
void put_matrix(PayloadWriter& w, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.put_f64(m(r, c));
}

Eigen::MatrixXd get_matrix(const PayloadReader& reader, std::uint64_t offset, Eigen::Index rows,
                           Eigen::Index cols, const std::string& field) {
  std::vector<double> flat(static_cast<std::size_t>(rows * cols));
  reader.f64s(offset, flat, field);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
  return m;
}

void expect_kind(const Container& c, const std::string& kind) {
  const auto got = header_get<std::string>(c.header, "kind", "kind", kHeaderOffset);
  if (got != kind) throw DecodeError(kHeaderOffset, "kind", "expected '" + kind + "', got '" + got + "'");
}

Eigen::Index dim(const nlohmann::json& h, const char* key) {
  const auto v = header_get<std::int64_t>(h, key, key, kHeaderOffset);
  if (v < 0 || v > (std::int64_t{1} << 32)) throw DecodeError(kHeaderOffset, key, "dimension out of range");
  return static_cast<Eigen::Index>(v);
}

}  // namespace

void save_dorf_model(const DorfModel& model, const std::filesystem::path& path) {
  PayloadWriter w;
  put_matrix(w, model.velocities);
  const std::uint64_t dir_offset = w.size();
  put_matrix(w, model.directions);
  const std::uint64_t loss_offset = w.size();
  w.put_f64s(model.loss_trace);
  nlohmann::json header = {{"version", kContainerVersion},
                           {"kind", "dorf_model"},
                           {"T", model.velocities.rows()},
                           {"N", model.directions.cols()},
                           {"iterations", model.loss_trace.size()},
                           {"converged", model.converged},
                           {"resampled_directions", model.resampled_directions},
                           {"offsets", {{"velocities", 0}, {"directions", dir_offset}, {"loss_trace", loss_offset}}}};
  write_container(path, header, w.bytes());
}

DorfModel load_dorf_model(const std::filesystem::path& path) {
  const Container c = read_container(path);
  expect_kind(c, "dorf_model");
  const PayloadReader reader(c);
  const Eigen::Index t = dim(c.header, "T");
  const Eigen::Index n = dim(c.header, "N");
  const Eigen::Index iters = dim(c.header, "iterations");
  if (!c.header.contains("offsets")) throw DecodeError(kHeaderOffset, "offsets", "missing field");
  const auto& off = c.header.at("offsets");

  DorfModel m;
  m.velocities = get_matrix(reader, header_get<std::uint64_t>(off, "velocities", "offsets.velocities", kHeaderOffset),
                            t, 3, "velocities");
  m.directions = get_matrix(reader, header_get<std::uint64_t>(off, "directions", "offsets.directions", kHeaderOffset),
                            3, n, "directions");
  m.loss_trace.resize(static_cast<std::size_t>(iters));
  reader.f64s(header_get<std::uint64_t>(off, "loss_trace", "offsets.loss_trace", kHeaderOffset), m.loss_trace,
              "loss_trace");
  m.converged = header_get<bool>(c.header, "converged", "converged", kHeaderOffset);
  m.resampled_directions = header_get<int>(c.header, "resampled_directions", "resampled_directions", kHeaderOffset);
  return m;
}

void save_dorf_field(const DorfField& field, const SphereGrid& grid, const std::filesystem::path& path) {
  if (field.projections.cols() != grid.size())
    throw ValidationError("save_dorf_field: field has " + std::to_string(field.projections.cols()) +
                          " directions but grid has " + std::to_string(grid.size()));
  PayloadWriter w;
  put_matrix(w, field.projections);
  nlohmann::json header = {{"version", kContainerVersion},
                           {"kind", "dorf_field"},
                           {"T", field.projections.rows()},
                           {"K", field.projections.cols()},
                           {"grid_m", grid.grid_m},
                           {"shape", {field.projections.rows(), grid.grid_m, 2 * grid.grid_m}},
                           {"offsets", {{"projections", 0}}}};
  write_container(path, header, w.bytes());
}

DorfField load_dorf_field(const std::filesystem::path& path) {
  const Container c = read_container(path);
  expect_kind(c, "dorf_field");
  const PayloadReader reader(c);
  if (!c.header.contains("offsets")) throw DecodeError(kHeaderOffset, "offsets", "missing field");
  const auto off = header_get<std::uint64_t>(c.header.at("offsets"), "projections", "offsets.projections", kHeaderOffset);
  return {get_matrix(reader, off, dim(c.header, "T"), dim(c.header, "K"), "projections")};
}

}  // namespace dorfhar
