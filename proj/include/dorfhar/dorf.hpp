// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

namespace dorfhar {

enum class FitMode {
  // Velocity update uses lambda_ridge and direction update uses gamma as given.
  Verbatim,
  // Ridge terms are rescaled to mu * N and gamma * T so each half-step is the
  // exact minimizer of the reported loss (before normalization).
  Consistent,
};

struct FitConfig {
  double mu = 1e-3;
  double gamma = 1e-3;
  double lambda_ridge = 1e-3;
  double epsilon = 0.01;
  int max_iters = 500;
  std::uint64_t seed = 0;
  FitMode mode = FitMode::Verbatim;
  // Test hook: skip the unit-norm projection of direction columns.
  bool normalize_directions = true;

  void validate() const;
};

/// Fitted factorization V_r ~ V R with V in R^{T x 3} and R in R^{3 x N}.
struct DorfModel {
  Eigen::MatrixX3d velocities;
  Eigen::Matrix3Xd directions;
  std::vector<double> loss_trace;
  bool converged = false;
  // Direction columns redrawn because the update produced a zero vector.
  int resampled_directions = 0;

  Eigen::MatrixXd reconstruction() const { return velocities * directions; }
};

/// Columns drawn i.i.d. uniform on the unit sphere (normalized standard
/// normal triples), deterministic per seed.
Eigen::Matrix3Xd init_directions(Eigen::Index n_cols, std::uint64_t seed);

/// V = V_r R^T (R R^T + lambda I)^{-1} via a 3x3 Cholesky solve. Throws
/// SingularityError if the 3x3 system cannot be factorized.
Eigen::MatrixX3d update_velocity(const Eigen::MatrixXd& vr, const Eigen::Matrix3Xd& directions,
                                 double lambda_ridge);

/// R~ = (V^T V + gamma I)^{-1} V^T V_r, before normalization.
Eigen::Matrix3Xd solve_directions(const Eigen::MatrixXd& vr, const Eigen::MatrixX3d& velocities,
                                  double gamma);

/// solve_directions followed by r_i <- r~_i / |r~_i|. Throws
/// DegenerateDirectionError naming the first column with r~_i = 0.
Eigen::Matrix3Xd update_directions(const Eigen::MatrixXd& vr, const Eigen::MatrixX3d& velocities,
                                   double gamma);

/// L = |V R - V_r|_F^2 / (T N) + mu |V|_F^2 / T + gamma |R|_F^2 / N.
double dorf_loss(const Eigen::MatrixXd& vr, const Eigen::MatrixX3d& velocities,
                 const Eigen::Matrix3Xd& directions, double mu, double gamma);

/// Alternating minimization until L < epsilon or max_iters. Requires
/// T >= 3 and N >= 3. Zero direction columns are redrawn from the seeded
/// sphere distribution and counted in resampled_directions. Throws
/// DivergenceError on a non-finite loss.
DorfModel fit_dorf(const Eigen::MatrixXd& vr, const FitConfig& cfg);

namespace detail {
// fit_dorf without the N >= 3 precondition; used for rank-limited
// per-antenna refits, where the caller guarantees a positive ridge.
DorfModel fit_dorf_unchecked(const Eigen::MatrixXd& vr, const FitConfig& cfg);
}  // namespace detail

/// Equiangular latitude-longitude grid: M polar rings theta_m = pi (m + 0.5) / M
/// times 2M azimuths phi_j = pi j / M, column k = m * 2M + j.
struct SphereGrid {
  Eigen::Matrix3Xd directions;
  int grid_m = 0;

  Eigen::Index size() const noexcept { return directions.cols(); }
};

SphereGrid sphere_grid(int m);

/// P in R^{T x K}, P(s, k) = v(s)^T d_k.
struct DorfField {
  Eigen::MatrixXd projections;
};

DorfField project_dorf(const Eigen::MatrixX3d& velocities, const SphereGrid& grid);

void save_dorf_model(const DorfModel& model, const std::filesystem::path& path);
DorfModel load_dorf_model(const std::filesystem::path& path);
void save_dorf_field(const DorfField& field, const SphereGrid& grid, const std::filesystem::path& path);
DorfField load_dorf_field(const std::filesystem::path& path);

}  // namespace dorfhar
