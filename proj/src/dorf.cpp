// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include "dorfhar/dorf.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "dorfhar/error.hpp"

namespace dorfhar {

namespace {

Eigen::Vector3d draw_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    Eigen::Vector3d v(normal(rng), normal(rng), normal(rng));
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

Eigen::Matrix3d regularized_gram(const Eigen::Matrix3d& gram, double ridge) {
  return gram + ridge * Eigen::Matrix3d::Identity();
}

Eigen::LLT<Eigen::Matrix3d> factorize(const Eigen::Matrix3d& a, const char* what) {
  Eigen::LLT<Eigen::Matrix3d> llt(a);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14))
    throw SingularityError(std::string(what) + ": regularized 3x3 Gram matrix is singular");
  return llt;
}

constexpr double kZeroColumn = 1e-300;

DorfModel run_fit(const Eigen::MatrixXd& vr, const FitConfig& cfg) {
  const auto t = static_cast<double>(vr.rows());
  const auto n = static_cast<double>(vr.cols());
  const double velocity_ridge = cfg.mode == FitMode::Consistent ? cfg.mu * n : cfg.lambda_ridge;
  const double direction_ridge = cfg.mode == FitMode::Consistent ? cfg.gamma * t : cfg.gamma;

  DorfModel model;
  model.directions = init_directions(vr.cols(), cfg.seed);
  std::mt19937_64 resample_rng(cfg.seed ^ 0x5DEECE66DULL);

  for (int it = 0; it < cfg.max_iters; ++it) {
    model.velocities = update_velocity(vr, model.directions, velocity_ridge);
    Eigen::Matrix3Xd next = solve_directions(vr, model.velocities, direction_ridge);
    for (Eigen::Index i = 0; i < next.cols(); ++i) {
      const double norm = next.col(i).norm();
      if (!(norm > kZeroColumn)) {
        next.col(i) = draw_unit(resample_rng);
        ++model.resampled_directions;
      } else if (cfg.normalize_directions) {
        next.col(i) /= norm;
      }
    }
    model.directions = std::move(next);

    const double loss = dorf_loss(vr, model.velocities, model.directions, cfg.mu, cfg.gamma);
    if (!std::isfinite(loss))
      throw DivergenceError("fit_dorf: non-finite loss at iteration " + std::to_string(it + 1));
    model.loss_trace.push_back(loss);
    if (loss < cfg.epsilon) {
      model.converged = true;
      break;
    }
  }
  return model;
}

}  // namespace

void FitConfig::validate() const {
  if (!(mu >= 0.0) || !(gamma >= 0.0) || !(lambda_ridge >= 0.0))
    throw ValidationError("FitConfig: mu, gamma and lambda_ridge must be >= 0");
  if (!(epsilon > 0.0)) throw ValidationError("FitConfig: epsilon must be > 0");
  if (max_iters < 1) throw ValidationError("FitConfig: max_iters must be >= 1");
}

Eigen::Matrix3Xd init_directions(Eigen::Index n_cols, std::uint64_t seed) {
  if (n_cols < 1) throw ValidationError("init_directions: n_cols must be >= 1");
  std::mt19937_64 rng(seed);
  Eigen::Matrix3Xd r(3, n_cols);
  for (Eigen::Index i = 0; i < n_cols; ++i) r.col(i) = draw_unit(rng);
  return r;
}

Eigen::MatrixX3d update_velocity(const Eigen::MatrixXd& vr, const Eigen::Matrix3Xd& directions,
                                 double lambda_ridge) {
  if (vr.cols() != directions.cols())
    throw ValidationError("update_velocity: V_r has " + std::to_string(vr.cols()) +
                          " columns but R has " + std::to_string(directions.cols()));
  const auto llt = factorize(regularized_gram(directions * directions.transpose(), lambda_ridge),
                             "update_velocity");
  // V^T = (R R^T + lambda I)^{-1} R V_r^T, the Gram matrix being symmetric.
  const Eigen::Matrix3Xd vt = llt.solve(directions * vr.transpose());
  return vt.transpose();
}

Eigen::Matrix3Xd solve_directions(const Eigen::MatrixXd& vr, const Eigen::MatrixX3d& velocities,
                                  double gamma) {
  if (vr.rows() != velocities.rows())
    throw ValidationError("update_directions: V_r has " + std::to_string(vr.rows()) +
                          " rows but V has " + std::to_string(velocities.rows()));
  const auto llt = factorize(regularized_gram(velocities.transpose() * velocities, gamma),
                             "update_directions");
  return llt.solve(velocities.transpose() * vr);
}

Eigen::Matrix3Xd update_directions(const Eigen::MatrixXd& vr, const Eigen::MatrixX3d& velocities,
                                   double gamma) {
  Eigen::Matrix3Xd r = solve_directions(vr, velocities, gamma);
  for (Eigen::Index i = 0; i < r.cols(); ++i) {
    const double norm = r.col(i).norm();
    if (!(norm > kZeroColumn))
      throw DegenerateDirectionError(static_cast<std::size_t>(i), "pre-normalization column is zero");
    r.col(i) /= norm;
  }
  return r;
}

double dorf_loss(const Eigen::MatrixXd& vr, const Eigen::MatrixX3d& velocities,
                 const Eigen::Matrix3Xd& directions, double mu, double gamma) {
  const auto t = static_cast<double>(vr.rows());
  const auto n = static_cast<double>(vr.cols());
  const double fit = (velocities * directions - vr).squaredNorm() / (t * n);
  return fit + mu * velocities.squaredNorm() / t + gamma * directions.squaredNorm() / n;
}

DorfModel fit_dorf(const Eigen::MatrixXd& vr, const FitConfig& cfg) {
  if (vr.rows() < 3 || vr.cols() < 3)
    throw ValidationError("fit_dorf: need T >= 3 and N >= 3, got " + std::to_string(vr.rows()) + "x" +
                          std::to_string(vr.cols()));
  return detail::fit_dorf_unchecked(vr, cfg);
}

namespace detail {

DorfModel fit_dorf_unchecked(const Eigen::MatrixXd& vr, const FitConfig& cfg) {
  cfg.validate();
  if (vr.rows() < 1 || vr.cols() < 1) throw ValidationError("fit_dorf: empty projection matrix");
  if (!vr.allFinite()) throw ValidationError("fit_dorf: V_r contains non-finite values");
  return run_fit(vr, cfg);
}

}  // namespace detail

SphereGrid sphere_grid(int m) {
  if (m < 1) throw ValidationError("sphere_grid: M must be >= 1");
  SphereGrid grid;
  grid.grid_m = m;
  grid.directions.resize(3, 2 * m * m);
  Eigen::Index k = 0;
  for (int ring = 0; ring < m; ++ring) {
    const double theta = std::numbers::pi * (ring + 0.5) / m;
    for (int j = 0; j < 2 * m; ++j) {
      const double phi = std::numbers::pi * j / m;
      grid.directions.col(k++) << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
          std::cos(theta);
    }
  }
  return grid;
}

DorfField project_dorf(const Eigen::MatrixX3d& velocities, const SphereGrid& grid) {
  return {velocities * grid.directions};
}

}  // namespace dorfhar
