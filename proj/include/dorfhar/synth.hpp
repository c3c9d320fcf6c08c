// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dorfhar/csi.hpp"
#include "dorfhar/doppler.hpp"
#include "dorfhar/radio.hpp"

namespace dorfhar {

// Velocity axes: 0 = lateral (left-right), 1 = vertical (up-down),
// 2 = depth (push-pull).
enum class GestureClass { Circle = 0, LeftRight = 1, UpDown = 2, PushPull = 3 };

inline constexpr int kGestureClassCount = 4;

std::string_view gesture_name(GestureClass cls) noexcept;
GestureClass gesture_from_name(std::string_view name);
GestureClass gesture_from_index(int index);
std::vector<std::string> gesture_vocabulary();

struct TrajectoryOptions {
  double sample_rate_hz = 100.0;
  // Seeded amplitude, rate and phase variation between trials.
  bool jitter = true;
};

/// Hand velocity v(s) in m/s, T x 3.
///
///   circle      0.6 m/s rotating in the lateral/vertical plane at 0.5 Hz
///   left-right  0.8 m/s peak along axis 0 at 0.6 Hz
///   up-down     0.7 m/s peak along axis 1 at 0.8 Hz
///   push-pull   0.9 m/s peak along axis 2 at 0.4 Hz
///
/// With jitter, amplitude scales by U(0.85, 1.15), rate by U(0.9, 1.1) and
/// the starting phase is U(0, 2 pi). Requires T >= 16.
Eigen::MatrixX3d gen_trajectory(GestureClass cls, int samples, std::uint64_t seed,
                                const TrajectoryOptions& opts = {});

enum class NoiseModel { AdditiveWhite, PhaseSpikes, OscillatorDrift };

std::string_view noise_model_name(NoiseModel m) noexcept;
NoiseModel noise_model_from_name(std::string_view name);

struct CorruptionSpec {
  AntennaId antenna;
  NoiseModel model = NoiseModel::AdditiveWhite;
  double strength = 10.0;

  void validate() const;
};

struct HardwareRamp {
  enum class Mode { None, Fixed, Random };
  Mode mode = Mode::None;
  // Fixed: phase += slope * n + intercept on every frame.
  // Random: slope ~ U(-slope, slope) and intercept ~ U(-pi, pi) per frame.
  double slope_rad = 0.3;
  double intercept_rad = 0.0;
};

struct SceneConfig {
  ArrayLayout layout{5, 3};
  int samples = 500;
  int moving_paths = 8;
  double static_amplitude = 1.0;
  double moving_amplitude = 0.1;
  // CSI: std of complex white noise per sample. Projections: std of the
  // additive radial-velocity noise in m/s.
  double noise_sigma = 0.01;
  HardwareRamp ramp;
  TrajectoryOptions trajectory;
  std::vector<CorruptionSpec> corruptions;

  void validate() const;
};

struct PropagationPath {
  double amplitude = 1.0;
  double base_delay_s = 0.0;
  Eigen::Vector3d direction = Eigen::Vector3d::UnitX();  // m_i, unit
  bool moving = false;
  int delay_bin = 0;  // where the path lands in delay_profile
};

struct AntennaChannel {
  AntennaId antenna;
  std::vector<PropagationPath> paths;  // static path first, moving by ascending delay_bin
  double noise_sigma = 0.0;
  std::optional<CorruptionSpec> corruption;
};

struct Scene {
  GestureClass gesture = GestureClass::Circle;
  std::uint64_t seed = 0;
  ArrayLayout layout;
  std::vector<double> timestamps;
  Eigen::MatrixX3d trajectory;
  std::vector<AntennaChannel> antennas;  // (ap, antenna) order
  HardwareRamp ramp;

  const AntennaChannel& channel(const AntennaId& id) const;
};

/// One static line-of-sight path at zero delay plus `moving_paths` paths on
/// distinct integer delay bins with directions uniform on the sphere, per
/// antenna. Deterministic per seed.
Scene make_scene(const SceneConfig& cfg, const RadioConfig& radio, GestureClass gesture,
                 std::uint64_t seed);

/// Scene with an explicit trajectory, used for closed-form checks.
Scene make_scene(const SceneConfig& cfg, const RadioConfig& radio, const Eigen::MatrixX3d& trajectory,
                 std::uint64_t seed);

struct SyntheticProjections {
  ProjectionMatrix vr;            // T x columns, rows are samples
  Eigen::MatrixX3d velocities;    // ground truth V
  Eigen::Matrix3Xd directions;    // ground truth R, parallel to vr.columns
};

/// V_r(s, i) = v(s)^T m_i + N(0, sigma_antenna(i)^2) over the moving paths.
SyntheticProjections gen_projections(const Scene& scene);

/// H_n(s) = sum_l beta_l exp(-j 2 pi (f_c - (n - N/2) spacing) tau_l(s)) with
/// tau_l(s) = tau_l - (1/c) sum_{s' < s} v(s')^T m_l / fs, so that a path's
/// delay bin rotates at +v^T m / wavelength. Noise, the hardware ramp and
/// corruptions are applied afterwards. Throws ValidationError if a delay
/// leaves [0, 1 / spacing).
CsiFrameSet gen_csi(const Scene& scene, const RadioConfig& radio);

nlohmann::json scene_to_json(const Scene& scene);

}  // namespace dorfhar
