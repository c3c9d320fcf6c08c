// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include "dorfhar/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "dorfhar/error.hpp"

namespace dorfhar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct GestureShape {
  double amplitude;  // m/s
  double rate_hz;
};

constexpr std::array<GestureShape, kGestureClassCount> kShapes = {{
    {0.6, 0.5},  // circle
    {0.8, 0.6},  // left-right
    {0.7, 0.8},  // up-down
    {0.9, 0.4},  // push-pull
}};

constexpr std::array<std::string_view, kGestureClassCount> kNames = {"circle", "left-right", "up-down",
                                                                     "push-pull"};

// Random-stream ids for derive_seed.
enum Stream : std::uint64_t { kTrajectory = 1, kGeometry = 2, kProjectionNoise = 3, kCsiNoise = 4 };

Eigen::Vector3d random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Eigen::Vector3d v(n(rng), n(rng), n(rng));
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

double projection_sigma(const AntennaChannel& ch) {
  return ch.corruption ? ch.noise_sigma * ch.corruption->strength : ch.noise_sigma;
}

}  // namespace

std::string_view gesture_name(GestureClass cls) noexcept { return kNames[static_cast<std::size_t>(cls)]; }

GestureClass gesture_from_name(std::string_view name) {
  for (int i = 0; i < kGestureClassCount; ++i)
    if (kNames[static_cast<std::size_t>(i)] == name) return static_cast<GestureClass>(i);
  throw ValidationError("unknown gesture class '" + std::string(name) + "'");
}

GestureClass gesture_from_index(int index) {
  if (index < 0 || index >= kGestureClassCount)
    throw ValidationError("unknown gesture class index " + std::to_string(index));
  return static_cast<GestureClass>(index);
}

std::vector<std::string> gesture_vocabulary() { return {kNames.begin(), kNames.end()}; }

Eigen::MatrixX3d gen_trajectory(GestureClass cls, int samples, std::uint64_t seed, const TrajectoryOptions& opts) {
  const int idx = static_cast<int>(cls);
  if (idx < 0 || idx >= kGestureClassCount) throw ValidationError("gen_trajectory: unknown gesture class");
  if (samples < 16) throw ValidationError("gen_trajectory: need T >= 16, got " + std::to_string(samples));
  if (!(opts.sample_rate_hz > 0.0)) throw ValidationError("gen_trajectory: sample rate must be > 0");

  GestureShape shape = kShapes[static_cast<std::size_t>(idx)];
  double phase = 0.0;
  if (opts.jitter) {
    std::mt19937_64 rng(derive_seed(seed, kTrajectory));
    std::uniform_real_distribution<double> amp(0.85, 1.15), rate(0.9, 1.1), ph(0.0, kTwoPi);
    shape.amplitude *= amp(rng);
    shape.rate_hz *= rate(rng);
    phase = ph(rng);
  }

  Eigen::MatrixX3d v = Eigen::MatrixX3d::Zero(samples, 3);
  for (int s = 0; s < samples; ++s) {
    const double arg = kTwoPi * shape.rate_hz * s / opts.sample_rate_hz + phase;
    switch (cls) {
      case GestureClass::Circle:
        v(s, 0) = shape.amplitude * std::cos(arg);
        v(s, 1) = shape.amplitude * std::sin(arg);
        break;
      case GestureClass::LeftRight: v(s, 0) = shape.amplitude * std::sin(arg); break;
      case GestureClass::UpDown: v(s, 1) = shape.amplitude * std::sin(arg); break;
      case GestureClass::PushPull: v(s, 2) = shape.amplitude * std::sin(arg); break;
    }
  }
  return v;
}

std::string_view noise_model_name(NoiseModel m) noexcept {
  switch (m) {
    case NoiseModel::AdditiveWhite: return "additive-white";
    case NoiseModel::PhaseSpikes: return "phase-spikes";
    case NoiseModel::OscillatorDrift: return "oscillator-drift";
  }
  return "?";
}

NoiseModel noise_model_from_name(std::string_view name) {
  for (auto m : {NoiseModel::AdditiveWhite, NoiseModel::PhaseSpikes, NoiseModel::OscillatorDrift})
    if (noise_model_name(m) == name) return m;
  throw ValidationError("unknown noise model '" + std::string(name) + "'");
}

void CorruptionSpec::validate() const {
  if (!(strength > 0.0) || !std::isfinite(strength))
    throw ValidationError("corruption strength must be > 0 for antenna " + to_string(antenna));
}

void SceneConfig::validate() const {
  if (layout.ap_count < 1 || layout.antennas_per_ap < 1) throw ValidationError("SceneConfig: empty layout");
  if (samples < 16) throw ValidationError("SceneConfig: samples must be >= 16");
  if (moving_paths < 1) throw ValidationError("SceneConfig: moving_paths must be >= 1");
  if (!(noise_sigma >= 0.0)) throw ValidationError("SceneConfig: noise_sigma must be >= 0");
  if (!(static_amplitude >= 0.0) || !(moving_amplitude > 0.0))
    throw ValidationError("SceneConfig: path amplitudes must be positive");
  for (const auto& c : corruptions) {
    c.validate();
    if (!layout.contains(c.antenna)) throw ValidationError("SceneConfig: corruption targets unknown antenna " + to_string(c.antenna));
  }
}

const AntennaChannel& Scene::channel(const AntennaId& id) const {
  for (const auto& ch : antennas)
    if (ch.antenna == id) return ch;
  throw ValidationError("scene has no antenna " + to_string(id));
}

Scene make_scene(const SceneConfig& cfg, const RadioConfig& radio, const Eigen::MatrixX3d& trajectory,
                 std::uint64_t seed) {
  cfg.validate();
  const int n = radio.subcarrier_count();
  const int max_bin = n / 2 - 1;
  if (cfg.moving_paths > max_bin)
    throw ValidationError("make_scene: " + std::to_string(cfg.moving_paths) + " moving paths need at least " +
                          std::to_string(2 * cfg.moving_paths + 2) + " subcarriers");
  if (trajectory.rows() < 2) throw ValidationError("make_scene: trajectory needs at least two samples");

  Scene scene;
  scene.seed = seed;
  scene.layout = cfg.layout;
  scene.trajectory = trajectory;
  scene.ramp = cfg.ramp;
  scene.timestamps.resize(static_cast<std::size_t>(trajectory.rows()));
  for (std::size_t s = 0; s < scene.timestamps.size(); ++s)
    scene.timestamps[s] = static_cast<double>(s) / radio.sample_rate_hz();

  std::mt19937_64 rng(derive_seed(seed, kGeometry));
  std::vector<int> candidates(static_cast<std::size_t>(max_bin));
  std::iota(candidates.begin(), candidates.end(), 1);
  for (const AntennaId& id : cfg.layout.antennas()) {
    AntennaChannel ch;
    ch.antenna = id;
    ch.noise_sigma = cfg.noise_sigma;
    for (const auto& c : cfg.corruptions)
      if (c.antenna == id) ch.corruption = c;

    PropagationPath los;
    los.amplitude = cfg.static_amplitude;
    los.direction = random_unit(rng);
    ch.paths.push_back(los);

    std::shuffle(candidates.begin(), candidates.end(), rng);
    std::vector<PropagationPath> moving;
    for (int l = 0; l < cfg.moving_paths; ++l) {
      const int b = candidates[static_cast<std::size_t>(l)];
      PropagationPath p;
      p.amplitude = cfg.moving_amplitude;
      p.base_delay_s = b * radio.delay_resolution_s();
      p.direction = random_unit(rng);
      p.moving = true;
      // The IDFT places a delay of b resolution cells at bin N - b because
      // the subcarrier phase term is exp(+j 2 pi (n - N/2) spacing tau).
      p.delay_bin = (n - b) % n;
      moving.push_back(p);
    }
    std::sort(moving.begin(), moving.end(), [](const auto& a, const auto& b) { return a.delay_bin < b.delay_bin; });
    ch.paths.insert(ch.paths.end(), moving.begin(), moving.end());
    scene.antennas.push_back(std::move(ch));
  }
  return scene;
}

Scene make_scene(const SceneConfig& cfg, const RadioConfig& radio, GestureClass gesture, std::uint64_t seed) {
  TrajectoryOptions opts = cfg.trajectory;
  opts.sample_rate_hz = radio.sample_rate_hz();
  Scene scene = make_scene(cfg, radio, gen_trajectory(gesture, cfg.samples, seed, opts), seed);
  scene.gesture = gesture;
  return scene;
}

SyntheticProjections gen_projections(const Scene& scene) {
  std::vector<ColumnTag> tags;
  std::vector<Eigen::Vector3d> dirs;
  std::vector<double> sigmas;
  for (const auto& ch : scene.antennas)
    for (const auto& p : ch.paths)
      if (p.moving) {
        tags.push_back({ch.antenna, p.delay_bin});
        dirs.push_back(p.direction);
        sigmas.push_back(projection_sigma(ch));
      }

  SyntheticProjections out;
  out.velocities = scene.trajectory;
  out.directions.resize(3, static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t i = 0; i < dirs.size(); ++i) out.directions.col(static_cast<Eigen::Index>(i)) = dirs[i];
  out.vr.values = out.velocities * out.directions;
  out.vr.columns = std::move(tags);
  out.vr.window_times_s = scene.timestamps;

  std::mt19937_64 rng(derive_seed(scene.seed, kProjectionNoise));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index i = 0; i < out.vr.values.cols(); ++i) {
    const double sigma = sigmas[static_cast<std::size_t>(i)];
    if (sigma == 0.0) continue;
    for (Eigen::Index s = 0; s < out.vr.values.rows(); ++s) out.vr.values(s, i) += sigma * gauss(rng);
  }
  return out;
}

CsiFrameSet gen_csi(const Scene& scene, const RadioConfig& radio) {
  const int n_sub = radio.subcarrier_count();
  const int m = scene.layout.antennas_per_ap;
  const int q_count = scene.layout.ap_count;
  const auto t_count = static_cast<std::size_t>(scene.trajectory.rows());
  const double fc = radio.carrier_frequency_hz();
  const double df = radio.subcarrier_spacing_hz();
  const double dt = 1.0 / radio.sample_rate_hz();
  const double c = radio.propagation_speed_m_per_s();
  const double max_delay = 1.0 / df;

  std::vector<cdouble> samples(t_count * static_cast<std::size_t>(n_sub * m * q_count));
  // Same (s, n, a, q) row-major order as CsiFrameSet::index.
  auto idx = [&](std::size_t s, int n, const AntennaId& id) {
    return ((s * static_cast<std::size_t>(n_sub) + static_cast<std::size_t>(n)) * static_cast<std::size_t>(m) +
            static_cast<std::size_t>(id.antenna)) *
               static_cast<std::size_t>(q_count) +
           static_cast<std::size_t>(id.ap);
  };

  std::mt19937_64 rng(derive_seed(scene.seed, kCsiNoise));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (const AntennaChannel& ch : scene.antennas) {
    // Propagation.
    for (const PropagationPath& p : ch.paths) {
      double tau = p.base_delay_s;
      for (std::size_t s = 0; s < t_count; ++s) {
        if (tau < 0.0 || tau >= max_delay)
          throw ValidationError("gen_csi: path delay " + std::to_string(tau) + " s outside [0, 1/spacing) on antenna " +
                                to_string(ch.antenna));
        for (int n = 0; n < n_sub; ++n) {
          const double f = fc - (n - n_sub / 2) * df;
          samples[idx(s, n, ch.antenna)] += std::polar(p.amplitude, -kTwoPi * std::fmod(f * tau, 1.0));
        }
        if (p.moving) tau -= scene.trajectory.row(static_cast<Eigen::Index>(s)).dot(p.direction) * dt / c;
      }
    }

    // Receiver noise and corruption.
    const CorruptionSpec* corr = ch.corruption ? &*ch.corruption : nullptr;
    double white = ch.noise_sigma;
    if (corr && corr->model == NoiseModel::AdditiveWhite) white *= corr->strength;
    const double component = white / std::numbers::sqrt2;
    std::vector<double> drift(static_cast<std::size_t>(n_sub), 0.0);
    for (std::size_t s = 0; s < t_count; ++s) {
      const bool spike = corr && corr->model == NoiseModel::PhaseSpikes && unit(rng) < std::min(0.5, 0.02 * corr->strength);
      for (int n = 0; n < n_sub; ++n) {
        cdouble& h = samples[idx(s, n, ch.antenna)];
        if (component > 0.0) h += cdouble(component * gauss(rng), component * gauss(rng));
        if (spike) h *= std::polar(1.0, gauss(rng));
        if (corr && corr->model == NoiseModel::OscillatorDrift) {
          // Residual PLL phase noise that is not affine across subcarriers.
          drift[static_cast<std::size_t>(n)] += 0.01 * corr->strength * gauss(rng);
          h *= std::polar(1.0, drift[static_cast<std::size_t>(n)]);
        }
      }
    }
  }

  // SFO/STO ramp, common to all antennas of a frame.
  if (scene.ramp.mode != HardwareRamp::Mode::None) {
    std::uniform_real_distribution<double> slope(-scene.ramp.slope_rad, scene.ramp.slope_rad);
    std::uniform_real_distribution<double> icpt(-std::numbers::pi, std::numbers::pi);
    for (std::size_t s = 0; s < t_count; ++s) {
      double a = scene.ramp.slope_rad, b = scene.ramp.intercept_rad;
      if (scene.ramp.mode == HardwareRamp::Mode::Random) {
        a = slope(rng);
        b = icpt(rng);
      }
      for (const AntennaChannel& ch : scene.antennas)
        for (int n = 0; n < n_sub; ++n) samples[idx(s, n, ch.antenna)] *= std::polar(1.0, a * n + b);
    }
  }

  return CsiFrameSet(radio, scene.layout, scene.timestamps, std::move(samples));
}

nlohmann::json scene_to_json(const Scene& scene) {
  nlohmann::json antennas = nlohmann::json::array();
  for (const auto& ch : scene.antennas) {
    nlohmann::json paths = nlohmann::json::array();
    for (const auto& p : ch.paths)
      paths.push_back({{"amplitude", p.amplitude},
                       {"base_delay_s", p.base_delay_s},
                       {"direction", {p.direction.x(), p.direction.y(), p.direction.z()}},
                       {"moving", p.moving},
                       {"delay_bin", p.delay_bin}});
    nlohmann::json a = {{"ap", ch.antenna.ap}, {"antenna", ch.antenna.antenna}, {"noise_sigma", ch.noise_sigma},
                        {"paths", paths}};
    if (ch.corruption)
      a["corruption"] = {{"model", noise_model_name(ch.corruption->model)}, {"strength", ch.corruption->strength}};
    antennas.push_back(std::move(a));
  }
  const char* ramp = scene.ramp.mode == HardwareRamp::Mode::None    ? "none"
                     : scene.ramp.mode == HardwareRamp::Mode::Fixed ? "fixed"
                                                                    : "random";
  return {{"gesture", gesture_name(scene.gesture)},
          {"seed", scene.seed},
          {"layout", {{"ap_count", scene.layout.ap_count}, {"antennas_per_ap", scene.layout.antennas_per_ap}}},
          {"samples", scene.trajectory.rows()},
          {"ramp", {{"mode", ramp}, {"slope_rad", scene.ramp.slope_rad}, {"intercept_rad", scene.ramp.intercept_rad}}},
          {"antennas", antennas}};
}

}  // namespace dorfhar
