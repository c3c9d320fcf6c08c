// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "dorfhar/doppler.hpp"
#include "dorfhar/dorf.hpp"
#include "dorfhar/error.hpp"
#include "dorfhar/preprocess.hpp"
#include "dorfhar/synth.hpp"
#include "scenes.hpp"

using namespace dorfhar;

namespace {

constexpr double kBinWidthMps = 100.0 / 64.0 * 0.125;

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd x = a.array() - a.mean(), y = b.array() - b.mean();
  return x.dot(y) / (x.norm() * y.norm());
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("gesture names") {
    CHECK(gesture_vocabulary() == std::vector<std::string>{"circle", "left-right", "up-down", "push-pull"});
    for (int i = 0; i < kGestureClassCount; ++i) CHECK(gesture_from_name(gesture_name(gesture_from_index(i))) == gesture_from_index(i));
    CHECK_THROWS_AS(gesture_from_name("wave"), ValidationError);
    CHECK_THROWS_AS(gesture_from_index(4), ValidationError);
    CHECK_THROWS_AS(gen_trajectory(static_cast<GestureClass>(7), 100, 1), ValidationError);
    CHECK_THROWS_AS(gen_trajectory(GestureClass::Circle, 15, 1), ValidationError);
  }

  TEST_CASE("single-axis gestures move on their own axis only") {
    const TrajectoryOptions plain{100.0, false};
    const auto ud = gen_trajectory(GestureClass::UpDown, 200, 1, plain);
    CHECK(ud.col(0).isZero(0.0));
    CHECK(ud.col(2).isZero(0.0));
    CHECK(ud.col(1).cwiseAbs().maxCoeff() > 0.5);
    const auto lr = gen_trajectory(GestureClass::LeftRight, 200, 1, plain);
    CHECK(lr.col(1).isZero(0.0));
    CHECK(lr.col(2).isZero(0.0));
    const auto pp = gen_trajectory(GestureClass::PushPull, 200, 1, plain);
    CHECK(pp.col(0).isZero(0.0));
    CHECK(pp.col(1).isZero(0.0));
  }

  TEST_CASE("circle keeps moving and left-right averages out") {
    const TrajectoryOptions plain{100.0, false};
    const auto circle = gen_trajectory(GestureClass::Circle, 500, 2, plain);
    CHECK(circle.rowwise().norm().mean() > 0.0);
    CHECK(circle.col(2).isZero(0.0));
    // 0.6 Hz over 500 samples at 100 Hz is exactly three periods.
    const auto lr = gen_trajectory(GestureClass::LeftRight, 500, 2, plain);
    CHECK(std::abs(lr.col(0).mean()) <= 1e-6);
  }

  TEST_CASE("jitter makes trials of a class differ") {
    for (int c = 0; c < kGestureClassCount; ++c) {
      const auto cls = gesture_from_index(c);
      const auto a = gen_trajectory(cls, 300, 10), b = gen_trajectory(cls, 300, 11);
      const int axis = cls == GestureClass::UpDown ? 1 : cls == GestureClass::PushPull ? 2 : 0;
      CHECK(correlation(a.col(axis).cwiseAbs(), b.col(axis).cwiseAbs()) < 0.999);
      CHECK(gen_trajectory(cls, 300, 10) == a);
    }
  }

  TEST_CASE("noiseless projections are V R exactly") {
    SceneConfig cfg;
    cfg.noise_sigma = 0.0;
    cfg.samples = 100;
    const auto scene = make_scene(cfg, RadioConfig::uthamo(), GestureClass::Circle, 3);
    const auto p = gen_projections(scene);
    CHECK(p.vr.values == p.velocities * p.directions);
    CHECK(p.vr.cols() == 15 * 8);
    for (Eigen::Index i = 0; i < p.directions.cols(); ++i) CHECK(std::abs(p.directions.col(i).norm() - 1.0) < 1e-12);
    for (const auto& ch : scene.antennas) {
      CHECK(p.vr.columns_of(ch.antenna).size() == 8);
      CHECK_FALSE(ch.paths.front().moving);
      for (std::size_t l = 2; l < ch.paths.size(); ++l) CHECK(ch.paths[l].delay_bin > ch.paths[l - 1].delay_bin);
    }
  }

  TEST_CASE("projection noise has the configured spread") {
    SceneConfig cfg;
    cfg.noise_sigma = 0.1;
    cfg.samples = 500;
    const auto p = gen_projections(make_scene(cfg, RadioConfig::uthamo(), GestureClass::PushPull, 4));
    const Eigen::MatrixXd residual = p.vr.values - p.velocities * p.directions;
    for (Eigen::Index c = 0; c < residual.cols(); ++c) {
      const double mean = residual.col(c).mean();
      const double sd = std::sqrt((residual.col(c).array() - mean).square().sum() / (residual.rows() - 1.0));
      CHECK(std::abs(sd - 0.1) <= 0.015);
    }
  }

  TEST_CASE("a corrupted antenna carries far more residual energy") {
    SceneConfig cfg;
    cfg.noise_sigma = 0.05;
    cfg.corruptions = {{{1, 2}, NoiseModel::AdditiveWhite, 10.0}};
    const auto p = gen_projections(make_scene(cfg, RadioConfig::uthamo(), GestureClass::UpDown, 5));
    const Eigen::MatrixXd residual = p.vr.values - p.velocities * p.directions;
    double clean_max = 0.0, bad_min = 1e300;
    for (Eigen::Index c = 0; c < residual.cols(); ++c) {
      const double e = residual.col(c).squaredNorm();
      if (p.vr.columns[static_cast<std::size_t>(c)].antenna == AntennaId{1, 2})
        bad_min = std::min(bad_min, e);
      else
        clean_max = std::max(clean_max, e);
    }
    CHECK(bad_min >= 5.0 * clean_max);
  }

  TEST_CASE("scene validation") {
    SceneConfig cfg;
    cfg.corruptions = {{{7, 0}, NoiseModel::PhaseSpikes, 2.0}};
    CHECK_THROWS_AS(make_scene(cfg, RadioConfig::uthamo(), GestureClass::Circle, 1), ValidationError);
    cfg.corruptions = {{{0, 0}, NoiseModel::PhaseSpikes, 0.0}};
    CHECK_THROWS_AS(make_scene(cfg, RadioConfig::uthamo(), GestureClass::Circle, 1), ValidationError);
    cfg.corruptions.clear();
    cfg.moving_paths = 40;
    CHECK_THROWS_AS(make_scene(cfg, RadioConfig::uthamo(), GestureClass::Circle, 1), ValidationError);
    cfg.moving_paths = 8;
    cfg.noise_sigma = -1.0;
    CHECK_THROWS_AS(make_scene(cfg, RadioConfig::uthamo(), GestureClass::Circle, 1), ValidationError);
  }

  TEST_CASE("a static channel is constant in time") {
    const auto scene = testing::single_path_scene(testing::constant_velocity(50, 0.0), 6);
    const auto csi = gen_csi(scene, RadioConfig::uthamo());
    for (std::size_t s = 1; s < csi.time_count(); ++s)
      for (int n = 0; n < csi.subcarrier_count(); ++n) CHECK(csi.at(s, n, 0, 0) == csi.at(0, n, 0, 0));
  }

  TEST_CASE("delays outside the unambiguous range are rejected") {
    // 1000 km/s moves the path by more than the unambiguous range per frame.
    const auto scene = testing::single_path_scene(testing::constant_velocity(200, 1e6), 7);
    CHECK_THROWS_AS(gen_csi(scene, RadioConfig::uthamo()), ValidationError);
  }

  TEST_CASE("constant radial velocity rotates its delay bin at v over wavelength") {
    const auto radio = RadioConfig::uthamo();
    const auto scene = testing::single_path_scene(testing::constant_velocity(400, 0.625), 8);
    const auto csi = gen_csi(scene, radio);
    const int bin = scene.antennas[0].paths[1].delay_bin;
    // Phase advance per frame of that bin is 2 pi f / fs with f = 5 Hz.
    const double expected = 2.0 * std::numbers::pi * 0.625 / radio.wavelength_m() / radio.sample_rate_hz();
    for (std::size_t s = 1; s < 50; ++s) {
      std::vector<cdouble> prev, cur;
      for (int n = 0; n < 64; ++n) {
        prev.push_back(csi.at(s - 1, n, 0, 0));
        cur.push_back(csi.at(s, n, 0, 0));
      }
      cdouble hp = 0.0, hc = 0.0;
      for (int n = 0; n < 64; ++n) {
        const auto w = std::polar(1.0 / 64, 2.0 * std::numbers::pi * n * bin / 64.0);
        hp += prev[static_cast<std::size_t>(n)] * w;
        hc += cur[static_cast<std::size_t>(n)] * w;
      }
      CHECK(std::arg(hc * std::conj(hp)) == doctest::Approx(expected).epsilon(1e-3));
    }
    DopplerConfig dc;
    dc.bins_per_antenna = 1;
    const auto vr = radial_velocity_field(sanitize(csi), dc);
    REQUIRE(vr.columns[0].delay_bin == bin);
    for (Eigen::Index w = 0; w < vr.rows(); ++w) CHECK(std::abs(vr.values(w, 0) - 0.625) <= kBinWidthMps);
  }

  TEST_CASE("sanitization erases an injected affine ramp") {
    const auto radio = RadioConfig::uthamo();
    SceneConfig cfg;
    cfg.layout = {2, 2};
    cfg.samples = 60;
    const Scene plain = make_scene(cfg, radio, GestureClass::Circle, 9);
    Scene ramped = plain;
    ramped.ramp.mode = HardwareRamp::Mode::Fixed;
    ramped.ramp.slope_rad = 0.3;
    ramped.ramp.intercept_rad = 0.8;
    const auto a = sanitize(gen_csi(plain, radio)), b = sanitize(gen_csi(ramped, radio));
    double worst = 0.0;
    for (std::size_t i = 0; i < a.samples().size(); ++i) worst = std::max(worst, std::abs(a.samples()[i] - b.samples()[i]));
    CHECK(worst <= 1e-6);

    Scene random_ramp = plain;
    random_ramp.ramp.mode = HardwareRamp::Mode::Random;
    const auto c = sanitize(gen_csi(random_ramp, radio));
    worst = 0.0;
    for (std::size_t i = 0; i < a.samples().size(); ++i) worst = std::max(worst, std::abs(a.samples()[i] - c.samples()[i]));
    CHECK(worst <= 1e-6);
  }

  TEST_CASE("CSI corruption models disturb only their antenna") {
    const auto radio = RadioConfig::uthamo();
    for (NoiseModel model : {NoiseModel::AdditiveWhite, NoiseModel::PhaseSpikes, NoiseModel::OscillatorDrift}) {
      SceneConfig cfg;
      cfg.layout = {1, 3};
      cfg.samples = 100;
      cfg.noise_sigma = 0.0;
      const Scene clean = make_scene(cfg, radio, GestureClass::LeftRight, 12);
      cfg.noise_sigma = 0.001;
      cfg.corruptions = {{{0, 1}, model, 20.0}};
      const Scene noisy = make_scene(cfg, radio, GestureClass::LeftRight, 12);
      const auto a = gen_csi(clean, radio), b = gen_csi(noisy, radio);
      std::vector<double> dev(3, 0.0);
      for (std::size_t s = 0; s < a.time_count(); ++s)
        for (int n = 0; n < 64; ++n)
          for (int ant = 0; ant < 3; ++ant) dev[static_cast<std::size_t>(ant)] += std::norm(a.at(s, n, ant, 0) - b.at(s, n, ant, 0));
      CHECK(dev[1] > 10.0 * dev[0]);
      CHECK(dev[1] > 10.0 * dev[2]);
    }
    CHECK(noise_model_from_name("oscillator-drift") == NoiseModel::OscillatorDrift);
    CHECK_THROWS_AS(noise_model_from_name("hum"), ValidationError);
  }

  TEST_CASE("noiseless three-axis projections refit to 1e-2") {
    // All-axis motion keeps V full rank; single-axis gestures do not.
    const int t = 300;
    Eigen::MatrixX3d traj(t, 3);
    for (int s = 0; s < t; ++s) traj.row(s) << 0.6 * std::sin(0.05 * s), 0.5 * std::cos(0.08 * s), 0.4 * std::sin(0.031 * s + 0.5);
    SceneConfig cfg;
    cfg.noise_sigma = 0.0;
    cfg.samples = t;
    cfg.layout = {1, 3};
    const auto p = gen_projections(make_scene(cfg, RadioConfig::uthamo(), traj, 13));
    FitConfig fc;
    fc.mu = fc.gamma = fc.lambda_ridge = 1e-9;
    fc.epsilon = 1e-10;
    fc.max_iters = 5000;
    const auto m = fit_dorf(p.vr.values, fc);
    CHECK((m.reconstruction() - p.vr.values).norm() <= 1e-2 * p.vr.values.norm());
  }

  TEST_CASE("CSI pipeline tracks a single dominant path within two bins") {
    const auto radio = RadioConfig::uthamo();
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto traj = gen_trajectory(GestureClass::LeftRight, 500, seed);
      const auto scene = testing::single_path_scene(traj, seed, 0.001);
      const auto truth = gen_projections(scene);
      DopplerConfig dc;
      dc.bins_per_antenna = 1;
      const auto vr = radial_velocity_field(sanitize(gen_csi(scene, radio)), dc);
      REQUIRE(vr.columns[0].delay_bin == truth.vr.columns[0].delay_bin);
      for (Eigen::Index w = 0; w < vr.rows(); ++w) {
        const auto centre = static_cast<Eigen::Index>(std::lround(vr.window_times_s[static_cast<std::size_t>(w)] * 100.0));
        const double expect = truth.velocities.row(centre).dot(truth.directions.col(0).transpose());
        CHECK(std::abs(vr.values(w, 0) - expect) <= 2.0 * kBinWidthMps);
      }
    }
  }

  TEST_CASE("generators are deterministic per seed") {
    const auto radio = RadioConfig::uthamo();
    SceneConfig cfg;
    cfg.layout = {2, 2};
    cfg.samples = 40;
    cfg.ramp.mode = HardwareRamp::Mode::Random;
    cfg.corruptions = {{{1, 0}, NoiseModel::PhaseSpikes, 5.0}};
    const auto a = make_scene(cfg, radio, GestureClass::UpDown, 14), b = make_scene(cfg, radio, GestureClass::UpDown, 14);
    CHECK(scene_to_json(a) == scene_to_json(b));
    CHECK(gen_csi(a, radio) == gen_csi(b, radio));
    CHECK(gen_projections(a).vr.values == gen_projections(b).vr.values);
    CHECK(scene_to_json(make_scene(cfg, radio, GestureClass::UpDown, 15)) != scene_to_json(a));
    CHECK(scene_to_json(a)["antennas"][2]["corruption"]["model"] == "phase-spikes");
  }
}
