// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <doctest.h>

#include "dorfhar/doppler.hpp"
#include "dorfhar/error.hpp"
#include "dorfhar/preprocess.hpp"
#include "dorfhar/synth.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace dorfhar;

namespace {

constexpr double kBinWidthMps = 100.0 / 64.0 * 0.125;

std::vector<cdouble> tone(double freq_hz, int samples, double fs = 100.0) {
  std::vector<cdouble> out;
  for (int s = 0; s < samples; ++s) out.push_back(std::polar(1.0, 2.0 * std::numbers::pi * freq_hz * s / fs));
  return out;
}

Eigen::Index argmax_col(const DopplerSpectrum& spec, Eigen::Index w) {
  Eigen::Index best;
  spec.power.row(w).maxCoeff(&best);
  return best;
}

ProjectionMatrix field_of(const Scene& scene) {
  DopplerConfig cfg;
  cfg.bins_per_antenna = 1;
  return radial_velocity_field(sanitize(gen_csi(scene, RadioConfig::uthamo())), cfg);
}

}  // namespace

TEST_SUITE("doppler") {
  TEST_CASE("delay profile of a constant is an impulse at bin 0") {
    const auto h = delay_profile(std::vector<cdouble>(8, 1.0));
    CHECK(std::abs(h[0] - 1.0) < 1e-15);
    for (std::size_t i = 1; i < 8; ++i) CHECK(std::abs(h[i]) < 1e-15);
  }

  TEST_CASE("a linear phase lands in its delay bin") {
    std::vector<cdouble> x;
    for (int n = 0; n < 8; ++n) x.push_back(std::polar(1.0, -2.0 * std::numbers::pi * n * 3.0 / 8.0));
    const auto h = delay_profile(x);
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(h[i] - (i == 3 ? 1.0 : 0.0)) < 1e-14);
  }

  TEST_CASE("delay profile matches the naive sum and is linear") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int n : {2, 5, 16, 64}) {
      std::vector<cdouble> x(static_cast<std::size_t>(n)), y(x.size()), mix(x.size());
      for (auto& v : x) v = {g(rng), g(rng)};
      for (auto& v : y) v = {g(rng), g(rng)};
      const cdouble a(0.3, -1.2), b(2.0, 0.5);
      for (std::size_t i = 0; i < x.size(); ++i) mix[i] = a * x[i] + b * y[i];
      const auto hx = delay_profile(x), hy = delay_profile(y), hm = delay_profile(mix);
      const auto ref = oracle::naive_idft(x);
      for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(std::abs(hx[i] - ref[i]) <= 1e-12);
        CHECK(std::abs(hm[i] - (a * hx[i] + b * hy[i])) <= 1e-12);
      }
    }
    CHECK_THROWS_AS(delay_profile(std::vector<cdouble>{1.0}), ValidationError);
  }

  TEST_CASE("5 Hz tone peaks at the nearest bin in every window") {
    const auto spec = doppler_psd(tone(5.0, 500), 64, 16, 100.0);
    REQUIRE(spec.power.rows() == 28);
    for (Eigen::Index w = 0; w < spec.power.rows(); ++w) {
      CHECK(spec.frequencies_hz[static_cast<std::size_t>(argmax_col(spec, w))] == doctest::Approx(4.6875));
      CHECK(std::abs(peak_frequency_hz(spec, w) - 5.0) < 0.5 * 100.0 / 64.0);
    }
  }

  TEST_CASE("conjugation mirrors the peak") {
    auto x = tone(5.0, 300);
    for (auto& v : x) v = std::conj(v);
    const auto spec = doppler_psd(x, 64, 16, 100.0);
    for (Eigen::Index w = 0; w < spec.power.rows(); ++w) {
      CHECK(spec.frequencies_hz[static_cast<std::size_t>(argmax_col(spec, w))] == doctest::Approx(-4.6875));
      CHECK(peak_frequency_hz(spec, w) < 0.0);
    }
  }

  TEST_CASE("a constant series has no dynamic power") {
    const auto spec = doppler_psd(std::vector<cdouble>(200, cdouble(0.7, -0.2)), 64, 16, 100.0);
    CHECK(spec.power.maxCoeff() < 1e-25);
    CHECK(peak_frequency_hz(spec, 0) == 0.0);
  }

  TEST_CASE("frequency axis is ascending and two-sided") {
    const auto spec = doppler_psd(tone(1.0, 64), 64, 16, 100.0);
    REQUIRE(spec.frequencies_hz.size() == 64);
    CHECK(spec.frequencies_hz.front() == doctest::Approx(-50.0));
    CHECK(spec.frequencies_hz[32] == 0.0);
    for (std::size_t k = 1; k < 64; ++k) CHECK(spec.frequencies_hz[k] > spec.frequencies_hz[k - 1]);
  }

  TEST_CASE("periodogram is nonnegative and satisfies Parseval") {
    std::mt19937_64 rng(22);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cdouble> x(400);
    for (auto& v : x) v = {g(rng), g(rng)};
    for (int len : {16, 33, 64}) {
      const auto spec = doppler_psd(x, len, 7, 100.0);
      CHECK(spec.power.minCoeff() >= 0.0);
      for (Eigen::Index w = 0; w < spec.power.rows(); ++w) {
        const std::size_t start = spec.window_starts[static_cast<std::size_t>(w)];
        cdouble mean = 0.0;
        for (int n = 0; n < len; ++n) mean += x[start + static_cast<std::size_t>(n)];
        mean /= static_cast<double>(len);
        double energy = 0.0;
        for (int n = 0; n < len; ++n) {
          const double hann = std::pow(std::sin(std::numbers::pi * n / len), 2);
          energy += std::norm((x[start + static_cast<std::size_t>(n)] - mean) * hann);
        }
        CHECK(spec.power.row(w).sum() == doctest::Approx(energy).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("series shorter than one window is rejected") {
    CHECK_THROWS_AS(doppler_psd(tone(5.0, 63), 64, 16, 100.0), ValidationError);
    CHECK_THROWS_AS(doppler_psd(tone(5.0, 100), 64, 0, 100.0), ValidationError);
  }

  TEST_CASE("single path at 0.625 m/s is recovered within one bin") {
    const auto vr = field_of(testing::single_path_scene(testing::constant_velocity(500, 0.625), 3));
    REQUIRE(vr.cols() == 1);
    for (Eigen::Index w = 0; w < vr.rows(); ++w) CHECK(std::abs(vr.values(w, 0) - 0.625) <= kBinWidthMps);
  }

  TEST_CASE("a static scene shows no Doppler") {
    const auto vr = field_of(testing::single_path_scene(testing::constant_velocity(300, 0.0), 4));
    CHECK(vr.values.cwiseAbs().maxCoeff() <= kBinWidthMps);
  }

  TEST_CASE("reversing the motion negates the radial velocity") {
    for (double v : {0.3, 0.625, 1.1}) {
      const auto fwd = field_of(testing::single_path_scene(testing::constant_velocity(400, v), 5));
      const auto rev = field_of(testing::single_path_scene(testing::constant_velocity(400, -v), 5));
      REQUIRE(fwd.rows() == rev.rows());
      for (Eigen::Index w = 0; w < fwd.rows(); ++w) CHECK(std::abs(fwd.values(w, 0) + rev.values(w, 0)) <= kBinWidthMps);
    }
  }

  TEST_CASE("equal-energy bins resolve to the lowest indices") {
    // Every delay bin carries the same unit-modulus rotating tone.
    const RadioConfig radio(2.4e9, 312.5e3, 8, 100.0, 3e8);
    std::vector<double> ts;
    std::vector<cdouble> samples;
    for (int s = 0; s < 80; ++s) {
      ts.push_back(0.01 * s);
      const auto rot = std::polar(1.0, 2.0 * std::numbers::pi * 5.0 * s / 100.0);
      samples.push_back(8.0 * rot);
      for (int n = 1; n < 8; ++n) samples.push_back(0.0);
    }
    const CsiFrameSet frames(radio, {1, 1}, ts, samples);
    DopplerConfig cfg;
    cfg.bins_per_antenna = 3;
    const auto vr = radial_velocity_field(frames, cfg);
    REQUIRE(vr.cols() == 3);
    for (int i = 0; i < 3; ++i) CHECK(vr.columns[static_cast<std::size_t>(i)].delay_bin == i);
  }

  TEST_CASE("column map covers every antenna with the configured bins") {
    SceneConfig sc;
    sc.layout = {2, 3};
    sc.samples = 120;
    const auto radio = RadioConfig::uthamo();
    const auto scene = make_scene(sc, radio, GestureClass::Circle, 9);
    DopplerConfig cfg;
    const auto vr = radial_velocity_field(sanitize(gen_csi(scene, radio)), cfg);
    CHECK(vr.cols() == 6 * cfg.bins_per_antenna);
    CHECK(vr.rows() == (120 - 64) / 16 + 1);
    CHECK(vr.antennas().size() == 6);
    for (const auto& id : vr.antennas()) CHECK(vr.columns_of(id).size() == 8);
    const auto per_ap = split_by_ap(vr);
    REQUIRE(per_ap.size() == 2);
    for (const auto& ap : per_ap) CHECK(ap.cols() == 24);
  }

  TEST_CASE("trial shorter than one window is rejected") {
    const auto scene = testing::single_path_scene(testing::constant_velocity(40, 0.5), 6);
    CHECK_THROWS_AS(field_of(scene), ValidationError);
  }

  TEST_CASE("projection CSV round-trips exactly") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g(0.0, 1.0);
    ProjectionMatrix vr;
    vr.values.resize(5, 4);
    for (Eigen::Index i = 0; i < vr.values.size(); ++i) vr.values.data()[i] = g(rng) / 3.0;
    vr.columns = {{{0, 0}, 1}, {{0, 0}, 5}, {{1, 2}, 3}, {{1, 2}, 60}};
    vr.window_times_s = {0.315, 0.475, 0.635, 0.795, 0.955};
    std::stringstream ss;
    write_projection_csv(ss, vr);
    CHECK(ss.str().rfind("time_s,0:0:1,0:0:5,1:2:3,1:2:60\n", 0) == 0);
    const auto back = read_projection_csv(ss);
    CHECK(back.values == vr.values);
    CHECK(back.columns == vr.columns);
    CHECK(back.window_times_s == vr.window_times_s);
  }
}
