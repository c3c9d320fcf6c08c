// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>

#include "dorfhar/container.hpp"
#include "dorfhar/dataset.hpp"
#include "dorfhar/error.hpp"
#include "dorfhar/synth.hpp"
#include "dorfhar/pipeline.hpp"

using namespace dorfhar;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "dorfhar-unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

RadioConfig small_radio(int n) { return RadioConfig(2.4e9, 312.5e3, n, 100.0, 3e8); }

CsiFrameSet random_frames(std::mt19937_64& rng, int t, int n, ArrayLayout layout) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> ts(static_cast<std::size_t>(t));
  for (int s = 0; s < t; ++s) ts[static_cast<std::size_t>(s)] = 0.01 * s;
  std::vector<cdouble> samples(static_cast<std::size_t>(t * n * layout.antenna_count()));
  for (auto& v : samples) v = {g(rng), g(rng)};
  return CsiFrameSet(small_radio(n), layout, ts, samples);
}

bool bit_equal(const std::vector<cdouble>& a, std::span<const cdouble> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(cdouble)) == 0;
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("wavelength is c over carrier frequency") {
    for (double fc : {9e8, 2.4e9, 5.18e9, 6e10}) {
      RadioConfig r(fc, 312.5e3, 64, 100.0, 299792458.0);
      CHECK(std::abs(r.wavelength_m() * r.carrier_frequency_hz() - r.propagation_speed_m_per_s()) <=
            1e-9 * r.propagation_speed_m_per_s());
    }
    CHECK(RadioConfig::uthamo().wavelength_m() == doctest::Approx(0.125).epsilon(1e-12));
  }

  TEST_CASE("radio rejects out-of-range constants") {
    CHECK_THROWS_AS(RadioConfig(0.0, 312.5e3, 64, 100.0, 3e8), ValidationError);
    CHECK_THROWS_AS(RadioConfig(2.4e9, -1.0, 64, 100.0, 3e8), ValidationError);
    CHECK_THROWS_AS(RadioConfig(2.4e9, 312.5e3, 1, 100.0, 3e8), ValidationError);
  }

  TEST_CASE("frame set enforces density and increasing timestamps") {
    const ArrayLayout layout{1, 1};
    CHECK_THROWS_AS(CsiFrameSet(small_radio(4), layout, {0.0, 0.01}, std::vector<cdouble>(7)), ValidationError);
    CHECK_THROWS_AS(CsiFrameSet(small_radio(4), layout, {0.0, 0.0}, std::vector<cdouble>(8)), ValidationError);
    CHECK_NOTHROW(CsiFrameSet(small_radio(4), layout, {0.0, 0.01}, std::vector<cdouble>(8)));
  }

  TEST_CASE("index puts the access point fastest") {
    std::mt19937_64 rng(1);
    const CsiFrameSet f = random_frames(rng, 3, 4, {2, 3});
    CHECK(f.index(0, 0, 0, 1) == 1);
    CHECK(f.index(0, 0, 1, 0) == 2);
    CHECK(f.index(0, 1, 0, 0) == 6);
    CHECK(f.index(1, 0, 0, 0) == 24);
    const auto frame = f.frame(2, {1, 2});
    for (int n = 0; n < 4; ++n) CHECK(frame[static_cast<std::size_t>(n)] == f.at(2, n, 2, 1));
  }

  TEST_CASE("minimal dataset round-trips") {
    std::mt19937_64 rng(2);
    Dataset d{{"only"}, {{random_frames(rng, 2, 4, {1, 1}), 0, 0}}};
    const auto path = scratch("minimal.dorfhar");
    save_dataset(d, path);
    const Dataset back = load_dataset(path);
    REQUIRE(back.trials.size() == 1);
    CHECK(back.trials[0].frames.time_count() == 2);
    CHECK(back.trials[0].frames.subcarrier_count() == 4);
    CHECK(back.trials[0].frames.layout() == ArrayLayout{1, 1});
    CHECK(back.trials[0] == d.trials[0]);
  }

  TEST_CASE("empty or inconsistent trial lists are rejected") {
    CHECK_THROWS_AS(save_dataset(Dataset{{"a"}, {}}, scratch("empty.dorfhar")), ValidationError);
    std::mt19937_64 rng(3);
    Dataset mixed{{"a"}, {{random_frames(rng, 2, 4, {1, 1}), 0, 0}, {random_frames(rng, 2, 8, {1, 1}), 0, 0}}};
    CHECK_THROWS_AS(save_dataset(mixed, scratch("mixed.dorfhar")), ValidationError);
    Dataset bad_label{{"a"}, {{random_frames(rng, 2, 4, {1, 1}), 3, 0}}};
    CHECK_THROWS_AS(save_dataset(bad_label, scratch("label.dorfhar")), ValidationError);
  }

  TEST_CASE("unwritable path is an I/O error") {
    std::mt19937_64 rng(4);
    Dataset d{{"a"}, {{random_frames(rng, 2, 4, {1, 1}), 0, 0}}};
    CHECK_THROWS_AS(save_dataset(d, "/nonexistent-dir/sub/x.dorfhar"), IoError);
  }

  TEST_CASE("non-increasing timestamps in a file name the trial") {
    std::mt19937_64 rng(5);
    Dataset d{{"a"}, {{random_frames(rng, 3, 4, {1, 1}), 0, 0}, {random_frames(rng, 3, 4, {1, 1}), 0, 0}}};
    const auto path = scratch("ts.dorfhar");
    save_dataset(d, path);
    const Container c = read_container(path);
    const auto ts_offset = c.header["trials"][1]["offsets"]["timestamps"].get<std::uint64_t>();
    // Overwrite the second timestamp of trial 1 with its first.
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    char first[8];
    f.seekg(static_cast<std::streamoff>(c.payload_offset + ts_offset));
    f.read(first, 8);
    f.seekp(static_cast<std::streamoff>(c.payload_offset + ts_offset + 8));
    f.write(first, 8);
    f.close();
    try {
      load_dataset(path);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("trial 1") != std::string::npos);
    }
  }

  TEST_CASE("malformed files report offset and field") {
    const auto path = scratch("bad.dorfhar");
    {
      std::ofstream out(path, std::ios::binary);
      out << "NOTDORF!and some more bytes";
    }
    try {
      load_dataset(path);
      FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
      CHECK(e.offset() == 0);
      CHECK(e.field() == "magic");
    }

    nlohmann::json header = {{"version", "2.0"}, {"kind", "dataset"}};
    write_container(path, header, {});
    CHECK_THROWS_AS(load_dataset(path), DecodeError);

    header = {{"version", "1.0"}, {"kind", "dataset"}, {"radio", radio_to_json(small_radio(4))},
              {"layout", {{"ap_count", 1}, {"antennas_per_ap", 1}}}, {"classes", {"a"}},
              {"trials", {{{"label", 0}, {"subject", 0}, {"T", 2}, {"offsets", {{"timestamps", 0}, {"samples", 16}}}}}}};
    write_container(path, header, {});
    try {
      load_dataset(path);
      FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
      CHECK(e.field().find("trials[0]") == 0);
      CHECK(e.offset() >= 16);
    }
  }

  TEST_CASE("codec round-trip is the identity on random sets") {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> dim(1, 4);
    for (int rep = 0; rep < 25; ++rep) {
      const ArrayLayout layout{dim(rng), dim(rng)};
      const int n = 2 * dim(rng);
      Dataset d;
      d.classes = {"x", "y", "z"};
      const int trials = dim(rng);
      for (int t = 0; t < trials; ++t)
        d.trials.push_back({random_frames(rng, 1 + dim(rng), n, layout), t % 3, t});
      const auto path = scratch("prop.dorfhar");
      save_dataset(d, path);
      const Dataset back = load_dataset(path);
      REQUIRE(back.trials.size() == d.trials.size());
      CHECK(back.classes == d.classes);
      for (std::size_t t = 0; t < d.trials.size(); ++t) {
        const auto& a = d.trials[t].frames;
        std::vector<cdouble> copy(a.samples().begin(), a.samples().end());
        CHECK(bit_equal(copy, back.trials[t].frames.samples()));
        CHECK(back.trials[t] == d.trials[t]);
      }
    }
  }

  TEST_CASE("synthetic suite with seed 7 round-trips bit-exactly") {
    SynthSuite suite;
    suite.trials_per_class = 5;
    suite.scene.samples = 80;
    const Dataset d = generate_suite(suite, RadioConfig::uthamo(), 7);
    const auto path = scratch("seed7.dorfhar");
    save_dataset(d, path);
    const Dataset back = load_dataset(path);
    REQUIRE(back.trials.size() == 20);
    std::vector<int> per_label(4, 0);
    for (const auto& t : back.trials) ++per_label.at(static_cast<std::size_t>(t.label));
    CHECK(per_label == std::vector<int>{5, 5, 5, 5});
    for (std::size_t t = 0; t < d.trials.size(); ++t) {
      const auto& a = d.trials[t].frames;
      std::vector<cdouble> copy(a.samples().begin(), a.samples().end());
      CHECK(bit_equal(copy, back.trials[t].frames.samples()));
    }
  }

  TEST_CASE("derive_seed separates streams") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(9, 4) == derive_seed(9, 4));
  }
}
