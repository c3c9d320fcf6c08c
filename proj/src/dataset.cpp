// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include "dorfhar/dataset.hpp"

#include "dorfhar/container.hpp"
#include "dorfhar/error.hpp"

namespace dorfhar {

nlohmann::json radio_to_json(const RadioConfig& radio) {
  return {{"carrier_frequency_hz", radio.carrier_frequency_hz()},
          {"subcarrier_spacing_hz", radio.subcarrier_spacing_hz()},
          {"subcarrier_count", radio.subcarrier_count()},
          {"sample_rate_hz", radio.sample_rate_hz()},
          {"propagation_speed_m_per_s", radio.propagation_speed_m_per_s()}};
}

RadioConfig radio_from_json(const nlohmann::json& j, std::uint64_t offset) {
  const auto f_c = header_get<double>(j, "carrier_frequency_hz", "radio.carrier_frequency_hz", offset);
  const auto df = header_get<double>(j, "subcarrier_spacing_hz", "radio.subcarrier_spacing_hz", offset);
  const auto n = header_get<int>(j, "subcarrier_count", "radio.subcarrier_count", offset);
  const auto fs = header_get<double>(j, "sample_rate_hz", "radio.sample_rate_hz", offset);
  const auto c = header_get<double>(j, "propagation_speed_m_per_s", "radio.propagation_speed_m_per_s", offset);
  try {
    return RadioConfig(f_c, df, n, fs, c);
  } catch (const ValidationError& e) {
    throw DecodeError(offset, "radio", e.what());
  }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  if (dataset.trials.empty()) throw ValidationError("save_dataset: trial list is empty");
  const RadioConfig& radio = dataset.trials.front().frames.radio();
  const ArrayLayout& layout = dataset.trials.front().frames.layout();

  nlohmann::json trials = nlohmann::json::array();
  PayloadWriter payload;
  for (std::size_t t = 0; t < dataset.trials.size(); ++t) {
    const LabeledTrial& trial = dataset.trials[t];
    if (!(trial.frames.radio() == radio))
      throw ValidationError("save_dataset: trial " + std::to_string(t) + " has a different RadioConfig");
    if (!(trial.frames.layout() == layout))
      throw ValidationError("save_dataset: trial " + std::to_string(t) + " has a different layout");
    if (trial.label < 0 || static_cast<std::size_t>(trial.label) >= dataset.classes.size())
      throw ValidationError("save_dataset: trial " + std::to_string(t) + " label " +
                            std::to_string(trial.label) + " outside class vocabulary");

    const std::uint64_t ts_offset = payload.size();
    payload.put_f64s(trial.frames.timestamps());
    const std::uint64_t sample_offset = payload.size();
    for (const cdouble& z : trial.frames.samples()) {
      payload.put_f64(z.real());
      payload.put_f64(z.imag());
    }
    trials.push_back({{"label", trial.label},
                      {"subject", trial.subject},
                      {"T", trial.frames.time_count()},
                      {"offsets", {{"timestamps", ts_offset}, {"samples", sample_offset}}}});
  }

  nlohmann::json header = {{"version", kContainerVersion},
                           {"kind", "dataset"},
                           {"radio", radio_to_json(radio)},
                           {"layout", {{"ap_count", layout.ap_count}, {"antennas_per_ap", layout.antennas_per_ap}}},
                           {"classes", dataset.classes},
                           {"trials", trials}};
  write_container(path, header, payload.bytes());
}

Dataset load_dataset(const std::filesystem::path& path) {
  const Container c = read_container(path);
  constexpr std::uint64_t kHeaderOffset = 16;
  const nlohmann::json& h = c.header;

  const auto kind = header_get<std::string>(h, "kind", "kind", kHeaderOffset);
  if (kind != "dataset") throw DecodeError(kHeaderOffset, "kind", "expected 'dataset', got '" + kind + "'");
  if (!h.contains("radio")) throw DecodeError(kHeaderOffset, "radio", "missing field");
  const RadioConfig radio = radio_from_json(h.at("radio"), kHeaderOffset);
  if (!h.contains("layout")) throw DecodeError(kHeaderOffset, "layout", "missing field");
  ArrayLayout layout;
  layout.ap_count = header_get<int>(h.at("layout"), "ap_count", "layout.ap_count", kHeaderOffset);
  layout.antennas_per_ap = header_get<int>(h.at("layout"), "antennas_per_ap", "layout.antennas_per_ap", kHeaderOffset);
  if (layout.ap_count < 1 || layout.antennas_per_ap < 1)
    throw DecodeError(kHeaderOffset, "layout", "counts must be >= 1");

  Dataset out;
  if (!h.contains("classes") || !h.at("classes").is_array())
    throw DecodeError(kHeaderOffset, "classes", "missing or not an array");
  for (std::size_t i = 0; i < h.at("classes").size(); ++i) {
    const auto& name = h.at("classes")[i];
    if (!name.is_string()) throw DecodeError(kHeaderOffset, "classes[" + std::to_string(i) + "]", "expected string");
    out.classes.push_back(name.get<std::string>());
  }
  if (!h.contains("trials") || !h.at("trials").is_array())
    throw DecodeError(kHeaderOffset, "trials", "missing or not an array");

  const PayloadReader reader(c);
  const auto per_frame = static_cast<std::size_t>(radio.subcarrier_count()) *
                         static_cast<std::size_t>(layout.antenna_count());
  const auto& trials = h.at("trials");
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const std::string prefix = "trials[" + std::to_string(t) + "]";
    const auto& tj = trials[t];
    const int label = header_get<int>(tj, "label", prefix + ".label", kHeaderOffset);
    const int subject = header_get<int>(tj, "subject", prefix + ".subject", kHeaderOffset);
    const auto frames = header_get<std::uint64_t>(tj, "T", prefix + ".T", kHeaderOffset);
    if (!tj.contains("offsets")) throw DecodeError(kHeaderOffset, prefix + ".offsets", "missing field");
    const auto ts_off = header_get<std::uint64_t>(tj.at("offsets"), "timestamps", prefix + ".offsets.timestamps", kHeaderOffset);
    const auto sm_off = header_get<std::uint64_t>(tj.at("offsets"), "samples", prefix + ".offsets.samples", kHeaderOffset);
    if (frames == 0 || frames > c.payload.size() / 8)
      throw DecodeError(kHeaderOffset, prefix + ".T", "frame count out of range");

    std::vector<double> timestamps(frames);
    reader.f64s(ts_off, timestamps, prefix + ".timestamps");
    const std::size_t count = frames * per_frame;
    if (count > c.payload.size() / 16)
      throw DecodeError(c.payload_offset + sm_off, prefix + ".samples", "payload truncated");
    std::vector<double> flat(2 * count);
    reader.f64s(sm_off, flat, prefix + ".samples");
    std::vector<cdouble> samples(count);
    for (std::size_t i = 0; i < count; ++i) samples[i] = {flat[2 * i], flat[2 * i + 1]};

    if (label < 0 || static_cast<std::size_t>(label) >= out.classes.size())
      throw ValidationError("load_dataset: trial " + std::to_string(t) + " label " +
                            std::to_string(label) + " outside class vocabulary");
    try {
      out.trials.push_back({CsiFrameSet(radio, layout, std::move(timestamps), std::move(samples)), label, subject});
    } catch (const ValidationError& e) {
      throw ValidationError("load_dataset: trial " + std::to_string(t) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace dorfhar
