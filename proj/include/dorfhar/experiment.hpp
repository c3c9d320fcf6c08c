// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dorfhar/classifier.hpp"
#include "dorfhar/doppler.hpp"
#include "dorfhar/dorf.hpp"
#include "dorfhar/radio.hpp"
#include "dorfhar/selection.hpp"
#include "dorfhar/synth.hpp"

namespace dorfhar {

struct SelectionSettings {
  enum class Mode {
    PerTrial,     // knee computed on each trial's own errors
    Calibration,  // errors averaged over the training groups of a fold first
  };
  bool enabled = true;
  double delta = kDefaultSelectionDelta;
  Mode mode = Mode::PerTrial;
};

struct Variant {
  std::string name;
  SelectionSettings selection;
};

struct SynthSuite {
  std::vector<GestureClass> classes = {GestureClass::Circle, GestureClass::LeftRight, GestureClass::UpDown,
                                       GestureClass::PushPull};
  int trials_per_class = 20;
  int groups = 5;
  SceneConfig scene;
};

enum class Stage { Synth, Preprocess, Doppler, Fit, Select, Features, Train, Eval };

inline constexpr Stage kAllStages[] = {Stage::Synth,  Stage::Preprocess, Stage::Doppler, Stage::Fit,
                                       Stage::Select, Stage::Features,   Stage::Train,   Stage::Eval};

const char* stage_name(Stage s) noexcept;

struct ExperimentConfig {
  std::uint64_t seed = 0;
  RadioConfig radio = RadioConfig::uthamo();
  // Trials come from this dataset file instead of the synthetic suite.
  // Subject ids act as the cross-validation groups.
  std::optional<std::filesystem::path> dataset;
  SynthSuite synth;
  DopplerConfig doppler;
  FitConfig fit;
  SelectionSettings selection;
  int grid_m = 8;
  int kernels = 1000;
  ClassifierConfig classifier;
  std::vector<std::uint64_t> experiment_seeds;  // defaults to {0}
  std::vector<Variant> variants;                // used by compare
  std::vector<Stage> stages;                    // prefix of kAllStages
  std::filesystem::path out_dir = "dorfhar-out";
  int jobs = 1;

  bool runs(Stage s) const;
};

/// Parses and validates an experiment description. Every problem is
/// reported as a ConfigError naming the key path; unknown keys are errors.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Canonical JSON of a parsed config, recorded in run manifests.
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);

}  // namespace dorfhar
