// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dorfhar/csi.hpp"
#include "dorfhar/error.hpp"
#include "dorfhar/experiment.hpp"
#include "dorfhar/kernels.hpp"

namespace dorfhar {

inline constexpr const char* kMetricsSchemaVersion = "1.0";

// A pipeline stage failed. what() reads "stage '<name>' failed: <detail>".
class StageError : public Error {
 public:
  StageError(Stage stage, const std::string& detail);
  Stage stage() const noexcept { return stage_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Stage stage_;
  std::string detail_;
};

/// Grid, kernel bank and the encoding of an all-zero field shared by all
/// trials of one experiment seed.
struct FeatureContext {
  SphereGrid grid;
  KernelBank bank;
  std::vector<double> zero_encoding;
};

FeatureContext make_feature_context(int grid_m, int kernels, std::uint64_t seed, int series_length);

/// Everything the evaluation needs from one trial. Every antenna is refit
/// and encoded, so any selected set can be assembled afterwards: max
/// pooling over the selected encodings plus the zero encoding equals
/// encode_trial for that set.
struct TrialFeatures {
  ProjectionMatrix vr;
  ErrorMap errors;
  std::vector<DorfModel> ap_models;
  std::map<AntennaId, std::vector<double>> encodings;
  std::set<AntennaId> low_rank;
};

/// Number of Doppler windows produced for a trial of `samples` frames.
int window_count(int samples, const DopplerConfig& cfg);

/// Runs the per-trial stages up to and including `last`.
TrialFeatures process_trial(const CsiFrameSet& frames, const ExperimentConfig& cfg, const FeatureContext& ctx,
                            std::uint64_t fit_seed, Stage last = Stage::Features);

/// f_s for the given selected set.
std::vector<double> assemble_features(const TrialFeatures& trial, const std::set<AntennaId>& selected,
                                      const std::vector<double>& zero_encoding);

/// Synthetic gesture suite: trials_per_class trials of every class, trial
/// k of a class assigned to group k mod groups (stored as the subject).
Dataset generate_suite(const SynthSuite& suite, const RadioConfig& radio, std::uint64_t seed,
                       std::vector<Scene>* scenes = nullptr);

/// Calls fn(i) for i in [0, n) on up to `jobs` threads. If any call
/// throws, the exception of the lowest index is rethrown after all finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

struct FoldResult {
  int group = 0;
  double accuracy = 0.0;
  std::vector<std::size_t> test_trials;
  std::vector<int> predictions;
  ClassifierModel model;  // weights dropped after evaluation; log kept
};

struct SeedResult {
  std::uint64_t experiment_seed = 0;
  std::vector<FoldResult> folds;
  // Selection table applied to each trial when it was in the test fold.
  std::vector<SelectionTable> trial_tables;
  double mean_accuracy = 0.0;
};

struct VariantResult {
  Variant variant;
  std::vector<SeedResult> seeds;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population std over all (seed, fold) pairs
  std::vector<double> per_class_accuracy;
};

struct EvaluationResult {
  std::vector<std::string> classes;
  std::vector<VariantResult> variants;
  // First experiment seed, for plots.
  std::vector<TrialFeatures> first_seed_trials;
  std::vector<int> first_seed_labels;
};

/// Leave-one-group-out evaluation of every variant over the configured
/// experiment seeds. Progress lines go to `log`.
EvaluationResult evaluate(const ExperimentConfig& cfg, const std::vector<Variant>& variants, std::ostream& log);

/// Commands. They return the process exit code and throw ConfigError or
/// StageError for the front-end to map onto exit codes 2 and 1.
int cmd_run(const ExperimentConfig& cfg, std::ostream& log);
int cmd_compare(const ExperimentConfig& cfg, std::ostream& log);
int cmd_synth(const ExperimentConfig& cfg, std::ostream& log);
int cmd_inspect(const std::filesystem::path& dataset, std::ostream& out);

}  // namespace dorfhar
