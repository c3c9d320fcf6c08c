// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dorfhar {

struct ClassifierConfig {
  std::vector<int> hidden = {256, 128};
  double learning_rate = 1e-4;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double label_smoothing = 0.1;
  int batch_size = 64;
  int max_epochs = 2500;
  int patience = 200;
  double validation_fraction = 0.2;
  int class_count = 0;  // 0: one more than the largest label
  std::uint64_t seed = 0;

  void validate() const;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

/// Standardize -> [Dense -> ReLU]* -> Dense -> softmax.
struct ClassifierModel {
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_scale;
  std::vector<DenseLayer> layers;
  std::vector<EpochRecord> log;
  int best_epoch = 0;

  Eigen::Index input_dim() const { return layers.empty() ? 0 : layers.front().weight.cols(); }
  Eigen::Index class_count() const { return layers.empty() ? 0 : layers.back().weight.rows(); }
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases, identity
/// standardization.
ClassifierModel make_classifier(Eigen::Index input_dim, std::span<const int> hidden,
                                Eigen::Index class_count, std::uint64_t seed);

/// Class probabilities for each row of `features`.
Eigen::MatrixXd predict_batch(const ClassifierModel& model, const Eigen::MatrixXd& features);

/// Probabilities for one feature vector; throws ValidationError on a
/// dimension mismatch.
Eigen::VectorXd predict(const ClassifierModel& model, std::span<const double> feature);

struct LossGradient {
  double loss = 0.0;
  std::vector<DenseLayer> gradient;  // parallel to model.layers
};

/// Mean label-smoothed cross-entropy over the rows of `features` and its
/// gradient with respect to every layer parameter.
LossGradient loss_and_gradient(const ClassifierModel& model, const Eigen::MatrixXd& features,
                               std::span<const int> labels, double label_smoothing);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Per class, round(fraction * count) samples go to validation (none for a
/// class with a single sample). Deterministic per seed.
SplitIndices stratified_split(std::span<const int> labels, double fraction, std::uint64_t seed);

/// Trains with decoupled-weight-decay Adam on a stratified split of the
/// input, early-stops on validation loss and returns the parameters of the
/// best validation epoch. Throws ValidationError for fewer than two classes
/// or non-finite features and DivergenceError on a non-finite loss.
ClassifierModel train_classifier(const Eigen::MatrixXd& features, std::span<const int> labels,
                                 const ClassifierConfig& cfg);

void write_training_log_csv(std::ostream& out, const ClassifierModel& model);

void save_classifier(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_classifier(const std::filesystem::path& path);

}  // namespace dorfhar
