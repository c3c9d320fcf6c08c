// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include "dorfhar/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <set>

#include "dorfhar/container.hpp"
#include "dorfhar/csi.hpp"
#include "dorfhar/error.hpp"

namespace dorfhar {

namespace {

Eigen::MatrixXd standardize(const ClassifierModel& model, const Eigen::MatrixXd& features) {
  return (features.rowwise() - model.feature_mean.transpose()).array().rowwise() /
         model.feature_scale.transpose().array();
}

// Column-wise softmax of logits (classes x batch).
Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p = logits.rowwise() - logits.colwise().maxCoeff();
  p = p.array().exp();
  p.array().rowwise() /= p.colwise().sum().array();
  return p;
}

// Forward pass on standardized inputs laid out features x batch. Returns
// the post-activation of every layer (input first, logits last).
std::vector<Eigen::MatrixXd> forward(const ClassifierModel& model, const Eigen::MatrixXd& inputs) {
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(model.layers.size() + 1);
  acts.push_back(inputs);
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    Eigen::MatrixXd z = model.layers[l].weight * acts.back();
    z.colwise() += model.layers[l].bias;
    if (l + 1 < model.layers.size()) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }
  return acts;
}

Eigen::MatrixXd smoothed_targets(std::span<const int> labels, Eigen::Index classes, double alpha) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Constant(classes, static_cast<Eigen::Index>(labels.size()),
                                                alpha / static_cast<double>(classes));
  for (std::size_t i = 0; i < labels.size(); ++i) y(labels[i], static_cast<Eigen::Index>(i)) += 1.0 - alpha;
  return y;
}

double cross_entropy(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& targets) {
  const Eigen::RowVectorXd mx = logits.colwise().maxCoeff();
  const Eigen::MatrixXd shifted = logits.rowwise() - mx;
  const Eigen::RowVectorXd lse = shifted.array().exp().colwise().sum().log();
  const Eigen::MatrixXd log_p = shifted.rowwise() - lse;
  return -(targets.array() * log_p.array()).sum() / static_cast<double>(logits.cols());
}

LossGradient backprop(const ClassifierModel& model, const Eigen::MatrixXd& inputs, std::span<const int> labels,
                      double alpha) {
  const auto acts = forward(model, inputs);
  const Eigen::MatrixXd targets = smoothed_targets(labels, model.class_count(), alpha);
  LossGradient out;
  out.loss = cross_entropy(acts.back(), targets);
  out.gradient.resize(model.layers.size());
  Eigen::MatrixXd delta = (softmax_columns(acts.back()) - targets) / static_cast<double>(inputs.cols());
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    out.gradient[l].weight = delta * acts[l].transpose();
    out.gradient[l].bias = delta.rowwise().sum();
    if (l > 0) {
      delta = model.layers[l].weight.transpose() * delta;
      delta = (acts[l].array() > 0.0).select(delta, 0.0);
    }
  }
  return out;
}

void check_labels(std::span<const int> labels, Eigen::Index classes) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] < 0 || labels[i] >= classes)
      throw ValidationError("classifier: label " + std::to_string(labels[i]) + " at row " + std::to_string(i) +
                            " outside [0, " + std::to_string(classes) + ")");
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

struct AdamState {
  std::vector<DenseLayer> m, v;
  long step = 0;
};

void adamw_step(ClassifierModel& model, const std::vector<DenseLayer>& grad, AdamState& st,
                const ClassifierConfig& cfg) {
  ++st.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.step));
  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    p *= 1.0 - cfg.learning_rate * cfg.weight_decay;
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    p.array() -= cfg.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.adam_epsilon);
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    update(model.layers[l].weight, grad[l].weight, st.m[l].weight, st.v[l].weight);
    update(model.layers[l].bias, grad[l].bias, st.m[l].bias, st.v[l].bias);
  }
}

}  // namespace

void ClassifierConfig::validate() const {
  for (int h : hidden)
    if (h < 1) throw ValidationError("ClassifierConfig: hidden sizes must be >= 1");
  if (!(learning_rate > 0.0)) throw ValidationError("ClassifierConfig: learning_rate must be > 0");
  if (!(weight_decay >= 0.0)) throw ValidationError("ClassifierConfig: weight_decay must be >= 0");
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0))
    throw ValidationError("ClassifierConfig: label_smoothing must be in [0, 1)");
  if (batch_size < 1) throw ValidationError("ClassifierConfig: batch_size must be >= 1");
  if (max_epochs < 1) throw ValidationError("ClassifierConfig: max_epochs must be >= 1");
  if (patience < 1) throw ValidationError("ClassifierConfig: patience must be >= 1");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
    throw ValidationError("ClassifierConfig: validation_fraction must be in [0, 1)");
}

ClassifierModel make_classifier(Eigen::Index input_dim, std::span<const int> hidden, Eigen::Index class_count,
                                std::uint64_t seed) {
  if (input_dim < 1 || class_count < 2) throw ValidationError("make_classifier: need input_dim >= 1 and >= 2 classes");
  std::mt19937_64 rng(seed);
  ClassifierModel model;
  model.feature_mean = Eigen::VectorXd::Zero(input_dim);
  model.feature_scale = Eigen::VectorXd::Ones(input_dim);
  std::vector<Eigen::Index> dims = {input_dim};
  for (int h : hidden) dims.push_back(h);
  dims.push_back(class_count);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    std::uniform_real_distribution<double> u(-bound, bound);
    DenseLayer layer;
    layer.weight.resize(dims[l + 1], dims[l]);
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = u(rng);
    layer.bias.resize(dims[l + 1]);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = u(rng);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

Eigen::MatrixXd predict_batch(const ClassifierModel& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.input_dim())
    throw ValidationError("predict: feature dimension " + std::to_string(features.cols()) + " != model input " +
                          std::to_string(model.input_dim()));
  const auto acts = forward(model, standardize(model, features).transpose());
  return softmax_columns(acts.back()).transpose();
}

Eigen::VectorXd predict(const ClassifierModel& model, std::span<const double> feature) {
  if (static_cast<Eigen::Index>(feature.size()) != model.input_dim())
    throw ValidationError("predict: feature dimension " + std::to_string(feature.size()) + " != model input " +
                          std::to_string(model.input_dim()));
  Eigen::MatrixXd row(1, model.input_dim());
  for (Eigen::Index i = 0; i < row.cols(); ++i) row(0, i) = feature[static_cast<std::size_t>(i)];
  return predict_batch(model, row).row(0).transpose();
}

LossGradient loss_and_gradient(const ClassifierModel& model, const Eigen::MatrixXd& features,
                               std::span<const int> labels, double label_smoothing) {
  if (features.cols() != model.input_dim()) throw ValidationError("loss_and_gradient: dimension mismatch");
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw ValidationError("loss_and_gradient: feature rows and labels differ");
  check_labels(labels, model.class_count());
  return backprop(model, standardize(model, features).transpose(), labels, label_smoothing);
}

SplitIndices stratified_split(std::span<const int> labels, double fraction, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::set<int> classes(labels.begin(), labels.end());
  SplitIndices out;
  for (int c : classes) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) members.push_back(i);
    std::shuffle(members.begin(), members.end(), rng);
    std::size_t n_val = members.size() > 1 ? static_cast<std::size_t>(std::lround(fraction * static_cast<double>(members.size()))) : 0;
    n_val = std::min(n_val, members.size() - 1);
    out.validation.insert(out.validation.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_val));
    out.train.insert(out.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_val), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  return out;
}

ClassifierModel train_classifier(const Eigen::MatrixXd& features, std::span<const int> labels,
                                 const ClassifierConfig& cfg) {
  cfg.validate();
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw ValidationError("train_classifier: " + std::to_string(features.rows()) + " feature rows but " +
                          std::to_string(labels.size()) + " labels");
  if (!features.allFinite()) throw ValidationError("train_classifier: features contain non-finite values");
  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw ValidationError("train_classifier: need at least two classes");
  const Eigen::Index classes =
      cfg.class_count > 0 ? cfg.class_count : static_cast<Eigen::Index>(*distinct.rbegin()) + 1;
  check_labels(labels, classes);

  const SplitIndices split = stratified_split(labels, cfg.validation_fraction, derive_seed(cfg.seed, 1));
  const Eigen::MatrixXd x_train = gather_rows(features, split.train);
  const Eigen::MatrixXd x_val = gather_rows(features, split.validation);
  std::vector<int> y_train, y_val;
  for (auto i : split.train) y_train.push_back(labels[i]);
  for (auto i : split.validation) y_val.push_back(labels[i]);

  ClassifierModel model = make_classifier(features.cols(), cfg.hidden, classes, cfg.seed);
  model.feature_mean = x_train.colwise().mean().transpose();
  const Eigen::RowVectorXd var =
      (x_train.rowwise() - model.feature_mean.transpose()).array().square().colwise().mean();
  model.feature_scale = var.transpose().array().sqrt();
  for (Eigen::Index i = 0; i < model.feature_scale.size(); ++i)
    if (!(model.feature_scale(i) > 1e-12)) model.feature_scale(i) = 1.0;

  // Inputs are standardized once; layout is features x samples.
  const Eigen::MatrixXd train_in = standardize(model, x_train).transpose();
  const Eigen::MatrixXd val_in = x_val.rows() > 0 ? Eigen::MatrixXd(standardize(model, x_val).transpose())
                                                  : Eigen::MatrixXd();

  AdamState adam;
  for (const auto& layer : model.layers) {
    adam.m.push_back({Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()), Eigen::VectorXd::Zero(layer.bias.size())});
    adam.v.push_back(adam.m.back());
  }

  std::mt19937_64 shuffle_rng(cfg.seed ^ 0xA5A5A5A5A5A5A5A5ULL);
  std::vector<std::size_t> order(split.train.size());
  std::iota(order.begin(), order.end(), 0);
  const Eigen::MatrixXd val_targets =
      y_val.empty() ? Eigen::MatrixXd() : smoothed_targets(y_val, classes, cfg.label_smoothing);

  ClassifierModel best = model;
  double best_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;
  Eigen::MatrixXd batch_in;
  std::vector<int> batch_y;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch_in.resize(train_in.rows(), static_cast<Eigen::Index>(stop - start));
      batch_y.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch_in.col(static_cast<Eigen::Index>(i - start)) = train_in.col(static_cast<Eigen::Index>(order[i]));
        batch_y.push_back(y_train[order[i]]);
      }
      const LossGradient lg = backprop(model, batch_in, batch_y, cfg.label_smoothing);
      if (!std::isfinite(lg.loss)) throw DivergenceError("train_classifier: non-finite loss at epoch " + std::to_string(epoch));
      loss_sum += lg.loss * static_cast<double>(stop - start);
      adamw_step(model, lg.gradient, adam, cfg);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.validation_loss = y_val.empty() ? rec.train_loss : cross_entropy(forward(model, val_in).back(), val_targets);
    if (!std::isfinite(rec.validation_loss))
      throw DivergenceError("train_classifier: non-finite validation loss at epoch " + std::to_string(epoch));
    model.log.push_back(rec);

    if (rec.validation_loss < best_loss) {
      best_loss = rec.validation_loss;
      best.layers = model.layers;
      best.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  best.feature_mean = model.feature_mean;
  best.feature_scale = model.feature_scale;
  best.log = std::move(model.log);
  return best;
}

void write_training_log_csv(std::ostream& out, const ClassifierModel& model) {
  out << "epoch,train_loss,validation_loss\n";
  char buf[96];
  for (const auto& r : model.log) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", r.epoch, r.train_loss, r.validation_loss);
    out << buf;
  }
}

void save_classifier(const ClassifierModel& model, const std::filesystem::path& path) {
  PayloadWriter w;
  nlohmann::json layers = nlohmann::json::array();
  w.put_f64s({model.feature_mean.data(), static_cast<std::size_t>(model.feature_mean.size())});
  w.put_f64s({model.feature_scale.data(), static_cast<std::size_t>(model.feature_scale.size())});
  for (const auto& l : model.layers) {
    const std::uint64_t off = w.size();
    // Column-major, as Eigen stores it.
    w.put_f64s({l.weight.data(), static_cast<std::size_t>(l.weight.size())});
    w.put_f64s({l.bias.data(), static_cast<std::size_t>(l.bias.size())});
    layers.push_back({{"in", l.weight.cols()}, {"out", l.weight.rows()}, {"offset", off}});
  }
  nlohmann::json log = nlohmann::json::array();
  for (const auto& r : model.log) log.push_back({r.epoch, r.train_loss, r.validation_loss});
  nlohmann::json header = {{"version", kContainerVersion}, {"kind", "classifier"}, {"input_dim", model.input_dim()},
                           {"layers", layers},           {"best_epoch", model.best_epoch}, {"log", log}};
  write_container(path, header, w.bytes());
}

ClassifierModel load_classifier(const std::filesystem::path& path) {
  constexpr std::uint64_t kHeaderOffset = 16;
  const Container c = read_container(path);
  if (header_get<std::string>(c.header, "kind", "kind", kHeaderOffset) != "classifier")
    throw DecodeError(kHeaderOffset, "kind", "expected 'classifier'");
  const PayloadReader reader(c);
  ClassifierModel m;
  const auto d = header_get<std::int64_t>(c.header, "input_dim", "input_dim", kHeaderOffset);
  if (d < 1 || d > (1 << 24)) throw DecodeError(kHeaderOffset, "input_dim", "out of range");
  m.feature_mean.resize(d);
  m.feature_scale.resize(d);
  reader.f64s(0, {m.feature_mean.data(), static_cast<std::size_t>(d)}, "feature_mean");
  reader.f64s(8 * static_cast<std::uint64_t>(d), {m.feature_scale.data(), static_cast<std::size_t>(d)}, "feature_scale");
  if (!c.header.contains("layers") || !c.header.at("layers").is_array())
    throw DecodeError(kHeaderOffset, "layers", "missing or not an array");
  for (std::size_t i = 0; i < c.header.at("layers").size(); ++i) {
    const auto& lj = c.header.at("layers")[i];
    const std::string f = "layers[" + std::to_string(i) + "]";
    const auto in = header_get<std::int64_t>(lj, "in", f + ".in", kHeaderOffset);
    const auto out = header_get<std::int64_t>(lj, "out", f + ".out", kHeaderOffset);
    const auto off = header_get<std::uint64_t>(lj, "offset", f + ".offset", kHeaderOffset);
    if (in < 1 || out < 1 || in > (1 << 24) || out > (1 << 24)) throw DecodeError(kHeaderOffset, f, "bad dims");
    DenseLayer l;
    l.weight.resize(out, in);
    l.bias.resize(out);
    reader.f64s(off, {l.weight.data(), static_cast<std::size_t>(l.weight.size())}, f + ".weight");
    reader.f64s(off + 8 * static_cast<std::uint64_t>(l.weight.size()), {l.bias.data(), static_cast<std::size_t>(out)},
                f + ".bias");
    m.layers.push_back(std::move(l));
  }
  m.best_epoch = header_get<int>(c.header, "best_epoch", "best_epoch", kHeaderOffset);
  if (c.header.contains("log"))
    for (const auto& r : c.header.at("log")) m.log.push_back({r.at(0).get<int>(), r.at(1).get<double>(), r.at(2).get<double>()});
  return m;
}

}  // namespace dorfhar
