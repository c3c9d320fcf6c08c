// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include "dorfhar/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "dorfhar/dataset.hpp"
#include "dorfhar/error.hpp"
#include "dorfhar/preprocess.hpp"
#include "dorfhar/svg.hpp"

namespace dorfhar {

namespace {

using nlohmann::json;

// derive_seed streams below one experiment seed.
constexpr std::uint64_t kDataStream = 0xDA7A;
constexpr std::uint64_t kKernelStream = 0x4B45524E;
constexpr std::uint64_t kFitStream = 0x10000;
constexpr std::uint64_t kClassifierStream = 0x20000;

template <typename F>
auto in_stage(Stage stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

std::uint64_t effective_seed(const ExperimentConfig& cfg, std::uint64_t experiment_seed) {
  return derive_seed(cfg.seed, experiment_seed);
}

std::vector<int> distinct_groups(const Dataset& ds) {
  std::set<int> g;
  for (const auto& t : ds.trials) g.insert(t.subject);
  return {g.begin(), g.end()};
}

SelectionTable make_table(const ErrorMap& errors, const SelectionSettings& s) {
  return s.enabled ? select_antennas(errors, s.delta) : select_all(errors, s.delta);
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

Dataset acquire_dataset(const ExperimentConfig& cfg, std::uint64_t eff_seed) {
  return in_stage(Stage::Synth, [&] {
    if (cfg.dataset) return load_dataset(*cfg.dataset);
    return generate_suite(cfg.synth, cfg.radio, derive_seed(eff_seed, kDataStream));
  });
}

// Writes files below out_dir and remembers them for the manifest.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  const std::filesystem::path& dir() const { return dir_; }

  void text(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw IoError("cannot write " + (dir_ / name).string());
    record(name, content);
  }

  void binary(const std::string& name) {
    std::ifstream in(dir_ / name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    record(name, ss.str());
  }

  void manifest(const std::string& command, const json& config) {
    json files = json::array();
    for (const auto& [name, bytes, hash] : entries_) {
      char hex[17];
      std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
      files.push_back({{"path", name}, {"bytes", bytes}, {"fnv1a64", hex}});
    }
    const json m = {{"schema_version", kMetricsSchemaVersion}, {"command", command}, {"config", config}, {"artifacts", files}};
    std::ofstream out(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
    out << m.dump(2) << "\n";
    if (!out) throw IoError("cannot write manifest.json");
  }

 private:
  void record(const std::string& name, const std::string& content) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : content) h = (h ^ c) * 0x100000001b3ULL;
    entries_.emplace_back(name, content.size(), h);
  }

  std::filesystem::path dir_;
  std::vector<std::tuple<std::string, std::size_t, std::uint64_t>> entries_;
};

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string selection_csv(const EvaluationResult& r) {
  std::ostringstream out;
  out << "variant,experiment_seed,trial,ap,antenna,error,selected\n";
  for (const auto& v : r.variants)
    for (const auto& s : v.seeds)
      for (std::size_t t = 0; t < s.trial_tables.size(); ++t)
        for (const auto& [id, err] : s.trial_tables[t].errors)
          out << v.variant.name << ',' << s.experiment_seed << ',' << t << ',' << id.ap << ',' << id.antenna << ','
              << format_g(err) << ',' << (s.trial_tables[t].is_selected(id) ? 1 : 0) << '\n';
  return out.str();
}

std::string training_log_csv(const EvaluationResult& r) {
  std::ostringstream out;
  out << "variant,experiment_seed,group,epoch,train_loss,validation_loss\n";
  for (const auto& v : r.variants)
    for (const auto& s : v.seeds)
      for (const auto& f : s.folds)
        for (const auto& e : f.model.log)
          out << v.variant.name << ',' << s.experiment_seed << ',' << f.group << ',' << e.epoch << ','
              << format_g(e.train_loss) << ',' << format_g(e.validation_loss) << '\n';
  return out.str();
}

std::string antenna_error_svg(const EvaluationResult& r) {
  // Mean error per antenna over the first seed's trials; bars are filled
  // when the antenna was selected in at least half of them.
  const VariantResult* v = &r.variants.front();
  for (const auto& cand : r.variants)
    if (cand.variant.selection.enabled) {
      v = &cand;
      break;
    }
  const auto& tables = v->seeds.front().trial_tables;
  std::map<AntennaId, double> sum;
  std::map<AntennaId, int> kept;
  double threshold = 0.0;
  for (const auto& t : tables) {
    for (const auto& [id, e] : t.errors) {
      sum[id] += e;
      kept[id] += t.is_selected(id) ? 1 : 0;
    }
    threshold += t.threshold;
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, tables.size()));
  std::vector<svg::BarGroup> groups;
  for (const auto& [id, total] : sum) {
    if (groups.empty() || groups.back().label != "AP" + std::to_string(id.ap + 1))
      groups.push_back({"AP" + std::to_string(id.ap + 1), {}});
    groups.back().bars.push_back({"A" + std::to_string(id.antenna + 1), total / n, 2 * kept[id] >= static_cast<int>(tables.size())});
  }
  std::optional<double> line;
  if (v->variant.selection.enabled) line = threshold / n;
  return svg::grouped_bar_chart("Per-antenna DoRF fitting error (" + v->variant.name + ")", "mean error", groups, line);
}

std::string velocity_svg(const EvaluationResult& r) {
  const TrialFeatures& t = r.first_seed_trials.front();
  std::vector<svg::Series> series;
  const ProjectionMatrix ap0 = t.vr.for_ap(0);
  const Eigen::MatrixXd fit = t.ap_models.front().reconstruction();
  const Eigen::Index show = std::min<Eigen::Index>(2, ap0.cols());
  for (Eigen::Index c = 0; c < show; ++c) {
    const ColumnTag& tag = ap0.columns[static_cast<std::size_t>(c)];
    const std::string name = std::to_string(tag.antenna.ap) + ":" + std::to_string(tag.antenna.antenna) + ":" +
                             std::to_string(tag.delay_bin);
    svg::Series measured{"measured " + name, ap0.window_times_s, {}};
    svg::Series fitted{"DoRF " + name, ap0.window_times_s, {}};
    for (Eigen::Index s = 0; s < ap0.rows(); ++s) {
      measured.y.push_back(ap0.values(s, c));
      fitted.y.push_back(fit(s, c));
    }
    series.push_back(std::move(measured));
    series.push_back(std::move(fitted));
  }
  return svg::line_chart("Radial velocity, trial 0, AP1", "time (s)", "v_r (m/s)", series);
}

std::string loss_svg(const EvaluationResult& r) {
  std::vector<svg::Series> series;
  for (const auto& v : r.variants) {
    const FoldResult& f = v.seeds.front().folds.front();
    svg::Series tr{v.variant.name + " train", {}, {}}, va{v.variant.name + " validation", {}, {}};
    for (const auto& e : f.model.log) {
      tr.x.push_back(e.epoch);
      tr.y.push_back(e.train_loss);
      va.x.push_back(e.epoch);
      va.y.push_back(e.validation_loss);
    }
    series.push_back(std::move(tr));
    series.push_back(std::move(va));
  }
  return svg::line_chart("Classifier loss, first fold", "epoch", "smoothed cross-entropy", series, true);
}

json variant_json(const VariantResult& v, const std::vector<std::string>& classes) {
  json per_class = json::object();
  for (std::size_t c = 0; c < classes.size(); ++c) per_class[classes[c]] = v.per_class_accuracy[c];
  json seeds = json::array();
  double selected_sum = 0.0;
  std::size_t table_count = 0;
  for (const auto& s : v.seeds) {
    json folds = json::array();
    for (const auto& f : s.folds)
      folds.push_back({{"group", f.group},
                       {"accuracy", f.accuracy},
                       {"test_trials", f.test_trials.size()},
                       {"best_epoch", f.model.best_epoch},
                       {"epochs", f.model.log.size()}});
    seeds.push_back({{"experiment_seed", s.experiment_seed}, {"mean_accuracy", s.mean_accuracy}, {"folds", folds}});
    for (const auto& t : s.trial_tables) {
      selected_sum += static_cast<double>(t.selected.size());
      ++table_count;
    }
  }
  return {{"name", v.variant.name},
          {"selection",
           {{"enabled", v.variant.selection.enabled},
            {"mode", v.variant.selection.mode == SelectionSettings::Mode::PerTrial ? "per-trial" : "calibration"}}},
          {"mean_accuracy", v.mean_accuracy},
          {"std_accuracy", v.std_accuracy},
          {"per_class_accuracy", per_class},
          {"mean_selected_antennas", table_count ? selected_sum / static_cast<double>(table_count) : 0.0},
          {"seeds", seeds}};
}

void write_evaluation(ArtifactWriter& w, const EvaluationResult& r, const std::string& command, const json& extra) {
  json metrics = {{"schema_version", kMetricsSchemaVersion}, {"command", command}, {"classes", r.classes}};
  json variants = json::array();
  for (const auto& v : r.variants) variants.push_back(variant_json(v, r.classes));
  metrics["variants"] = variants;
  metrics.update(extra);
  w.text("metrics.json", metrics.dump(2) + "\n");
  w.text("selection.csv", selection_csv(r));
  w.text("training_log.csv", training_log_csv(r));
  w.text("antenna_errors.svg", antenna_error_svg(r));
  w.text("velocity_traces.svg", velocity_svg(r));
  w.text("loss_curves.svg", loss_svg(r));
}

// Per-trial stages only; used when the configured stage list stops before
// training.
void write_partial(ArtifactWriter& w, const ExperimentConfig& cfg, std::ostream& log) {
  const std::uint64_t eff = effective_seed(cfg, cfg.experiment_seeds.front());
  const Dataset ds = acquire_dataset(cfg, eff);
  json summary = {{"schema_version", kMetricsSchemaVersion}, {"trials", ds.trials.size()}, {"classes", ds.classes}};
  const Stage last = cfg.stages.back();
  if (last == Stage::Synth) {
    w.text("metrics.json", summary.dump(2) + "\n");
    return;
  }
  const int windows = window_count(static_cast<int>(ds.trials.front().frames.time_count()), cfg.doppler);
  const FeatureContext ctx = in_stage(Stage::Features, [&] {
    return make_feature_context(cfg.grid_m, cfg.kernels, derive_seed(eff, kKernelStream), std::max(windows, 1));
  });
  std::vector<TrialFeatures> trials(ds.trials.size());
  parallel_for(trials.size(), cfg.jobs, [&](std::size_t t) {
    trials[t] = process_trial(ds.trials[t].frames, cfg, ctx, derive_seed(eff, kFitStream + t), last);
  });
  log << "processed " << trials.size() << " trials through stage '" << stage_name(last) << "'\n";
  if (last >= Stage::Select) {
    std::ostringstream csv;
    csv << "variant,experiment_seed,trial,ap,antenna,error,selected\n";
    for (std::size_t t = 0; t < trials.size(); ++t) {
      const SelectionTable tab = make_table(trials[t].errors, cfg.selection);
      for (const auto& [id, err] : tab.errors)
        csv << "run," << cfg.experiment_seeds.front() << ',' << t << ',' << id.ap << ',' << id.antenna << ','
            << format_g(err) << ',' << (tab.is_selected(id) ? 1 : 0) << '\n';
    }
    w.text("selection.csv", csv.str());
  }
  w.text("metrics.json", summary.dump(2) + "\n");
}

}  // namespace

StageError::StageError(Stage stage, const std::string& detail)
    : Error(std::string("stage '") + stage_name(stage) + "' failed: " + detail), stage_(stage), detail_(detail) {}

FeatureContext make_feature_context(int grid_m, int kernels, std::uint64_t seed, int series_length) {
  FeatureContext ctx;
  ctx.grid = sphere_grid(grid_m);
  ctx.bank = make_kernels(kernels, seed, series_length);
  ctx.zero_encoding = encode_zero_series(ctx.bank);
  return ctx;
}

int window_count(int samples, const DopplerConfig& cfg) {
  if (samples < cfg.window_len) return 0;
  return (samples - cfg.window_len) / cfg.hop + 1;
}

TrialFeatures process_trial(const CsiFrameSet& frames, const ExperimentConfig& cfg, const FeatureContext& ctx,
                            std::uint64_t fit_seed, Stage last) {
  TrialFeatures out;
  if (last < Stage::Preprocess) return out;
  const CsiFrameSet clean = in_stage(Stage::Preprocess, [&] { return sanitize(frames); });
  if (last < Stage::Doppler) return out;
  out.vr = in_stage(Stage::Doppler, [&] { return radial_velocity_field(clean, cfg.doppler); });
  if (last < Stage::Fit) return out;

  FitConfig fit = cfg.fit;
  fit.seed = fit_seed;
  const std::vector<ProjectionMatrix> per_ap = split_by_ap(out.vr);
  StageOneResult stage_one = in_stage(Stage::Fit, [&] { return fit_access_points(per_ap, fit, cfg.selection.delta); });
  out.errors = std::move(stage_one.errors);
  out.ap_models = std::move(stage_one.ap_models);
  if (last < Stage::Select) return out;

  std::set<AntennaId> all;
  for (const auto& p : out.errors) all.insert(p.first);
  const auto refits = in_stage(Stage::Select, [&] { return refit_antennas(per_ap, all, fit, ctx.grid); });
  for (const auto& [id, entry] : refits)
    if (entry.low_rank) out.low_rank.insert(id);
  if (last < Stage::Features) return out;

  in_stage(Stage::Features, [&] {
    for (const auto& [id, entry] : refits) out.encodings[id] = encode_field(entry.model.velocities, ctx.grid, ctx.bank);
  });
  return out;
}

std::vector<double> assemble_features(const TrialFeatures& trial, const std::set<AntennaId>& selected,
                                      const std::vector<double>& zero_encoding) {
  std::vector<std::vector<double>> parts;
  bool any_discarded = false;
  for (const auto& [id, enc] : trial.encodings) {
    if (selected.count(id))
      parts.push_back(enc);
    else
      any_discarded = true;
  }
  if (any_discarded) parts.push_back(zero_encoding);
  return pool_projections(parts);
}

Dataset generate_suite(const SynthSuite& suite, const RadioConfig& radio, std::uint64_t seed, std::vector<Scene>* scenes) {
  Dataset ds;
  for (auto c : suite.classes) ds.classes.emplace_back(gesture_name(c));
  const std::size_t n = suite.classes.size() * static_cast<std::size_t>(suite.trials_per_class);
  std::vector<std::optional<LabeledTrial>> trials(n);
  std::vector<Scene> made(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cls = i / static_cast<std::size_t>(suite.trials_per_class);
    const int k = static_cast<int>(i % static_cast<std::size_t>(suite.trials_per_class));
    made[i] = make_scene(suite.scene, radio, suite.classes[cls], derive_seed(seed, i));
    trials[i] = LabeledTrial{gen_csi(made[i], radio), static_cast<int>(cls), k % suite.groups};
  }
  for (auto& t : trials) ds.trials.push_back(std::move(*t));
  if (scenes) *scenes = std::move(made);
  return ds;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

EvaluationResult evaluate(const ExperimentConfig& cfg, const std::vector<Variant>& variants, std::ostream& log) {
  EvaluationResult result;
  for (const auto& v : variants) result.variants.push_back({v, {}, 0.0, 0.0, {}});

  for (std::size_t e = 0; e < cfg.experiment_seeds.size(); ++e) {
    const std::uint64_t exp_seed = cfg.experiment_seeds[e];
    const std::uint64_t eff = effective_seed(cfg, exp_seed);
    const Dataset ds = acquire_dataset(cfg, eff);
    if (ds.trials.empty()) throw StageError(Stage::Synth, "dataset has no trials");
    result.classes = ds.classes;
    const int samples = static_cast<int>(ds.trials.front().frames.time_count());
    for (std::size_t t = 0; t < ds.trials.size(); ++t)
      if (static_cast<int>(ds.trials[t].frames.time_count()) != samples)
        throw StageError(Stage::Doppler, "trial " + std::to_string(t) + " has a different length than trial 0");
    const int windows = window_count(samples, cfg.doppler);
    if (windows < 3) throw StageError(Stage::Doppler, "trials yield fewer than 3 Doppler windows");

    const FeatureContext ctx = in_stage(Stage::Features, [&] {
      return make_feature_context(cfg.grid_m, cfg.kernels, derive_seed(eff, kKernelStream), windows);
    });
    std::vector<TrialFeatures> trials(ds.trials.size());
    parallel_for(trials.size(), cfg.jobs, [&](std::size_t t) {
      try {
        trials[t] = process_trial(ds.trials[t].frames, cfg, ctx, derive_seed(eff, kFitStream + t));
      } catch (const StageError& err) {
        throw StageError(err.stage(), "trial " + std::to_string(t) + ": " + err.detail());
      }
    });
    log << "seed " << exp_seed << ": processed " << trials.size() << " trials\n";

    std::vector<int> labels;
    for (const auto& t : ds.trials) labels.push_back(t.label);
    const std::vector<int> groups = distinct_groups(ds);
    if (groups.size() < 2) throw StageError(Stage::Train, "need at least two groups for leave-one-group-out");

    for (auto& vr : result.variants) {
      SeedResult seed_result;
      seed_result.experiment_seed = exp_seed;
      seed_result.trial_tables.resize(trials.size());
      seed_result.folds.resize(groups.size());
      const SelectionSettings& sel = vr.variant.selection;

      parallel_for(groups.size(), cfg.jobs, [&](std::size_t gi) {
        const int g = groups[gi];
        std::vector<std::size_t> train, test;
        for (std::size_t t = 0; t < trials.size(); ++t) (ds.trials[t].subject == g ? test : train).push_back(t);

        // Selection for every trial of this fold.
        std::vector<SelectionTable> tables(trials.size());
        in_stage(Stage::Select, [&] {
          if (sel.mode == SelectionSettings::Mode::Calibration) {
            ErrorMap avg;
            for (auto t : train)
              for (const auto& [id, err] : trials[t].errors) avg[id] += err / static_cast<double>(train.size());
            const SelectionTable shared = make_table(avg, sel);
            for (std::size_t t = 0; t < trials.size(); ++t) {
              tables[t] = shared;
              tables[t].errors = trials[t].errors;
            }
          } else {
            for (std::size_t t = 0; t < trials.size(); ++t) tables[t] = make_table(trials[t].errors, sel);
          }
        });

        const Eigen::Index dim = static_cast<Eigen::Index>(ctx.bank.feature_dim());
        auto features_of = [&](const std::vector<std::size_t>& idx) {
          Eigen::MatrixXd x(static_cast<Eigen::Index>(idx.size()), dim);
          for (std::size_t i = 0; i < idx.size(); ++i) {
            const auto f = assemble_features(trials[idx[i]], tables[idx[i]].selected, ctx.zero_encoding);
            x.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(f.data(), dim);
          }
          return x;
        };
        const Eigen::MatrixXd x_train = in_stage(Stage::Features, [&] { return features_of(train); });
        const Eigen::MatrixXd x_test = in_stage(Stage::Features, [&] { return features_of(test); });
        std::vector<int> y_train;
        for (auto t : train) y_train.push_back(labels[t]);

        ClassifierConfig cc = cfg.classifier;
        cc.class_count = static_cast<int>(ds.classes.size());
        cc.seed = derive_seed(eff, kClassifierStream + static_cast<std::uint64_t>(gi));
        FoldResult fold;
        fold.group = g;
        fold.test_trials = test;
        fold.model = in_stage(Stage::Train, [&] { return train_classifier(x_train, y_train, cc); });
        in_stage(Stage::Eval, [&] {
          const Eigen::MatrixXd p = predict_batch(fold.model, x_test);
          int correct = 0;
          for (Eigen::Index i = 0; i < p.rows(); ++i) {
            Eigen::Index arg = 0;
            p.row(i).maxCoeff(&arg);
            fold.predictions.push_back(static_cast<int>(arg));
            correct += static_cast<int>(arg) == labels[test[static_cast<std::size_t>(i)]] ? 1 : 0;
          }
          fold.accuracy = test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size());
        });
        fold.model.layers.clear();  // only the log is reported
        for (auto t : test) seed_result.trial_tables[t] = tables[t];
        seed_result.folds[gi] = std::move(fold);
      });

      std::vector<double> accs;
      for (const auto& f : seed_result.folds) accs.push_back(f.accuracy);
      seed_result.mean_accuracy = mean(accs);
      log << "seed " << exp_seed << " variant " << vr.variant.name << ": mean accuracy " << seed_result.mean_accuracy << "\n";
      vr.seeds.push_back(std::move(seed_result));
    }
    if (e == 0) {
      result.first_seed_trials = std::move(trials);
      result.first_seed_labels = labels;
    }
  }

  for (auto& vr : result.variants) {
    std::vector<double> accs;
    std::vector<int> correct(result.classes.size(), 0), total(result.classes.size(), 0);
    for (const auto& s : vr.seeds)
      for (const auto& f : s.folds) {
        accs.push_back(f.accuracy);
        for (std::size_t i = 0; i < f.test_trials.size(); ++i) {
          // Labels are identical across seeds for a synthetic suite and a
          // fixed file alike, so the first seed's labels apply.
          const int y = result.first_seed_labels[f.test_trials[i]];
          ++total[static_cast<std::size_t>(y)];
          correct[static_cast<std::size_t>(y)] += f.predictions[i] == y ? 1 : 0;
        }
      }
    vr.mean_accuracy = mean(accs);
    vr.std_accuracy = population_std(accs);
    vr.per_class_accuracy.resize(result.classes.size());
    for (std::size_t c = 0; c < result.classes.size(); ++c)
      vr.per_class_accuracy[c] = total[c] ? static_cast<double>(correct[c]) / total[c] : 0.0;
  }
  return result;
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& log) {
  ArtifactWriter w(cfg.out_dir);
  if (!cfg.runs(Stage::Train)) {
    write_partial(w, cfg, log);
    w.manifest("run", experiment_config_to_json(cfg));
    return 0;
  }
  const Variant v{cfg.selection.enabled ? "dorf+selection" : "dorf", cfg.selection};
  const EvaluationResult r = evaluate(cfg, {v}, log);
  const VariantResult& only = r.variants.front();
  json per_class = json::object();
  for (std::size_t c = 0; c < r.classes.size(); ++c) per_class[r.classes[c]] = only.per_class_accuracy[c];
  write_evaluation(w, r, "run",
                   {{"mean_accuracy", only.mean_accuracy}, {"std_accuracy", only.std_accuracy}, {"per_class_accuracy", per_class}});
  w.manifest("run", experiment_config_to_json(cfg));
  log << "mean accuracy " << only.mean_accuracy << " +/- " << only.std_accuracy << "\n";
  return 0;
}

int cmd_compare(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.variants.size() < 2) throw ConfigError("variants", "compare needs at least two variants");
  if (!cfg.runs(Stage::Eval)) throw ConfigError("stages", "compare needs every stage through 'eval'");
  ArtifactWriter w(cfg.out_dir);
  const EvaluationResult r = evaluate(cfg, cfg.variants, log);
  std::ostringstream csv;
  csv << "variant,mean_accuracy,std_accuracy\n";
  json rows = json::array();
  for (const auto& v : r.variants) {
    csv << v.variant.name << ',' << format_g(v.mean_accuracy) << ',' << format_g(v.std_accuracy) << '\n';
    rows.push_back({{"variant", v.variant.name}, {"mean_accuracy", v.mean_accuracy}, {"std_accuracy", v.std_accuracy}});
    log << v.variant.name << ": " << v.mean_accuracy << " +/- " << v.std_accuracy << "\n";
  }
  write_evaluation(w, r, "compare", {{"comparison", rows}});
  w.text("comparison.csv", csv.str());
  w.text("comparison.json", json{{"schema_version", kMetricsSchemaVersion}, {"rows", rows}}.dump(2) + "\n");
  w.manifest("compare", experiment_config_to_json(cfg));
  return 0;
}

int cmd_synth(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.dataset) throw ConfigError("dataset", "synth generates data; remove 'dataset' from the config");
  ArtifactWriter w(cfg.out_dir);
  std::vector<Scene> scenes;
  const Dataset ds = in_stage(Stage::Synth, [&] {
    return generate_suite(cfg.synth, cfg.radio, derive_seed(effective_seed(cfg, cfg.experiment_seeds.front()), kDataStream),
                          &scenes);
  });
  in_stage(Stage::Synth, [&] { save_dataset(ds, w.dir() / "dataset.dorfhar"); });
  w.binary("dataset.dorfhar");
  json js = json::array();
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    json s = scene_to_json(scenes[i]);
    s["trial"] = i;
    s["label"] = ds.trials[i].label;
    s["subject"] = ds.trials[i].subject;
    js.push_back(std::move(s));
  }
  w.text("scenes.json", js.dump(2) + "\n");
  w.manifest("synth", experiment_config_to_json(cfg));
  log << "wrote " << ds.trials.size() << " trials to " << (w.dir() / "dataset.dorfhar").string() << "\n";
  return 0;
}

int cmd_inspect(const std::filesystem::path& path, std::ostream& out) {
  const Dataset ds = load_dataset(path);
  const auto& first = ds.trials.front().frames;
  const RadioConfig& r = first.radio();
  out << "dataset      " << path.string() << "\n";
  out << "trials       " << ds.trials.size() << "\n";
  out << "radio        f_c=" << r.carrier_frequency_hz() << " Hz, spacing=" << r.subcarrier_spacing_hz()
      << " Hz, N=" << r.subcarrier_count() << ", fs=" << r.sample_rate_hz() << " Hz\n";
  out << "layout       " << first.layout().ap_count << " APs x " << first.layout().antennas_per_ap << " antennas\n";
  std::size_t tmin = first.time_count(), tmax = tmin;
  std::map<int, int> per_label, per_subject;
  for (const auto& t : ds.trials) {
    tmin = std::min(tmin, t.frames.time_count());
    tmax = std::max(tmax, t.frames.time_count());
    ++per_label[t.label];
    ++per_subject[t.subject];
  }
  out << "frames       " << tmin << (tmin == tmax ? "" : ".." + std::to_string(tmax)) << " per trial\n";
  out << "classes\n";
  for (const auto& [label, count] : per_label) out << "  " << label << " " << ds.classes[static_cast<std::size_t>(label)] << ": " << count << "\n";
  out << "subjects\n";
  for (const auto& [subject, count] : per_subject) out << "  " << subject << ": " << count << "\n";
  return 0;
}

}  // namespace dorfhar
