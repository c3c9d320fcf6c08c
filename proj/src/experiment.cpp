// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include "dorfhar/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "dorfhar/error.hpp"

namespace dorfhar {

namespace {

using nlohmann::json;

// Walks one JSON object, tracking which keys were consumed so that
// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    return convert<T>(raw(key), field(key));
  }

  template <typename T>
  T require(const std::string& key, const std::string& why = {}) {
    if (!has(key)) throw ConfigError(field(key), "missing required field '" + key + "'" + (why.empty() ? "" : " (" + why + ")"));
    return convert<T>(raw(key), field(key));
  }

  ObjectReader child(const std::string& key) { return ObjectReader(raw(key), field(key)); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
  }

  template <typename T>
  static T convert(const json& v, const std::string& f) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(f, "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(f, "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_unsigned()) throw ConfigError(f, "expected a non-negative integer");
      return v.get<std::uint64_t>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(f, "expected an integer");
      const auto x = v.get<std::int64_t>();
      if (x < std::numeric_limits<T>::min() || x > std::numeric_limits<T>::max()) throw ConfigError(f, "integer out of range");
      return static_cast<T>(x);
    } else {
      if (!v.is_number()) throw ConfigError(f, "expected a number");
      return v.get<T>();
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

RadioConfig parse_radio(ObjectReader& root) {
  if (!root.has("radio")) return RadioConfig::uthamo();
  const json& r = root.raw("radio");
  if (r.is_string()) {
    check(r.get<std::string>() == "uthamo", "radio", "unknown preset '" + r.get<std::string>() + "'");
    return RadioConfig::uthamo();
  }
  ObjectReader o(r, "radio");
  const RadioConfig d = RadioConfig::uthamo();
  const double fc = o.get("carrier_frequency_hz", d.carrier_frequency_hz());
  const double df = o.get("subcarrier_spacing_hz", d.subcarrier_spacing_hz());
  const int n = o.get("subcarrier_count", d.subcarrier_count());
  const double fs = o.get("sample_rate_hz", d.sample_rate_hz());
  const double c = o.get("propagation_speed_m_per_s", d.propagation_speed_m_per_s());
  o.finish();
  try {
    return RadioConfig(fc, df, n, fs, c);
  } catch (const ValidationError& e) {
    throw ConfigError("radio", e.what());
  }
}

SelectionSettings parse_selection(ObjectReader o, SelectionSettings s) {
  s.enabled = o.get("enabled", s.enabled);
  s.delta = o.get("delta", s.delta);
  check(s.delta > 0.0, o.field("delta"), "must be > 0");
  if (o.has("mode")) {
    const auto m = o.get<std::string>("mode", "");
    if (m == "per-trial")
      s.mode = SelectionSettings::Mode::PerTrial;
    else if (m == "calibration")
      s.mode = SelectionSettings::Mode::Calibration;
    else
      throw ConfigError(o.field("mode"), "expected 'per-trial' or 'calibration'");
  }
  o.finish();
  return s;
}

SynthSuite parse_synth(ObjectReader o) {
  SynthSuite s;
  if (o.has("classes")) {
    const json& arr = o.raw("classes");
    check(arr.is_array(), o.field("classes"), "expected an array of class names");
    s.classes.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string f = o.field("classes") + "[" + std::to_string(i) + "]";
      try {
        s.classes.push_back(gesture_from_name(ObjectReader::convert<std::string>(arr[i], f)));
      } catch (const ValidationError& e) {
        throw ConfigError(f, e.what());
      }
    }
    check(s.classes.size() >= 2, o.field("classes"), "need at least two classes");
    check(std::set<GestureClass>(s.classes.begin(), s.classes.end()).size() == s.classes.size(), o.field("classes"),
          "duplicate class");
  }
  s.trials_per_class = o.get("trials_per_class", s.trials_per_class);
  s.groups = o.get("groups", s.groups);
  check(s.groups >= 2, o.field("groups"), "need at least two groups");
  check(s.trials_per_class >= s.groups, o.field("trials_per_class"), "must be >= groups");

  SceneConfig& sc = s.scene;
  if (o.has("layout")) {
    ObjectReader l = o.child("layout");
    sc.layout.ap_count = l.get("ap_count", sc.layout.ap_count);
    sc.layout.antennas_per_ap = l.get("antennas_per_ap", sc.layout.antennas_per_ap);
    l.finish();
  }
  sc.samples = o.get("samples", sc.samples);
  sc.moving_paths = o.get("moving_paths", sc.moving_paths);
  sc.static_amplitude = o.get("static_amplitude", sc.static_amplitude);
  sc.moving_amplitude = o.get("moving_amplitude", sc.moving_amplitude);
  sc.noise_sigma = o.get("noise_sigma", sc.noise_sigma);
  sc.trajectory.jitter = o.get("jitter", sc.trajectory.jitter);
  if (o.has("ramp")) {
    ObjectReader r = o.child("ramp");
    const auto mode = r.get<std::string>("mode", "none");
    if (mode == "none")
      sc.ramp.mode = HardwareRamp::Mode::None;
    else if (mode == "fixed")
      sc.ramp.mode = HardwareRamp::Mode::Fixed;
    else if (mode == "random")
      sc.ramp.mode = HardwareRamp::Mode::Random;
    else
      throw ConfigError(r.field("mode"), "expected 'none', 'fixed' or 'random'");
    sc.ramp.slope_rad = r.get("slope_rad", sc.ramp.slope_rad);
    sc.ramp.intercept_rad = r.get("intercept_rad", sc.ramp.intercept_rad);
    r.finish();
  }
  if (o.has("corruptions")) {
    const json& arr = o.raw("corruptions");
    check(arr.is_array(), o.field("corruptions"), "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      ObjectReader c(arr[i], o.field("corruptions") + "[" + std::to_string(i) + "]");
      CorruptionSpec spec;
      spec.antenna.ap = c.require<int>("ap");
      spec.antenna.antenna = c.require<int>("antenna");
      if (c.has("model")) {
        try {
          spec.model = noise_model_from_name(c.get<std::string>("model", ""));
        } catch (const ValidationError& e) {
          throw ConfigError(c.field("model"), e.what());
        }
      }
      spec.strength = c.get("strength", spec.strength);
      check(spec.strength > 0.0, c.field("strength"), "must be > 0");
      check(sc.layout.contains(spec.antenna), c.field("ap"), "antenna outside the layout");
      c.finish();
      sc.corruptions.push_back(spec);
    }
  }
  o.finish();
  try {
    sc.validate();
  } catch (const ValidationError& e) {
    throw ConfigError("synth", e.what());
  }
  return s;
}

FitConfig parse_fit(ObjectReader o) {
  FitConfig f;
  f.mu = o.get("mu", f.mu);
  f.gamma = o.get("gamma", f.gamma);
  f.lambda_ridge = o.get("lambda_ridge", f.lambda_ridge);
  f.epsilon = o.get("epsilon", f.epsilon);
  f.max_iters = o.get("max_iters", f.max_iters);
  if (o.has("mode")) {
    const auto m = o.get<std::string>("mode", "");
    if (m == "verbatim")
      f.mode = FitMode::Verbatim;
    else if (m == "consistent")
      f.mode = FitMode::Consistent;
    else
      throw ConfigError(o.field("mode"), "expected 'verbatim' or 'consistent'");
  }
  o.finish();
  try {
    f.validate();
  } catch (const ValidationError& e) {
    throw ConfigError("fit", e.what());
  }
  return f;
}

ClassifierConfig parse_classifier(ObjectReader o) {
  ClassifierConfig c;
  if (o.has("hidden")) {
    const json& arr = o.raw("hidden");
    check(arr.is_array(), o.field("hidden"), "expected an array of layer sizes");
    c.hidden.clear();
    for (std::size_t i = 0; i < arr.size(); ++i)
      c.hidden.push_back(ObjectReader::convert<int>(arr[i], o.field("hidden") + "[" + std::to_string(i) + "]"));
  }
  c.learning_rate = o.get("learning_rate", c.learning_rate);
  c.weight_decay = o.get("weight_decay", c.weight_decay);
  c.label_smoothing = o.get("label_smoothing", c.label_smoothing);
  c.batch_size = o.get("batch_size", c.batch_size);
  c.max_epochs = o.get("max_epochs", c.max_epochs);
  c.patience = o.get("patience", c.patience);
  c.validation_fraction = o.get("validation_fraction", c.validation_fraction);
  o.finish();
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ConfigError("classifier", e.what());
  }
  return c;
}

Stage stage_from_name(const std::string& name, const std::string& field) {
  for (Stage s : kAllStages)
    if (name == stage_name(s)) return s;
  throw ConfigError(field, "unknown stage '" + name + "'");
}

std::filesystem::path normalized(const std::filesystem::path& p) {
  return std::filesystem::weakly_canonical(std::filesystem::absolute(p));
}

}  // namespace

const char* stage_name(Stage s) noexcept {
  switch (s) {
    case Stage::Synth: return "synth";
    case Stage::Preprocess: return "preprocess";
    case Stage::Doppler: return "doppler";
    case Stage::Fit: return "fit";
    case Stage::Select: return "select";
    case Stage::Features: return "features";
    case Stage::Train: return "train";
    case Stage::Eval: return "eval";
  }
  return "?";
}

bool ExperimentConfig::runs(Stage s) const { return std::find(stages.begin(), stages.end(), s) != stages.end(); }

ExperimentConfig parse_experiment_config(const json& j) {
  ObjectReader root(j, "");
  ExperimentConfig cfg;
  cfg.seed = root.require<std::uint64_t>("seed", "all randomness derives from it");
  cfg.radio = parse_radio(root);
  if (root.has("dataset")) cfg.dataset = root.get<std::string>("dataset", "");
  if (root.has("synth")) cfg.synth = parse_synth(root.child("synth"));
  check(!(cfg.dataset && root.has("synth")), "dataset", "give either 'dataset' or 'synth', not both");

  if (root.has("doppler")) {
    ObjectReader d = root.child("doppler");
    cfg.doppler.window_len = d.get("window_len", cfg.doppler.window_len);
    cfg.doppler.hop = d.get("hop", cfg.doppler.hop);
    cfg.doppler.bins_per_antenna = d.get("bins_per_antenna", cfg.doppler.bins_per_antenna);
    d.finish();
  }
  check(cfg.doppler.window_len >= 4, "doppler.window_len", "must be >= 4");
  check(cfg.doppler.hop >= 1, "doppler.hop", "must be >= 1");
  check(cfg.doppler.bins_per_antenna >= 1 && cfg.doppler.bins_per_antenna <= cfg.radio.subcarrier_count(),
        "doppler.bins_per_antenna", "must be in [1, subcarrier_count]");
  check(cfg.dataset || cfg.synth.scene.samples >= cfg.doppler.window_len, "synth.samples",
        "shorter than one Doppler window");

  if (root.has("fit")) cfg.fit = parse_fit(root.child("fit"));
  if (root.has("selection")) cfg.selection = parse_selection(root.child("selection"), cfg.selection);
  cfg.grid_m = root.get("grid_m", cfg.grid_m);
  check(cfg.grid_m >= 1, "grid_m", "must be >= 1");
  if (root.has("features")) {
    ObjectReader f = root.child("features");
    cfg.kernels = f.get("kernels", cfg.kernels);
    f.finish();
  }
  check(cfg.kernels >= 1, "features.kernels", "must be >= 1");
  if (root.has("classifier")) cfg.classifier = parse_classifier(root.child("classifier"));

  if (root.has("experiment_seeds")) {
    const json& arr = root.raw("experiment_seeds");
    check(arr.is_array() && !arr.empty(), "experiment_seeds", "expected a nonempty array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      cfg.experiment_seeds.push_back(ObjectReader::convert<std::uint64_t>(arr[i], "experiment_seeds[" + std::to_string(i) + "]"));
  } else {
    cfg.experiment_seeds = {0};
  }

  if (root.has("variants")) {
    const json& arr = root.raw("variants");
    check(arr.is_array(), "variants", "expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      ObjectReader v(arr[i], "variants[" + std::to_string(i) + "]");
      Variant var;
      var.name = v.require<std::string>("name");
      check(!var.name.empty(), v.field("name"), "must not be empty");
      check(names.insert(var.name).second, v.field("name"), "duplicate variant name '" + var.name + "'");
      var.selection = v.has("selection") ? parse_selection(v.child("selection"), cfg.selection) : cfg.selection;
      v.finish();
      cfg.variants.push_back(std::move(var));
    }
  }

  if (root.has("stages")) {
    const json& arr = root.raw("stages");
    check(arr.is_array() && !arr.empty(), "stages", "expected a nonempty array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string f = "stages[" + std::to_string(i) + "]";
      const Stage s = stage_from_name(ObjectReader::convert<std::string>(arr[i], f), f);
      check(s == kAllStages[i], f, std::string("stages must be a prefix of the pipeline order; expected '") +
                                       stage_name(kAllStages[i]) + "'");
      cfg.stages.push_back(s);
    }
  } else {
    cfg.stages.assign(std::begin(kAllStages), std::end(kAllStages));
  }

  cfg.out_dir = root.get<std::string>("out_dir", cfg.out_dir.string());
  check(!cfg.out_dir.empty(), "out_dir", "must not be empty");
  cfg.jobs = root.get("jobs", cfg.jobs);
  check(cfg.jobs >= 1, "jobs", "must be >= 1");
  root.finish();

  if (cfg.dataset) {
    check(normalized(*cfg.dataset) != normalized(cfg.out_dir), "dataset", "must differ from out_dir");
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return parse_experiment_config(j);
}

json experiment_config_to_json(const ExperimentConfig& cfg) {
  auto selection_json = [](const SelectionSettings& s) {
    return json{{"enabled", s.enabled},
                {"delta", s.delta},
                {"mode", s.mode == SelectionSettings::Mode::PerTrial ? "per-trial" : "calibration"}};
  };
  json j;
  j["seed"] = cfg.seed;
  j["radio"] = {{"carrier_frequency_hz", cfg.radio.carrier_frequency_hz()},
                {"subcarrier_spacing_hz", cfg.radio.subcarrier_spacing_hz()},
                {"subcarrier_count", cfg.radio.subcarrier_count()},
                {"sample_rate_hz", cfg.radio.sample_rate_hz()},
                {"propagation_speed_m_per_s", cfg.radio.propagation_speed_m_per_s()}};
  if (cfg.dataset) {
    j["dataset"] = cfg.dataset->generic_string();
  } else {
    const SceneConfig& sc = cfg.synth.scene;
    json classes = json::array();
    for (auto c : cfg.synth.classes) classes.push_back(gesture_name(c));
    json corruptions = json::array();
    for (const auto& c : sc.corruptions)
      corruptions.push_back(
          {{"ap", c.antenna.ap}, {"antenna", c.antenna.antenna}, {"model", noise_model_name(c.model)}, {"strength", c.strength}});
    const char* ramp = sc.ramp.mode == HardwareRamp::Mode::None    ? "none"
                       : sc.ramp.mode == HardwareRamp::Mode::Fixed ? "fixed"
                                                                   : "random";
    j["synth"] = {{"classes", classes},
                  {"trials_per_class", cfg.synth.trials_per_class},
                  {"groups", cfg.synth.groups},
                  {"layout", {{"ap_count", sc.layout.ap_count}, {"antennas_per_ap", sc.layout.antennas_per_ap}}},
                  {"samples", sc.samples},
                  {"moving_paths", sc.moving_paths},
                  {"static_amplitude", sc.static_amplitude},
                  {"moving_amplitude", sc.moving_amplitude},
                  {"noise_sigma", sc.noise_sigma},
                  {"jitter", sc.trajectory.jitter},
                  {"ramp", {{"mode", ramp}, {"slope_rad", sc.ramp.slope_rad}, {"intercept_rad", sc.ramp.intercept_rad}}},
                  {"corruptions", corruptions}};
  }
  j["doppler"] = {{"window_len", cfg.doppler.window_len}, {"hop", cfg.doppler.hop},
                  {"bins_per_antenna", cfg.doppler.bins_per_antenna}};
  j["fit"] = {{"mu", cfg.fit.mu},
              {"gamma", cfg.fit.gamma},
              {"lambda_ridge", cfg.fit.lambda_ridge},
              {"epsilon", cfg.fit.epsilon},
              {"max_iters", cfg.fit.max_iters},
              {"mode", cfg.fit.mode == FitMode::Verbatim ? "verbatim" : "consistent"}};
  j["selection"] = selection_json(cfg.selection);
  j["grid_m"] = cfg.grid_m;
  j["features"] = {{"kernels", cfg.kernels}};
  j["classifier"] = {{"hidden", cfg.classifier.hidden},
                     {"learning_rate", cfg.classifier.learning_rate},
                     {"weight_decay", cfg.classifier.weight_decay},
                     {"label_smoothing", cfg.classifier.label_smoothing},
                     {"batch_size", cfg.classifier.batch_size},
                     {"max_epochs", cfg.classifier.max_epochs},
                     {"patience", cfg.classifier.patience},
                     {"validation_fraction", cfg.classifier.validation_fraction}};
  j["experiment_seeds"] = cfg.experiment_seeds;
  json variants = json::array();
  for (const auto& v : cfg.variants) variants.push_back({{"name", v.name}, {"selection", selection_json(v.selection)}});
  j["variants"] = variants;
  json stages = json::array();
  for (auto s : cfg.stages) stages.push_back(stage_name(s));
  j["stages"] = stages;
  j["out_dir"] = cfg.out_dir.generic_string();
  // jobs is left out: it changes scheduling, never results.
  return j;
}

}  // namespace dorfhar
