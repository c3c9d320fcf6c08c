// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dorfhar/error.hpp"
#include "dorfhar/experiment.hpp"
#include "dorfhar/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "experiment JSON")->required();
  cmd->add_option("--out", o.out, "output directory (overrides out_dir)");
  cmd->add_option("--seed", o.seed, "base seed (overrides seed)");
  cmd->add_option("--jobs", o.jobs, "worker threads (overrides jobs)");
}

dorfhar::ExperimentConfig load(const Overrides& o) {
  std::ifstream in(o.config);
  if (!in) throw dorfhar::ConfigError("--config", "cannot open " + o.config);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw dorfhar::ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw dorfhar::ConfigError("<root>", "expected an object");
  if (o.out) j["out_dir"] = *o.out;
  if (o.seed) j["seed"] = *o.seed;
  if (o.jobs) j["jobs"] = *o.jobs;
  return dorfhar::parse_experiment_config(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DoRF-based Wi-Fi activity recognition pipeline"};
  app.require_subcommand(1);

  Overrides run_o, compare_o, synth_o;
  auto* run = app.add_subcommand("run", "run the configured pipeline and evaluate it");
  add_common(run, run_o);
  auto* compare = app.add_subcommand("compare", "evaluate several pipeline variants side by side");
  add_common(compare, compare_o);
  auto* synth = app.add_subcommand("synth", "generate the synthetic gesture dataset");
  add_common(synth, synth_o);
  std::string dataset;
  auto* inspect = app.add_subcommand("inspect", "print a dataset summary");
  inspect->add_option("dataset", dataset, "dataset file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) return dorfhar::cmd_run(load(run_o), std::cerr);
    if (*compare) return dorfhar::cmd_compare(load(compare_o), std::cerr);
    if (*synth) return dorfhar::cmd_synth(load(synth_o), std::cerr);
    if (*inspect) return dorfhar::cmd_inspect(dataset, std::cout);
  } catch (const dorfhar::ConfigError& e) {
    std::cerr << "dorfhar: " << e.what() << "\n";
    return 2;
  } catch (const dorfhar::StageError& e) {
    std::cerr << "dorfhar: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "dorfhar: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
