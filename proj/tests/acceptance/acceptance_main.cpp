// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

// Acceptance gate. Each criterion prints one PASS or FAIL line; the exit
// status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "dorfhar/classifier.hpp"
#include "dorfhar/doppler.hpp"
#include "dorfhar/dorf.hpp"
#include "dorfhar/experiment.hpp"
#include "dorfhar/kernels.hpp"
#include "dorfhar/pipeline.hpp"
#include "dorfhar/preprocess.hpp"
#include "dorfhar/selection.hpp"
#include "dorfhar/synth.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace dorfhar;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

Outcome factorization_recovery() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int converged = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd vr = gaussian(100, 3, 100 + seed) * init_directions(16, 200 + seed);
    FitConfig cfg;
    cfg.mu = cfg.gamma = cfg.lambda_ridge = 1e-6;
    cfg.epsilon = 0.01;
    cfg.max_iters = 500;
    cfg.seed = seed;
    const DorfModel m = fit_dorf(vr, cfg);
    converged += m.converged && m.loss_trace.back() < cfg.epsilon ? 1 : 0;
    worst = std::max(worst, (m.reconstruction() - vr).norm() / vr.norm());
  }
  const double elapsed = seconds_since(t0);
  return {converged == 10 && worst <= 1e-2 && elapsed <= 5.0,
          std::to_string(converged) + "/10 converged, worst residual " + fmt("%.4g", worst) + " (limit 1e-2), " +
              fmt("%.2f", elapsed) + " s (limit 5)"};
}

Outcome doppler_oracle() {
  const double bin = 100.0 / 64.0 * RadioConfig::uthamo().wavelength_m();
  int within = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Scene scene = testing::single_path_scene(testing::constant_velocity(500, 0.625), seed);
    DopplerConfig cfg;
    cfg.bins_per_antenna = 1;
    const ProjectionMatrix vr = radial_velocity_field(sanitize(gen_csi(scene, RadioConfig::uthamo())), cfg);
    for (Eigen::Index w = 0; w < vr.rows(); ++w, ++total) within += std::abs(vr.values(w, 0) - 0.625) <= bin ? 1 : 0;
  }
  const double frac = static_cast<double>(within) / total;
  return {frac >= 0.95, std::to_string(within) + "/" + std::to_string(total) + " windows within " + fmt("%.4f", bin) +
                            " m/s (" + fmt("%.1f", 100 * frac) + "%, need 95%)"};
}

Outcome corrupted_antenna_detection() {
  int excluded = 0, clean_unique = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SceneConfig cfg;
    cfg.layout = {5, 3};
    cfg.noise_sigma = 0.05;
    const AntennaId bad{static_cast<int>(seed % 5), static_cast<int>((seed / 5) % 3)};
    cfg.corruptions = {{bad, NoiseModel::AdditiveWhite, 10.0}};
    const auto p = gen_projections(make_scene(cfg, RadioConfig::uthamo(), gesture_from_index(static_cast<int>(seed % 4)), seed));
    FitConfig fc;
    fc.seed = seed;
    const auto stage_one = fit_access_points(split_by_ap(p.vr), fc, kDefaultSelectionDelta);
    const auto table = select_antennas(stage_one.errors);
    if (!table.is_selected(bad)) {
      ++excluded;
    } else if (table.selected.size() + 1 == table.errors.size()) {
      ++clean_unique;
    }
  }
  return {excluded >= 95 && clean_unique <= 10,
          "corrupted excluded in " + std::to_string(excluded) + "/100 (need 95), clean antenna unique exclusion in " +
              std::to_string(clean_unique) + " (limit 10)"};
}

Outcome knee_equivalence() {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<std::size_t> len(2, 50);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution repeat(0.2);
  int mismatches = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> e(len(rng));
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = i > 0 && repeat(rng) ? e[i - 1] : u(rng);
    std::sort(e.begin(), e.end());
    if (knee_index(e) != oracle::brute_force_knee(e)) ++mismatches;
  }
  return {mismatches == 0, std::to_string(1000 - mismatches) + "/1000 lists agree with brute force"};
}

Outcome table_direction() {
  const auto t0 = Clock::now();
  const ExperimentConfig cfg = load_experiment_config(fs::path(DORFHAR_TEST_CONFIG_DIR) / "criterion5.json");
  std::ostringstream log;
  const EvaluationResult r = evaluate(cfg, cfg.variants, log);
  const double elapsed = seconds_since(t0);
  double base = 0.0, selected = 0.0;
  for (const auto& v : r.variants) {
    // Each experiment seed counts once, whatever its fold count.
    double m = 0.0;
    for (const auto& s : v.seeds) m += s.mean_accuracy;
    m /= static_cast<double>(v.seeds.size());
    (v.variant.selection.enabled ? selected : base) = m;
  }
  const bool pass = selected - base >= 0.05 && base >= 0.45 && selected >= 0.45 && elapsed <= 900.0;
  return {pass, "selection " + fmt("%.4f", selected) + " vs no-selection " + fmt("%.4f", base) + " (gap " +
                    fmt("%.1f", 100 * (selected - base)) + " points, need 5; both need >= 0.45), " +
                    fmt("%.0f", elapsed) + " s (limit 900)"};
}

double ramp_invariance_gap() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SceneConfig cfg;
    cfg.layout = {2, 2};
    cfg.samples = 64;
    Scene plain = make_scene(cfg, RadioConfig::uthamo(), gesture_from_index(static_cast<int>(seed % 4)), seed);
    Scene ramped = plain;
    ramped.ramp.mode = HardwareRamp::Mode::Random;
    const CsiFrameSet a = sanitize(gen_csi(plain, RadioConfig::uthamo()));
    const CsiFrameSet b = sanitize(gen_csi(ramped, RadioConfig::uthamo()));
    for (std::size_t i = 0; i < a.samples().size(); ++i) {
      const double mag = std::abs(a.samples()[i]);
      if (mag > 0.0) worst = std::max(worst, std::abs(a.samples()[i] - b.samples()[i]) / mag);
    }
  }
  return worst;
}

bool permutation_invariance() {
  const SphereGrid grid = sphere_grid(8);
  const KernelBank bank = make_kernels(200, 17, 28);
  const Eigen::MatrixX3d v = gaussian(28, 3, 18);
  const auto ref = encode_field(v, grid, bank);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(grid.size()));
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 10; ++rep) {
    std::shuffle(perm.begin(), perm.end(), rng);
    SphereGrid shuffled = grid;
    for (std::size_t k = 0; k < perm.size(); ++k) shuffled.directions.col(static_cast<Eigen::Index>(k)) = grid.directions.col(perm[k]);
    if (encode_field(v, shuffled, bank) != ref) return false;

    const Eigen::MatrixXd p = project_dorf(v, grid).projections;
    std::vector<std::vector<double>> per;
    for (Eigen::Index k : perm) {
      std::vector<double> col(p.col(k).data(), p.col(k).data() + p.rows());
      per.push_back(encode_projection(col, bank));
    }
    std::vector<std::vector<double>> in_order(per.size());
    for (std::size_t k = 0; k < perm.size(); ++k) in_order[static_cast<std::size_t>(perm[k])] = per[k];
    if (pool_projections(per) != pool_projections(in_order)) return false;
  }
  return true;
}

double unit_norm_gap() {
  double worst = 0.0;
  const Eigen::MatrixXd vr = gaussian(60, 3, 46) * init_directions(14, 47) + gaussian(60, 14, 48, 0.1);
  for (int iters = 1; iters <= 40; ++iters) {
    FitConfig cfg;
    cfg.seed = 5;
    cfg.epsilon = 1e-12;
    cfg.max_iters = iters;
    const DorfModel m = fit_dorf(vr, cfg);
    for (Eigen::Index i = 0; i < m.directions.cols(); ++i) worst = std::max(worst, std::abs(m.directions.col(i).norm() - 1.0));
  }
  return worst;
}

double gradient_gap() {
  const std::vector<int> hidden = {9, 6};
  ClassifierModel model = make_classifier(7, hidden, 4, 31);
  const Eigen::MatrixXd x = gaussian(16, 7, 32);
  std::vector<int> y;
  for (int i = 0; i < 16; ++i) y.push_back(i % 4);
  const LossGradient lg = loss_and_gradient(model, x, y, 0.1);
  const double h = 1e-6;
  auto central = [&](double& p) {
    const double keep = p;
    p = keep + h;
    const double up = loss_and_gradient(model, x, y, 0.1).loss;
    p = keep - h;
    const double down = loss_and_gradient(model, x, y, 0.1).loss;
    p = keep;
    return (up - down) / (2 * h);
  };
  double worst = 0.0;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    Eigen::MatrixXd nw(model.layers[l].weight.rows(), model.layers[l].weight.cols());
    for (Eigen::Index i = 0; i < nw.size(); ++i) nw.data()[i] = central(model.layers[l].weight.data()[i]);
    Eigen::VectorXd nb(model.layers[l].bias.size());
    for (Eigen::Index i = 0; i < nb.size(); ++i) nb(i) = central(model.layers[l].bias(i));
    worst = std::max(worst, (nw - lg.gradient[l].weight).norm() / nw.norm());
    worst = std::max(worst, (nb - lg.gradient[l].bias).norm() / nb.norm());
  }
  return worst;
}

double simplex_gap() {
  const std::vector<int> hidden = {32, 16};
  const ClassifierModel model = make_classifier(20, hidden, 4, 41);
  const Eigen::MatrixXd p = predict_batch(model, gaussian(500, 20, 42, 20.0));
  double worst = std::max(0.0, -p.minCoeff());
  for (Eigen::Index i = 0; i < p.rows(); ++i) worst = std::max(worst, std::abs(p.row(i).sum() - 1.0));
  return worst;
}

Outcome invariance_suite() {
  const double ramp = ramp_invariance_gap();
  const bool perm = permutation_invariance();
  const double unit = unit_norm_gap();
  const double grad = gradient_gap();
  const double simplex = simplex_gap();
  const bool pass = ramp <= 1e-6 && perm && unit <= 1e-9 && grad <= 1e-4 && simplex <= 1e-6;
  return {pass, "ramp " + fmt("%.2e", ramp) + " (1e-6), permutation " + (perm ? "exact" : "differs") + ", unit norm " +
                    fmt("%.2e", unit) + " (1e-9), gradient " + fmt("%.2e", grad) + " (1e-4), simplex " +
                    fmt("%.2e", simplex) + " (1e-6)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "dorfhar-acceptance-determinism";
  fs::remove_all(root);
  const fs::path config = fs::path(DORFHAR_TEST_CONFIG_DIR) / "tiny.json";
  for (const char* run : {"a", "b"}) {
    const std::string cmd = std::string("\"") + DORFHAR_CLI + "\" run --config \"" + config.string() + "\" --out \"" +
                            (root / run).string() + "\" >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, std::string("run ") + run + " failed"};
  }
  std::vector<std::string> differing;
  for (const char* name : {"metrics.json", "selection.csv"}) {
    const std::string a = slurp(root / "a" / name);
    if (a.empty() || a != slurp(root / "b" / name)) differing.push_back(name);
  }
  fs::remove_all(root);
  return {differing.empty(), differing.empty() ? "metrics.json and selection.csv byte-identical across two runs"
                                               : "differs: " + differing.front()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"factorization recovery", factorization_recovery},
      {"doppler oracle", doppler_oracle},
      {"corrupted antenna detection", corrupted_antenna_detection},
      {"knee oracle equivalence", knee_equivalence},
      {"selection beats no selection on the gesture suite", table_direction},
      {"invariance suite", invariance_suite},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): " << o.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
