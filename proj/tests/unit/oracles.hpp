// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

// Slow, obviously-correct reference implementations. None of these call
// into the library; they exist so that tests compare against an
// independent computation instead of re-running the code under test.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;

// x_i = (1/N) sum_n X_n e^{+j 2 pi n i / N}, one term at a time.
inline std::vector<cd> naive_idft(const std::vector<cd>& in) {
  const std::size_t n = in.size();
  std::vector<cd> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    cd acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double arg = 2.0 * std::numbers::pi * static_cast<double>(k * i % n) / static_cast<double>(n);
      acc += in[k] * cd(std::cos(arg), std::sin(arg));
    }
    out[i] = acc / static_cast<double>(n);
  }
  return out;
}

// Adds the multiple of 2 pi that brings each step into (-pi, pi].
inline std::vector<double> unwrap(const std::vector<double>& p) {
  std::vector<double> out(p.size());
  if (p.empty()) return out;
  out[0] = p[0];
  for (std::size_t i = 1; i < p.size(); ++i) {
    double step = p[i] - p[i - 1];
    while (step > std::numbers::pi) step -= 2.0 * std::numbers::pi;
    while (step <= -std::numbers::pi) step += 2.0 * std::numbers::pi;
    out[i] = out[i - 1] + step;
  }
  return out;
}

// Triangle-method distance of every point, then a first-maximum scan.
inline std::size_t brute_force_knee(const std::vector<double>& e) {
  const std::size_t m = e.size();
  std::vector<double> d(m);
  const double ax = 1.0, ay = e.front();
  const double bx = static_cast<double>(m), by = e.back();
  const double ux = bx - ax, uy = by - ay;
  for (std::size_t i = 0; i < m; ++i) {
    const double px = static_cast<double>(i + 1), py = e[i];
    d[i] = std::abs(ux * (py - ay) - uy * (px - ax)) / std::hypot(ux, uy);
  }
  // Distances within rounding of the maximum tie; the first one wins.
  const double dmax = *std::max_element(d.begin(), d.end());
  const double tol = 1e-12 * std::abs(ux * uy) / std::hypot(ux, uy);
  std::size_t best = 0;
  while (d[best] < dmax - tol) ++best;
  return best + 1;
}

// argmin_X |A X - B|_F^2 + ridge |X|_F^2 through a QR solve of the stacked
// system [A; sqrt(ridge) I] X = [B; 0].
inline Eigen::MatrixXd ridge_least_squares(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double ridge) {
  Eigen::MatrixXd stacked_a(a.rows() + a.cols(), a.cols());
  stacked_a << a, std::sqrt(ridge) * Eigen::MatrixXd::Identity(a.cols(), a.cols());
  Eigen::MatrixXd stacked_b(b.rows() + a.cols(), b.cols());
  stacked_b << b, Eigen::MatrixXd::Zero(a.cols(), b.cols());
  return stacked_a.colPivHouseholderQr().solve(stacked_b);
}

// Zero-padded dilated convolution written straight from the definition:
// output t takes taps at positions t - pad + j * dilation.
inline std::vector<double> dilated_convolution(const std::vector<double>& x, const std::vector<double>& w,
                                               int dilation, bool padding) {
  const int n = static_cast<int>(x.size());
  const int span = (static_cast<int>(w.size()) - 1) * dilation + 1;
  const int pad = padding ? (span - 1) / 2 : 0;
  std::vector<double> padded(static_cast<std::size_t>(n + 2 * pad), 0.0);
  for (int i = 0; i < n; ++i) padded[static_cast<std::size_t>(i + pad)] = x[static_cast<std::size_t>(i)];
  std::vector<double> out;
  for (int t = 0; t + span <= static_cast<int>(padded.size()); ++t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * padded[static_cast<std::size_t>(t) + j * static_cast<std::size_t>(dilation)];
    out.push_back(acc);
  }
  return out;
}

}  // namespace oracle
