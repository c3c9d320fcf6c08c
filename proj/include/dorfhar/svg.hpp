// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#pragma once

#include <optional>
#include <string>
#include <vector>

// Minimal deterministic SVG emitters. Numbers are printed with fixed
// precision so identical inputs give byte-identical files.
namespace dorfhar::svg {

struct Bar {
  std::string label;
  double value = 0.0;
  bool highlighted = true;  // drawn filled; otherwise hatched grey
};

struct BarGroup {
  std::string label;
  std::vector<Bar> bars;
};

std::string grouped_bar_chart(const std::string& title, const std::string& y_label,
                              const std::vector<BarGroup>& groups,
                              std::optional<double> threshold = std::nullopt);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series,
                       bool log_y = false);

}  // namespace dorfhar::svg
