// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include "dorfhar/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dorfhar::svg {

namespace {

constexpr double kWidth = 720, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void open(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
     << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\" font-family=\"sans-serif\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape(title)
     << "</text>\n";
}

void axes(std::ostringstream& os, const std::string& x_label, const std::string& y_label) {
  const double x0 = kLeft, y0 = kHeight - kBottom;
  os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y0)
     << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(kWidth - kRight) << "\" y2=\""
     << num(y0) << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 12)
     << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << num((kTop + y0) / 2) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
     << num((kTop + y0) / 2) << ")\">" << escape(y_label) << "</text>\n";
}

}  // namespace

std::string grouped_bar_chart(const std::string& title, const std::string& y_label,
                              const std::vector<BarGroup>& groups, std::optional<double> threshold) {
  std::ostringstream os;
  open(os, title);
  axes(os, "", y_label);

  double y_max = threshold.value_or(0.0);
  std::size_t bar_count = 0;
  for (const auto& g : groups) {
    bar_count += g.bars.size();
    for (const auto& b : g.bars) y_max = std::max(y_max, std::isfinite(b.value) ? b.value : 0.0);
  }
  if (!(y_max > 0.0)) y_max = 1.0;
  y_max *= 1.1;

  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  const double slots = static_cast<double>(bar_count + (groups.empty() ? 0 : groups.size() - 1)) + 1.0;
  const double slot = plot_w / slots;
  auto ypos = [&](double v) { return kHeight - kBottom - plot_h * std::clamp(v / y_max, 0.0, 1.0); };

  for (int t = 0; t <= 4; ++t) {
    const double v = y_max * t / 4.0;
    os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(ypos(v) + 4) << "\" text-anchor=\"end\" font-size=\"10\">"
       << label_num(v) << "</text>\n";
  }

  double x = kLeft + slot * 0.5;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    const double group_start = x;
    for (std::size_t bi = 0; bi < g.bars.size(); ++bi) {
      const auto& b = g.bars[bi];
      const double top = ypos(std::isfinite(b.value) ? b.value : 0.0);
      os << "<rect x=\"" << num(x) << "\" y=\"" << num(top) << "\" width=\"" << num(slot * 0.8) << "\" height=\""
         << num(kHeight - kBottom - top) << "\" fill=\"" << (b.highlighted ? kPalette[bi % 10] : "#cccccc")
         << "\" stroke=\"black\" stroke-width=\"0.5\"><title>" << escape(g.label + " " + b.label) << ": "
         << label_num(b.value) << "</title></rect>\n";
      x += slot;
    }
    os << "<text x=\"" << num((group_start + x - slot * 0.2) / 2) << "\" y=\"" << num(kHeight - kBottom + 16)
       << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(g.label) << "</text>\n";
    x += slot;
  }
  if (threshold) {
    const double ty = ypos(*threshold);
    os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(ty) << "\" x2=\"" << num(kWidth - kRight) << "\" y2=\""
       << num(ty) << "\" stroke=\"red\" stroke-dasharray=\"6 4\"/>\n"
       << "<text x=\"" << num(kWidth - kRight) << "\" y=\"" << num(ty - 4)
       << "\" text-anchor=\"end\" font-size=\"10\" fill=\"red\">knee " << label_num(*threshold) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series, bool log_y) {
  std::ostringstream os;
  open(os, title);
  axes(os, x_label, y_label);

  auto ty = [&](double v) { return log_y ? std::log10(std::max(v, 1e-300)) : v; };
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      const double yv = ty(s.y[i]);
      if (first) {
        x_min = x_max = s.x[i];
        y_min = y_max = yv;
        first = false;
      }
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, yv);
      y_max = std::max(y_max, yv);
    }
  }
  if (x_max - x_min <= 0) x_max = x_min + 1;
  if (y_max - y_min <= 0) {
    y_max += 0.5;
    y_min -= 0.5;
  }
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + plot_w * (v - x_min) / (x_max - x_min); };
  auto py = [&](double v) { return kHeight - kBottom - plot_h * (ty(v) - y_min) / (y_max - y_min); };

  for (int t = 0; t <= 4; ++t) {
    const double v = y_min + (y_max - y_min) * t / 4.0;
    const double yy = kHeight - kBottom - plot_h * t / 4.0;
    os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(yy + 4) << "\" text-anchor=\"end\" font-size=\"10\">"
       << label_num(log_y ? std::pow(10.0, v) : v) << "</text>\n";
    const double xv = x_min + (x_max - x_min) * t / 4.0;
    os << "<text x=\"" << num(kLeft + plot_w * t / 4.0) << "\" y=\"" << num(kHeight - kBottom + 14)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << label_num(xv) << "</text>\n";
  }

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    os << "<polyline fill=\"none\" stroke=\"" << kPalette[si % 10] << "\" stroke-width=\"1.5\" points=\"";
    bool any = false;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      os << (any ? " " : "") << num(px(s.x[i])) << ',' << num(py(s.y[i]));
      any = true;
    }
    os << "\"/>\n"
       << "<text x=\"" << num(kWidth - kRight - 4) << "\" y=\"" << num(kTop + 14 * static_cast<double>(si + 1))
       << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << kPalette[si % 10] << "\">" << escape(s.name)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace dorfhar::svg
