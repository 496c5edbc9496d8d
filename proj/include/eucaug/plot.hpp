// Copyright 2026 The eucaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

// Learning-curve aggregation over seeds and a self-contained SVG line chart
// with 95% confidence bands.

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "eucaug/curve.hpp"

namespace eucaug {

struct CurveSeries {
  std::string label;
  std::vector<std::vector<CurveRecord>> seeds;
};

struct CurveBand {
  std::string label;
  std::vector<double> steps;
  std::vector<double> mean;
  std::vector<double> half_width;  // 1.96 * stderr; 0 for a single seed
  int seeds = 0;
};

// Mean over seeds at every step present in all of them, with a 1.96 * s/sqrt(n)
// band (s: sample standard deviation of the per-seed mean returns).
inline CurveBand aggregate(const CurveSeries& series) {
  if (series.seeds.empty()) throw ConfigError("series '" + series.label + "' has no curves");
  CurveBand band;
  band.label = series.label;
  band.seeds = static_cast<int>(series.seeds.size());
  std::map<std::uint64_t, std::vector<double>> by_step;
  for (const auto& curve : series.seeds) {
    for (const auto& r : curve) by_step[r.step].push_back(r.mean_return);
  }
  const double n = static_cast<double>(series.seeds.size());
  for (const auto& [step, values] : by_step) {
    if (values.size() != series.seeds.size()) continue;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double half = 0.0;
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      half = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    band.steps.push_back(static_cast<double>(step));
    band.mean.push_back(mean);
    band.half_width.push_back(half);
  }
  return band;
}

inline std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// "Nice" tick spacing covering [lo, hi] with about `count` ticks.
inline std::vector<double> nice_ticks(double lo, double hi, int count = 5) {
  if (!(hi > lo)) hi = lo + 1.0;
  const double raw = (hi - lo) / count;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) ticks.push_back(t);
  return ticks;
}

inline std::string render_svg(const std::vector<CurveBand>& bands, const std::string& title = "") {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const double width = 800;
  const double height = 480;
  const double left = 70;
  const double right = 200;
  const double top = 40;
  const double bottom = 50;
  double x_lo = 0.0;
  double x_hi = 1.0;
  double y_lo = 0.0;
  double y_hi = 1.0;
  bool any = false;
  for (const auto& b : bands) {
    for (std::size_t i = 0; i < b.steps.size(); ++i) {
      x_hi = std::max(x_hi, b.steps[i]);
      y_lo = std::min(y_lo, b.mean[i] - b.half_width[i]);
      y_hi = std::max(y_hi, b.mean[i] + b.half_width[i]);
      any = true;
    }
  }
  if (!any) y_hi = 1.0;
  const auto xt = nice_ticks(x_lo, x_hi);
  const auto yt = nice_ticks(y_lo, y_hi);
  x_hi = std::max(x_hi, xt.back());
  y_hi = std::max(y_hi, yt.back());
  y_lo = std::min(y_lo, yt.front());
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph; };
  auto num = [](double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << escape_xml(title) << "</text>\n";
  }
  for (double t : xt) {
    svg << "<line x1=\"" << px(t) << "\" y1=\"" << top << "\" x2=\"" << px(t) << "\" y2=\"" << top + ph
        << "\" stroke=\"#eeeeee\"/>\n";
    svg << "<text x=\"" << px(t) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << num(t)
        << "</text>\n";
  }
  for (double t : yt) {
    svg << "<line x1=\"" << left << "\" y1=\"" << py(t) << "\" x2=\"" << left + pw << "\" y2=\"" << py(t)
        << "\" stroke=\"#eeeeee\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << py(t) + 4 << "\" text-anchor=\"end\">" << num(t) << "</text>\n";
  }
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">step</text>\n";
  svg << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + ph / 2 << ")\">episode return</text>\n";

  for (std::size_t k = 0; k < bands.size(); ++k) {
    const CurveBand& b = bands[k];
    const char* color = kColors[k % (sizeof(kColors) / sizeof(kColors[0]))];
    const bool has_band = b.seeds > 1 && !b.steps.empty();
    if (has_band) {
      svg << "<polygon class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < b.steps.size(); ++i) {
        svg << px(b.steps[i]) << "," << py(b.mean[i] + b.half_width[i]) << " ";
      }
      for (std::size_t i = b.steps.size(); i-- > 0;) {
        svg << px(b.steps[i]) << "," << py(b.mean[i] - b.half_width[i]) << " ";
      }
      svg << "\"/>\n";
    }
    svg << "<polyline class=\"mean\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < b.steps.size(); ++i) svg << px(b.steps[i]) << "," << py(b.mean[i]) << " ";
    svg << "\"/>\n";
    const double ly = top + 16 + 20.0 * static_cast<double>(k);
    svg << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\">" << escape_xml(b.label) << " (n=" << b.seeds
        << ")</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace eucaug
