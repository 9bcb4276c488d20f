// Copyright 2026 The dsre Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dsre/plot.h"

#include <algorithm>

#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace dsre {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string Escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::string PrCurveCsv(const PrCurve& curve) {
  std::string out = "recall,precision\n";
  for (const PrPoint& p : curve.points) {
    absl::StrAppend(&out, absl::StrFormat("%.10g,%.10g\n", p.recall, p.precision));
  }
  return out;
}

absl::StatusOr<PrCurve> ParsePrCurveCsv(const std::string& text) {
  PrCurve curve;
  int line_no = 0;
  double previous_recall = 0.0;
  for (absl::string_view line : absl::StrSplit(text, '\n', absl::SkipEmpty())) {
    if (absl::StartsWith(line, "#")) continue;
    ++line_no;
    if (line_no == 1) {
      if (absl::StripAsciiWhitespace(line) != "recall,precision") {
        return absl::InvalidArgumentError("curve file lacks the recall,precision header");
      }
      continue;
    }
    std::vector<absl::string_view> cells = absl::StrSplit(line, ',');
    PrPoint p;
    if (cells.size() != 2 || !absl::SimpleAtod(cells[0], &p.recall) ||
        !absl::SimpleAtod(cells[1], &p.precision)) {
      return absl::InvalidArgumentError(
          absl::StrCat("curve file line ", line_no, ": expected two numbers"));
    }
    curve.auc += p.precision * (p.recall - previous_recall);
    previous_recall = p.recall;
    curve.points.push_back(p);
  }
  return curve;
}

std::string PrCurveSvg(const std::vector<LabeledCurve>& curves) {
  constexpr double kWidth = 480, kHeight = 360, kLeft = 56, kBottom = 44,
                   kTop = 16, kRight = 16;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  double max_recall = 0.0;
  for (const LabeledCurve& c : curves) {
    for (const PrPoint& p : c.curve.points) max_recall = std::max(max_recall, p.recall);
  }
  if (max_recall <= 0.0) max_recall = 1.0;
  auto x = [&](double recall) { return kLeft + plot_w * recall / max_recall; };
  auto y = [&](double precision) { return kTop + plot_h * (1.0 - precision); };

  std::string svg = absl::StrFormat(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n",
      static_cast<int>(kWidth), static_cast<int>(kHeight));
  absl::StrAppend(&svg, absl::StrFormat(
      "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
      "stroke=\"black\"/>\n", kLeft, kTop, plot_w, plot_h));
  for (int i = 0; i <= 5; ++i) {
    const double f = i / 5.0;
    absl::StrAppend(&svg, absl::StrFormat(
        "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.2f</text>\n",
        x(f * max_recall), kHeight - kBottom + 14, f * max_recall));
    absl::StrAppend(&svg, absl::StrFormat(
        "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.1f</text>\n",
        kLeft - 4, y(f) + 4, f));
  }
  absl::StrAppend(&svg, absl::StrFormat(
      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">Recall</text>\n"
      "<text x=\"14\" y=\"%.1f\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 14 %.1f)\">Precision</text>\n",
      kLeft + plot_w / 2, kHeight - 8, kTop + plot_h / 2, kTop + plot_h / 2));
  for (size_t i = 0; i < curves.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    std::string points;
    for (const PrPoint& p : curves[i].curve.points) {
      absl::StrAppend(&points, absl::StrFormat("%.2f,%.2f ", x(p.recall), y(p.precision)));
    }
    absl::StrAppend(&svg, absl::StrFormat(
        "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\" "
        "points=\"%s\"/>\n", color, points));
    const double ly = kTop + 14 + 14 * static_cast<double>(i);
    absl::StrAppend(&svg, absl::StrFormat(
        "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
        "stroke-width=\"2\"/>\n<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">"
        "%s (AUC %.3f)</text>\n",
        kWidth - kRight - 24, ly - 4, kWidth - kRight - 8, ly - 4, color,
        kWidth - kRight - 28, ly, Escape(curves[i].label), curves[i].curve.auc));
  }
  svg += "</svg>\n";
  return svg;
}

std::string AttentionHeatmapSvg(const AttentionTable& table) {
  constexpr double kCell = 56, kHeight = 64, kMargin = 8;
  double max_weight = 0.0;
  for (const AttentionEntry& e : table.entries) max_weight = std::max(max_weight, e.weight);
  if (max_weight <= 0.0) max_weight = 1.0;
  const double width = 2 * kMargin + kCell * static_cast<double>(table.entries.size());
  std::string svg = absl::StrFormat(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
      "font-family=\"sans-serif\" font-size=\"10\">\n"
      "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n",
      static_cast<int>(width), static_cast<int>(kHeight + 2 * kMargin));
  for (size_t i = 0; i < table.entries.size(); ++i) {
    const AttentionEntry& e = table.entries[i];
    const double x = kMargin + kCell * static_cast<double>(i);
    const double shade = e.weight / max_weight;
    const int level = static_cast<int>(255.0 * (1.0 - shade));
    absl::StrAppend(&svg, absl::StrFormat(
        "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"28\" "
        "fill=\"rgb(255,%d,%d)\" stroke=\"#999\"/>\n"
        "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s</text>\n"
        "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.3f</text>\n",
        x, kMargin, kCell, level, level, x + kCell / 2, kMargin + 18,
        Escape(e.piece), x + kCell / 2, kMargin + 44, e.weight));
  }
  svg += "</svg>\n";
  return svg;
}

std::string AttentionTableText(const AttentionTable& table) {
  std::string out = "index\tpiece\tweight\n";
  for (size_t i = 0; i < table.entries.size(); ++i) {
    absl::StrAppend(&out, absl::StrFormat("%d\t%s\t%.6f\n", i,
                                          table.entries[i].piece,
                                          table.entries[i].weight));
  }
  return out;
}

}  // namespace dsre
