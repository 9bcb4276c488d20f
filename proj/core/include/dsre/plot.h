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

// Plain-text and SVG renderings of evaluation outputs.

#ifndef DSRE_PLOT_H_
#define DSRE_PLOT_H_

#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dsre/eval.h"

namespace dsre {

// "recall,precision" header plus one row per point.
std::string PrCurveCsv(const PrCurve& curve);
absl::StatusOr<PrCurve> ParsePrCurveCsv(const std::string& text);

struct LabeledCurve {
  std::string label;
  PrCurve curve;
};

// Overlaid precision-recall curves with a legend.
std::string PrCurveSvg(const std::vector<LabeledCurve>& curves);

// One cell per token, shaded by weight, with the weight printed below.
std::string AttentionHeatmapSvg(const AttentionTable& table);

// Tab-separated "index, piece, weight" rows.
std::string AttentionTableText(const AttentionTable& table);

}  // namespace dsre

#endif  // DSRE_PLOT_H_
