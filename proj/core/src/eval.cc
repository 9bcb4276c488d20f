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

#include "dsre/eval.h"

#include <algorithm>
#include <tuple>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dsre/manifest.h"

namespace dsre {

namespace {

constexpr int kReportedCutoffs[] = {100, 200, 300, 500};

}  // namespace

void SortPredictions(std::vector<Prediction>* predictions) {
  std::sort(predictions->begin(), predictions->end(),
            [](const Prediction& a, const Prediction& b) {
              if (a.score != b.score) return a.score > b.score;
              return std::tie(a.pair_key, a.relation) <
                     std::tie(b.pair_key, b.relation);
            });
}

absl::StatusOr<PrCurve> ComputePrCurve(std::vector<Prediction> predictions,
                                       int total_positives) {
  if (total_positives <= 0) {
    return absl::FailedPreconditionError(
        "precision-recall curve needs at least one positive");
  }
  SortPredictions(&predictions);
  PrCurve curve;
  curve.total_positives = total_positives;
  curve.points.reserve(predictions.size());
  int correct = 0;
  double previous_recall = 0.0;
  for (size_t k = 0; k < predictions.size(); ++k) {
    if (predictions[k].correct) ++correct;
    PrPoint p;
    p.precision = static_cast<double>(correct) / static_cast<double>(k + 1);
    p.recall = static_cast<double>(correct) / total_positives;
    curve.auc += p.precision * (p.recall - previous_recall);
    previous_recall = p.recall;
    curve.points.push_back(p);
  }
  return curve;
}

absl::StatusOr<double> PrecisionAt(std::vector<Prediction> predictions, int n) {
  if (n <= 0 || n > static_cast<int>(predictions.size())) {
    return absl::InvalidArgumentError(absl::StrCat(
        "P@", n, " requested with ", predictions.size(), " predictions"));
  }
  SortPredictions(&predictions);
  int correct = 0;
  for (int k = 0; k < n; ++k) correct += predictions[k].correct ? 1 : 0;
  return static_cast<double>(correct) / n;
}

std::map<int, int> TopNDistribution(std::vector<Prediction> predictions, int n) {
  SortPredictions(&predictions);
  std::map<int, int> counts;
  const int limit = std::min<int>(n, predictions.size());
  for (int k = 0; k < limit; ++k) ++counts[predictions[k].relation];
  return counts;
}

int CountPositives(const std::vector<Bag>& test_bags, const RelationVocab& vocab) {
  int positives = 0;
  for (const Bag& bag : test_bags) {
    for (int label : bag.gold_labels) positives += label != vocab.na_index() ? 1 : 0;
  }
  return positives;
}

absl::StatusOr<PredictionSet> PredictAll(const RelationExtractor& model,
                                         const std::vector<Instance>& test) {
  const RelationVocab& vocab = model.relations();
  const std::vector<Bag> bags = GroupIntoBags(test, vocab, Split::kTest);
  PredictionSet out;
  out.total_positives = CountPositives(bags, vocab);
  for (const Bag& bag : bags) {
    std::vector<StructuredInput> inputs;
    for (int i : bag.instance_indices) {
      absl::StatusOr<StructuredInput> input = model.Prepare(test[i]);
      if (input.ok()) {
        inputs.push_back(*std::move(input));
      } else {
        ++out.skipped_instances;
      }
    }
    if (inputs.empty()) continue;
    std::vector<const StructuredInput*> pointers;
    for (const StructuredInput& input : inputs) pointers.push_back(&input);
    absl::StatusOr<Eigen::VectorXd> probs = model.PredictBag(pointers);
    if (!probs.ok()) return probs.status();
    ++out.num_bags;
    for (int r = 0; r < vocab.size(); ++r) {
      if (r == vocab.na_index()) continue;
      out.predictions.push_back(
          {bag.pair_key, r, (*probs)(r), bag.gold_labels.count(r) > 0});
    }
  }
  return out;
}

nlohmann::json EvalReport::ToJson(const RelationVocab& vocab) const {
  nlohmann::json j;
  j["auc"] = curve.auc;
  j["total_positives"] = curve.total_positives;
  j["num_predictions"] = num_predictions;
  j["num_bags"] = num_bags;
  j["skipped_instances"] = skipped_instances;
  nlohmann::json p = nlohmann::json::object();
  for (const auto& [n, value] : precision_at) p[absl::StrCat("P@", n)] = value;
  j["precision_at"] = p;
  nlohmann::json dist = nlohmann::json::object();
  for (const auto& [r, count] : top_distribution) dist[vocab.Label(r)] = count;
  j["top_300_distribution"] = dist;
  return j;
}

absl::StatusOr<EvalReport> Evaluate(const RelationExtractor& model,
                                    const std::vector<Instance>& test) {
  absl::StatusOr<PredictionSet> set = PredictAll(model, test);
  if (!set.ok()) return set.status();
  EvalReport report;
  absl::StatusOr<PrCurve> curve =
      ComputePrCurve(set->predictions, set->total_positives);
  if (!curve.ok()) return curve.status();
  report.curve = *std::move(curve);
  for (int n : kReportedCutoffs) {
    if (n <= static_cast<int>(set->predictions.size())) {
      report.precision_at[n] = *PrecisionAt(set->predictions, n);
    }
  }
  report.top_distribution = TopNDistribution(set->predictions, 300);
  report.num_predictions = static_cast<int>(set->predictions.size());
  report.num_bags = set->num_bags;
  report.skipped_instances = set->skipped_instances;
  return report;
}

absl::StatusOr<AttentionTable> InspectAttention(const RelationExtractor& model,
                                                const Instance& instance) {
  const Ablation ablation = model.options().ablation;
  if (ablation == Ablation::kNoRelEmb || ablation == Ablation::kNoRelAttn) {
    return absl::FailedPreconditionError(absl::StrCat(
        "variant ", AblationName(ablation), " has no relation attention"));
  }
  absl::StatusOr<StructuredInput> input = model.Prepare(instance);
  if (!input.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "instance ", instance.id, ": ", input.status().message()));
  }
  absl::StatusOr<RelationExtractor::SentenceOutput> out =
      model.EncodeSentence(*input);
  if (!out.ok()) return out.status();
  AttentionTable table;
  table.instance_id = instance.id;
  for (int t = 0; t < input->length(); ++t) {
    if (!input->padding_mask[t]) continue;
    table.entries.push_back({input->pieces[t], out->repr.alpha(t)});
    table.source_index.push_back(input->source_index[t]);
    if (table.entries.back().weight > table.entries[table.argmax].weight) {
      table.argmax = static_cast<int>(table.entries.size()) - 1;
    }
  }
  return table;
}

std::vector<Variant> AblationVariants(const ModelOptions& base) {
  ModelOptions full = WithAblation(base, Ablation::kFull);
  full.input.use_entity_types = true;
  if (full.input.path_mode == PathMode::kSdp) full.input.path_mode = PathMode::kStp;
  ModelOptions no_types = full;
  no_types.input.use_entity_types = false;
  return {{"full", full},
          {"w/o ET", no_types},
          {"w/o r_ht", WithAblation(full, Ablation::kNoRelEmb)},
          {"w/o a_r", WithAblation(full, Ablation::kNoRelAttn)},
          {"w. SDP", WithAblation(full, Ablation::kSdpInput)}};
}

nlohmann::json VariantConfig(const ModelOptions& options,
                             const TrainConfig& train_config) {
  return {{"model", options.ToJson()}, {"train", train_config.ToJson()}};
}

absl::StatusOr<std::vector<AblationRow>> RunAblation(
    const std::vector<Instance>& train, const std::vector<Instance>& test,
    const ModelOptions& base, const TrainConfig& train_config,
    const ModelFactory& factory) {
  std::vector<AblationRow> rows;
  for (const Variant& variant : AblationVariants(base)) {
    absl::StatusOr<RelationExtractor> model = factory(variant.options);
    if (!model.ok()) return model.status();
    absl::StatusOr<TrainResult> trained = Train(&*model, train, train_config);
    if (!trained.ok()) return trained.status();
    absl::StatusOr<EvalReport> report = Evaluate(*model, test);
    if (!report.ok()) return report.status();
    AblationRow row;
    row.variant = variant.name;
    row.config = VariantConfig(variant.options, train_config);
    row.config_hash = JsonHash(row.config);
    row.auc = report->curve.auc;
    row.precision_at = report->precision_at;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string FormatAblationTable(const std::vector<AblationRow>& rows) {
  std::string out = absl::StrFormat("%-10s %8s %8s %8s %8s  %s\n", "variant",
                                    "AUC", "P@100", "P@200", "P@300", "config");
  auto cell = [](const std::map<int, double>& p, int n) {
    auto it = p.find(n);
    return it == p.end() ? std::string("-") : absl::StrFormat("%.3f", it->second);
  };
  for (const AblationRow& row : rows) {
    absl::StrAppend(
        &out, absl::StrFormat("%-10s %8.3f %8s %8s %8s  %s\n", row.variant,
                              row.auc, cell(row.precision_at, 100),
                              cell(row.precision_at, 200),
                              cell(row.precision_at, 300),
                              row.config_hash.substr(0, 12)));
  }
  return out;
}

}  // namespace dsre
