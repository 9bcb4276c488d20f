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

// Held-out evaluation over ranked (bag, relation) predictions.

#ifndef DSRE_EVAL_H_
#define DSRE_EVAL_H_

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dsre/corpus.h"
#include "dsre/model.h"
#include "dsre/trainer.h"
#include "nlohmann/json.hpp"

namespace dsre {

struct Prediction {
  std::pair<std::string, std::string> pair_key;
  int relation = 0;  // never NA
  double score = 0.0;
  bool correct = false;
};

// Score descending, then pair_key, then relation index.
void SortPredictions(std::vector<Prediction>* predictions);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct PrCurve {
  std::vector<PrPoint> points;  // one per ranked prediction
  double auc = 0.0;             // sum_k precision_k * (recall_k - recall_{k-1})
  int total_positives = 0;
};

// Fails when `total_positives` is not positive.
absl::StatusOr<PrCurve> ComputePrCurve(std::vector<Prediction> predictions,
                                       int total_positives);

// Fraction correct among the top n. Fails when n exceeds the list size.
absl::StatusOr<double> PrecisionAt(std::vector<Prediction> predictions, int n);

// Predicted-relation counts over the top min(n, size) predictions.
std::map<int, int> TopNDistribution(std::vector<Prediction> predictions,
                                    int n = 300);

// Gold (pair, relation) mentions excluding NA: the recall denominator.
int CountPositives(const std::vector<Bag>& test_bags, const RelationVocab& vocab);

struct PredictionSet {
  std::vector<Prediction> predictions;
  int total_positives = 0;
  int num_bags = 0;
  int skipped_instances = 0;
};

// One prediction per (test bag, non-NA relation).
absl::StatusOr<PredictionSet> PredictAll(const RelationExtractor& model,
                                         const std::vector<Instance>& test);

struct EvalReport {
  PrCurve curve;
  std::map<int, double> precision_at;  // N in {100, 200, 300, 500} when available
  std::map<int, int> top_distribution;
  int num_predictions = 0;
  int num_bags = 0;
  int skipped_instances = 0;

  nlohmann::json ToJson(const RelationVocab& vocab) const;
};

absl::StatusOr<EvalReport> Evaluate(const RelationExtractor& model,
                                    const std::vector<Instance>& test);

struct AttentionEntry {
  std::string piece;
  double weight = 0.0;
};

struct AttentionTable {
  std::string instance_id;
  std::vector<AttentionEntry> entries;  // real tokens in input order
  // Index into `entries` of the largest weight.
  int argmax = 0;
  // Sentence token index behind each entry (-1 for markers and header words).
  std::vector<int> source_index;
};

// Relation-attention weights over the structured input of one instance.
// Fails for variants that have no relation attention.
absl::StatusOr<AttentionTable> InspectAttention(const RelationExtractor& model,
                                                const Instance& instance);

// The full model and the four ablated variants.
struct Variant {
  std::string name;
  ModelOptions options;
};
std::vector<Variant> AblationVariants(const ModelOptions& base);

struct AblationRow {
  std::string variant;
  std::string config_hash;
  nlohmann::json config;
  double auc = 0.0;
  std::map<int, double> precision_at;
};

// Builds an untrained model for the given options.
using ModelFactory =
    std::function<absl::StatusOr<RelationExtractor>(const ModelOptions&)>;

// Trains and evaluates every variant. Each row's hash is JsonHash(config),
// where config = {"model": options, "train": train_config}.
absl::StatusOr<std::vector<AblationRow>> RunAblation(
    const std::vector<Instance>& train, const std::vector<Instance>& test,
    const ModelOptions& base, const TrainConfig& train_config,
    const ModelFactory& factory);

nlohmann::json VariantConfig(const ModelOptions& options,
                             const TrainConfig& train_config);

// Fixed-width text table with one row per variant.
std::string FormatAblationTable(const std::vector<AblationRow>& rows);

}  // namespace dsre

#endif  // DSRE_EVAL_H_
