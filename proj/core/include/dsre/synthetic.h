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

// Parsed toy corpus with planted relation patterns.
//
// Every non-NA sentence carries its relation's pattern verb on the path
// between the two entities. NA sentences use neutral verbs. Some sentences
// add a clause that contains another relation's pattern verb but hangs off
// the entity path. Train bags may have their label replaced at random with
// probability `noise_rate`; test labels are always correct.

#ifndef DSRE_SYNTHETIC_H_
#define DSRE_SYNTHETIC_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dsre/corpus.h"
#include "nlohmann/json.hpp"

namespace dsre {

struct SyntheticConfig {
  int num_relations = 5;
  int train_bags = 2000;
  int test_bags = 500;
  double noise_rate = 0.2;
  double na_fraction = 0.4;
  int max_sentences_per_bag = 3;
  // Fraction of non-NA test bags that express a second relation.
  double multi_label_fraction = 0.05;
  // Probability that a sentence carries an off-path distractor clause.
  double distractor_rate = 0.5;
  // Share of sentences in the passive layout "T was V by H", where the tail
  // precedes the head. The rest split evenly between "H V T" and
  // "S said that H V T".
  double passive_fraction = 1.0 / 3.0;
  uint64_t seed = 7;

  absl::Status Validate() const;
  nlohmann::json ToJson() const;
  static absl::StatusOr<SyntheticConfig> FromJson(const nlohmann::json& j,
                                                  const SyntheticConfig& base);
};

struct SyntheticCorpus {
  std::vector<Instance> train;
  std::vector<Instance> test;
  // Relation label -> its planted pattern word.
  std::map<std::string, std::string> patterns;
};

absl::StatusOr<SyntheticCorpus> GenerateSynthetic(const SyntheticConfig& config);

// Label used for relation k (0-based).
std::string SyntheticRelationLabel(int k);

}  // namespace dsre

#endif  // DSRE_SYNTHETIC_H_
