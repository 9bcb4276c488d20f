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

// Distantly-supervised relation extraction corpora: line-delimited JSON
// records, one annotated sentence per line, grouped into entity-pair bags.

#ifndef DSRE_CORPUS_H_
#define DSRE_CORPUS_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace dsre {

// The 18-entry coarse named-entity type scheme used for entity-type markers.
inline constexpr std::array<const char*, 18> kEntityTypes = {
    "PERSON",  "NORP",     "FAC",      "ORG",     "GPE",     "LOC",
    "PRODUCT", "EVENT",    "WORK_OF_ART", "LAW",  "LANGUAGE", "DATE",
    "TIME",    "PERCENT",  "MONEY",    "QUANTITY", "ORDINAL", "CARDINAL"};

bool IsEntityType(const std::string& tag);

// Label used for the no-relation class.
inline constexpr char kNaRelation[] = "NA";

enum class Split { kTrain, kTest };

const char* SplitName(Split split);
absl::StatusOr<Split> ParseSplit(const std::string& name);

struct EntityMention {
  std::string surface;
  // Half-open token interval [start, end).
  int start = 0;
  int end = 0;
  std::string type_tag;
  std::optional<std::string> kb_id;

  // Identity used for bagging: kb_id when present, else lower-cased surface.
  std::string Key() const;

  bool operator==(const EntityMention&) const = default;
};

struct Instance {
  std::string id;
  std::vector<std::string> tokens;
  EntityMention head;
  EntityMention tail;
  // Parent index per token, -1 marks the root.
  std::vector<int> dep_heads;
  std::vector<std::string> dep_labels;
  std::string relation;

  std::pair<std::string, std::string> PairKey() const {
    return {head.Key(), tail.Key()};
  }

  bool operator==(const Instance&) const = default;
};

// Checks every Instance invariant, including that dep_heads forms a tree.
absl::Status ValidateInstance(const Instance& instance);

// Bidirectional relation label <-> index map. NA is always index 0.
class RelationVocab {
 public:
  RelationVocab();

  // NA first, then the remaining labels in sorted order.
  static RelationVocab FromLabels(const std::vector<std::string>& labels);
  static absl::StatusOr<RelationVocab> FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;

  int size() const { return static_cast<int>(labels_.size()); }
  int na_index() const { return 0; }
  const std::string& Label(int index) const { return labels_.at(index); }
  std::optional<int> Index(const std::string& label) const;
  const std::vector<std::string>& labels() const { return labels_; }

  // Adds a label if missing and returns its index.
  int Add(const std::string& label);

  bool operator==(const RelationVocab& other) const {
    return labels_ == other.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, int> index_;
};

// One rejected input line.
struct RecordError {
  int64_t line = 0;
  std::string message;
};

struct LoadedCorpus {
  std::vector<Instance> instances;
  RelationVocab vocab;
  std::vector<RecordError> errors;
};

// Record <-> Instance conversion. Serialization is canonical: fixed key
// order, so serialize(parse(x)) is byte-stable.
absl::StatusOr<Instance> ParseRecord(const nlohmann::json& record);
absl::StatusOr<Instance> ParseRecordLine(const std::string& line);
nlohmann::ordered_json InstanceToRecord(const Instance& instance);
std::string SerializeRecord(const Instance& instance);

// Reads a record stream. Malformed records are skipped and reported in
// `errors`; only an unreadable file is a hard error. When `fixed_vocab` is
// given, unknown relation labels are record errors; otherwise the vocabulary
// is built from the labels seen.
absl::StatusOr<LoadedCorpus> LoadDataset(
    const std::string& path, Split split,
    const RelationVocab* fixed_vocab = nullptr);

absl::Status WriteDataset(const std::string& path,
                          const std::vector<Instance>& instances);

struct Bag {
  std::pair<std::string, std::string> pair_key;
  // Indices into the instance list the bag was built from.
  std::vector<int> instance_indices;
  std::set<int> gold_labels;
  Split split = Split::kTrain;

  // The single label of a train bag.
  int label() const { return *gold_labels.begin(); }
};

// Train: one bag per (pair, relation). Test: one bag per pair carrying the
// union of labels. Bags come out in order of first appearance. Instances
// whose relation is missing from `vocab` are skipped.
std::vector<Bag> GroupIntoBags(const std::vector<Instance>& instances,
                               const RelationVocab& vocab, Split split);

// Inverse-frequency class weights (N / K) / count_c over bag labels, where K
// counts the classes that occur, rescaled so those K weights average 1.
// Classes with no bags get 1.
std::vector<double> ClassWeights(const std::vector<Bag>& train_bags,
                                 const RelationVocab& vocab);

struct CorpusStats {
  int64_t sentences = 0;
  int64_t entity_pairs = 0;
  // Distinct (pair, non-NA relation) combinations.
  int64_t relation_mentions = 0;
};

CorpusStats ComputeStats(const std::vector<Instance>& instances);

}  // namespace dsre

#endif  // DSRE_CORPUS_H_
