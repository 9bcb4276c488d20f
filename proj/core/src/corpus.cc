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

#include "dsre/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "dsre/deptree.h"

namespace dsre {

using json = nlohmann::json;

bool IsEntityType(const std::string& tag) {
  return std::find_if(kEntityTypes.begin(), kEntityTypes.end(),
                      [&](const char* t) { return tag == t; }) !=
         kEntityTypes.end();
}

const char* SplitName(Split split) {
  return split == Split::kTrain ? "train" : "test";
}

absl::StatusOr<Split> ParseSplit(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown split '", name, "' (expected train|test)"));
}

std::string EntityMention::Key() const {
  if (kb_id.has_value() && !kb_id->empty()) return *kb_id;
  return absl::AsciiStrToLower(surface);
}

namespace {

absl::Status ValidateMention(const EntityMention& m, int num_tokens,
                             const char* which) {
  if (m.start < 0 || m.end > num_tokens || m.start >= m.end) {
    return absl::InvalidArgumentError(
        absl::StrCat(which, " span [", m.start, ", ", m.end,
                     ") is empty or outside the sentence of ", num_tokens,
                     " tokens"));
  }
  if (!IsEntityType(m.type_tag)) {
    return absl::InvalidArgumentError(
        absl::StrCat(which, " type '", m.type_tag, "' is not an entity type"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status ValidateInstance(const Instance& instance) {
  const int n = static_cast<int>(instance.tokens.size());
  if (instance.id.empty()) return absl::InvalidArgumentError("empty id");
  if (n == 0) return absl::InvalidArgumentError("no tokens");
  if (absl::Status s = ValidateMention(instance.head, n, "head"); !s.ok()) {
    return s;
  }
  if (absl::Status s = ValidateMention(instance.tail, n, "tail"); !s.ok()) {
    return s;
  }
  if (instance.head.start < instance.tail.end &&
      instance.tail.start < instance.head.end) {
    return absl::InvalidArgumentError("head and tail spans overlap");
  }
  if (static_cast<int>(instance.dep_heads.size()) != n) {
    return absl::InvalidArgumentError(
        absl::StrCat("dep_heads has ", instance.dep_heads.size(),
                     " entries for ", n, " tokens"));
  }
  if (static_cast<int>(instance.dep_labels.size()) != n) {
    return absl::InvalidArgumentError(
        absl::StrCat("dep_labels has ", instance.dep_labels.size(),
                     " entries for ", n, " tokens"));
  }
  if (instance.relation.empty()) {
    return absl::InvalidArgumentError("empty relation label");
  }
  absl::StatusOr<DepTree> tree =
      ValidateTree(instance.dep_heads, instance.dep_labels);
  if (!tree.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid dependency tree: ", tree.status().message()));
  }
  return absl::OkStatus();
}

RelationVocab::RelationVocab() { Add(kNaRelation); }

RelationVocab RelationVocab::FromLabels(const std::vector<std::string>& labels) {
  std::vector<std::string> sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  RelationVocab vocab;
  for (const std::string& label : sorted) vocab.Add(label);
  return vocab;
}

absl::StatusOr<RelationVocab> RelationVocab::FromJson(const json& j) {
  if (!j.is_array() || j.empty() || j[0] != kNaRelation) {
    return absl::InvalidArgumentError(
        "relation vocabulary must be an array starting with \"NA\"");
  }
  RelationVocab vocab;
  for (size_t i = 1; i < j.size(); ++i) {
    if (!j[i].is_string()) {
      return absl::InvalidArgumentError("relation labels must be strings");
    }
    const std::string label = j[i].get<std::string>();
    if (vocab.Index(label).has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate relation label '", label, "'"));
    }
    vocab.Add(label);
  }
  return vocab;
}

json RelationVocab::ToJson() const { return json(labels_); }

std::optional<int> RelationVocab::Index(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int RelationVocab::Add(const std::string& label) {
  auto [it, inserted] = index_.emplace(label, size());
  if (inserted) labels_.push_back(label);
  return it->second;
}

namespace {

template <typename T>
absl::StatusOr<T> Field(const json& record, const char* name) {
  auto it = record.find(name);
  if (it == record.end()) {
    return absl::InvalidArgumentError(absl::StrCat("missing field '", name, "'"));
  }
  try {
    return it->template get<T>();
  } catch (const json::exception&) {
    return absl::InvalidArgumentError(
        absl::StrCat("field '", name, "' has the wrong type"));
  }
}

absl::StatusOr<EntityMention> ParseMention(const json& record,
                                           const char* name) {
  auto it = record.find(name);
  if (it == record.end() || !it->is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat("missing object field '", name, "'"));
  }
  const json& m = *it;
  EntityMention mention;
  absl::StatusOr<std::string> surface = Field<std::string>(m, "surface");
  absl::StatusOr<int> start = Field<int>(m, "start");
  absl::StatusOr<int> end = Field<int>(m, "end");
  absl::StatusOr<std::string> type = Field<std::string>(m, "type");
  for (const absl::Status& s :
       {surface.status(), start.status(), end.status(), type.status()}) {
    if (!s.ok()) return absl::InvalidArgumentError(absl::StrCat(name, ": ", s.message()));
  }
  mention.surface = *surface;
  mention.start = *start;
  mention.end = *end;
  mention.type_tag = *type;
  if (auto kb = m.find("kb_id"); kb != m.end() && !kb->is_null()) {
    if (!kb->is_string()) {
      return absl::InvalidArgumentError(absl::StrCat(name, ": kb_id must be a string"));
    }
    mention.kb_id = kb->get<std::string>();
  }
  return mention;
}

nlohmann::ordered_json MentionToJson(const EntityMention& m) {
  nlohmann::ordered_json j;
  j["surface"] = m.surface;
  j["start"] = m.start;
  j["end"] = m.end;
  j["type"] = m.type_tag;
  if (m.kb_id.has_value()) j["kb_id"] = *m.kb_id;
  return j;
}

}  // namespace

absl::StatusOr<Instance> ParseRecord(const json& record) {
  if (!record.is_object()) {
    return absl::InvalidArgumentError("record is not a JSON object");
  }
  Instance instance;
  absl::StatusOr<std::string> id = Field<std::string>(record, "id");
  if (!id.ok()) return id.status();
  instance.id = *id;
  absl::StatusOr<std::vector<std::string>> tokens =
      Field<std::vector<std::string>>(record, "tokens");
  if (!tokens.ok()) return tokens.status();
  instance.tokens = *std::move(tokens);
  absl::StatusOr<EntityMention> head = ParseMention(record, "head");
  if (!head.ok()) return head.status();
  instance.head = *std::move(head);
  absl::StatusOr<EntityMention> tail = ParseMention(record, "tail");
  if (!tail.ok()) return tail.status();
  instance.tail = *std::move(tail);
  absl::StatusOr<std::vector<int>> dep_heads =
      Field<std::vector<int>>(record, "dep_heads");
  if (!dep_heads.ok()) return dep_heads.status();
  instance.dep_heads = *std::move(dep_heads);
  absl::StatusOr<std::vector<std::string>> dep_labels =
      Field<std::vector<std::string>>(record, "dep_labels");
  if (!dep_labels.ok()) return dep_labels.status();
  instance.dep_labels = *std::move(dep_labels);
  absl::StatusOr<std::string> relation = Field<std::string>(record, "relation");
  if (!relation.ok()) return relation.status();
  instance.relation = *relation;

  if (absl::Status s = ValidateInstance(instance); !s.ok()) return s;
  return instance;
}

absl::StatusOr<Instance> ParseRecordLine(const std::string& line) {
  json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (record.is_discarded()) {
    return absl::InvalidArgumentError("line is not valid JSON");
  }
  return ParseRecord(record);
}

nlohmann::ordered_json InstanceToRecord(const Instance& instance) {
  nlohmann::ordered_json j;
  j["id"] = instance.id;
  j["tokens"] = instance.tokens;
  j["head"] = MentionToJson(instance.head);
  j["tail"] = MentionToJson(instance.tail);
  j["dep_heads"] = instance.dep_heads;
  j["dep_labels"] = instance.dep_labels;
  j["relation"] = instance.relation;
  return j;
}

std::string SerializeRecord(const Instance& instance) {
  return InstanceToRecord(instance).dump();
}

absl::StatusOr<LoadedCorpus> LoadDataset(const std::string& path, Split split,
                                         const RelationVocab* fixed_vocab) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open dataset ", path));
  }
  LoadedCorpus corpus;
  std::vector<std::string> labels;
  std::string line;
  int64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (std::all_of(line.begin(), line.end(),
                    [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    absl::StatusOr<Instance> instance = ParseRecordLine(line);
    if (!instance.ok()) {
      corpus.errors.push_back(
          {line_number, std::string(instance.status().message())});
      continue;
    }
    if (fixed_vocab != nullptr &&
        !fixed_vocab->Index(instance->relation).has_value()) {
      corpus.errors.push_back(
          {line_number,
           absl::StrCat("unknown relation '", instance->relation, "'")});
      continue;
    }
    labels.push_back(instance->relation);
    corpus.instances.push_back(*std::move(instance));
  }
  if (in.bad()) {
    return absl::DataLossError(absl::StrCat("read error in ", path));
  }
  corpus.vocab =
      fixed_vocab != nullptr ? *fixed_vocab : RelationVocab::FromLabels(labels);
  (void)split;  // Records carry no split field; the split drives bagging.
  return corpus;
}

absl::Status WriteDataset(const std::string& path,
                          const std::vector<Instance>& instances) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  }
  for (const Instance& instance : instances) {
    out << SerializeRecord(instance) << '\n';
  }
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

std::vector<Bag> GroupIntoBags(const std::vector<Instance>& instances,
                               const RelationVocab& vocab, Split split) {
  std::vector<Bag> bags;
  // Train keys include the relation; test keys use an empty relation slot.
  std::map<std::pair<std::pair<std::string, std::string>, std::string>, int>
      index;
  for (int i = 0; i < static_cast<int>(instances.size()); ++i) {
    const Instance& instance = instances[i];
    std::optional<int> label = vocab.Index(instance.relation);
    if (!label.has_value()) continue;
    auto pair = instance.PairKey();
    auto key = std::make_pair(
        pair, split == Split::kTrain ? instance.relation : std::string());
    auto [it, inserted] = index.emplace(key, static_cast<int>(bags.size()));
    if (inserted) {
      Bag bag;
      bag.pair_key = pair;
      bag.split = split;
      bags.push_back(std::move(bag));
    }
    Bag& bag = bags[it->second];
    bag.instance_indices.push_back(i);
    bag.gold_labels.insert(*label);
  }
  return bags;
}

std::vector<double> ClassWeights(const std::vector<Bag>& train_bags,
                                 const RelationVocab& vocab) {
  std::vector<int64_t> counts(vocab.size(), 0);
  for (const Bag& bag : train_bags) ++counts[bag.label()];
  const int64_t total = train_bags.size();
  const int64_t present =
      std::count_if(counts.begin(), counts.end(), [](int64_t c) { return c > 0; });
  std::vector<double> weights(vocab.size(), 1.0);
  if (present == 0) return weights;
  const double per_class = static_cast<double>(total) / present;
  double sum = 0.0;
  for (int c = 0; c < vocab.size(); ++c) {
    if (counts[c] > 0) {
      weights[c] = per_class / counts[c];
      sum += weights[c];
    }
  }
  const double mean = sum / present;
  for (int c = 0; c < vocab.size(); ++c) {
    if (counts[c] > 0) weights[c] /= mean;
  }
  return weights;
}

CorpusStats ComputeStats(const std::vector<Instance>& instances) {
  CorpusStats stats;
  stats.sentences = instances.size();
  std::set<std::pair<std::string, std::string>> pairs;
  std::set<std::pair<std::pair<std::string, std::string>, std::string>>
      mentions;
  for (const Instance& instance : instances) {
    auto pair = instance.PairKey();
    pairs.insert(pair);
    if (instance.relation != kNaRelation) {
      mentions.emplace(pair, instance.relation);
    }
  }
  stats.entity_pairs = pairs.size();
  stats.relation_mentions = mentions.size();
  return stats;
}

}  // namespace dsre
