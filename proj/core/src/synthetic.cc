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

#include "dsre/synthetic.h"

#include <random>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace dsre {

namespace {

constexpr const char* kPatternVerbs[] = {
    "founded",  "married",  "governed", "acquired", "visited",   "employed",
    "bordered", "composed", "coached",  "designed", "sponsored", "inherited"};
constexpr const char* kNeutralVerbs[] = {"met", "saw", "mentioned", "called",
                                         "praised", "thanked", "joined"};
constexpr const char* kFirstNames[] = {
    "Alba",  "Bren",  "Cato",  "Dara",  "Elio",  "Faro",  "Gita",  "Hale",
    "Ines",  "Joss",  "Kira",  "Lome",  "Mira",  "Nils",  "Oren",  "Pia",
    "Quin",  "Rafe",  "Sela",  "Tove",  "Ugo",   "Vera",  "Wren",  "Xan",
    "Yara",  "Zeno",  "Arlo",  "Bela",  "Cyra",  "Dov",   "Esme",  "Fenn"};
constexpr const char* kLastNames[] = {
    "Koster", "Lindqvist", "Moreau", "Novak",   "Okafor", "Petrov",
    "Quint",  "Rossi",     "Sato",   "Tanaka",  "Ulrich", "Vargas",
    "Weber",  "Xu",        "Yilmaz", "Zoller",  "Abbas",  "Brandt",
    "Castro", "Dubois",    "Eriksen", "Fischer", "Garcia", "Haas",
    "Iqbal",  "Jansen",    "Kowalski", "Larsen", "Meyer",  "Nakamura",
    "Olsen",  "Park"};
constexpr const char* kFillerNouns[] = {"officials", "analysts", "reporters",
                                        "investors", "critics",  "neighbors"};
constexpr const char* kSources[] = {"sources", "witnesses", "historians",
                                    "records"};
constexpr const char* kAdverbs[] = {"reportedly", "recently", "finally",
                                    "quietly"};

template <typename T, size_t N>
const T& Pick(const T (&items)[N], std::mt19937_64* rng) {
  std::uniform_int_distribution<size_t> d(0, N - 1);
  return items[d(*rng)];
}

struct Entity {
  std::string first, last, kb_id, type;
};

// Tokens with their dependency arcs, built in surface order.
class SentenceBuilder {
 public:
  int Add(const std::string& word) {
    tokens_.push_back(word);
    heads_.push_back(-1);
    labels_.push_back("root");
    return static_cast<int>(tokens_.size()) - 1;
  }
  void Attach(int child, int head, const std::string& label) {
    heads_[child] = head;
    labels_[child] = label;
  }
  // Two-token name; returns {first, last}, the last token being the head.
  std::pair<int, int> AddEntity(const Entity& e) {
    const int a = Add(e.first);
    const int b = Add(e.last);
    Attach(a, b, "compound");
    return {a, b};
  }

  Instance Finish(std::string id, const Entity& h, std::pair<int, int> hspan,
                  const Entity& t, std::pair<int, int> tspan,
                  std::string relation) {
    Instance inst;
    inst.id = std::move(id);
    inst.tokens = tokens_;
    inst.dep_heads = heads_;
    inst.dep_labels = labels_;
    inst.head = {absl::StrCat(h.first, " ", h.last), hspan.first,
                 hspan.second + 1, h.type, h.kb_id};
    inst.tail = {absl::StrCat(t.first, " ", t.last), tspan.first,
                 tspan.second + 1, t.type, t.kb_id};
    inst.relation = std::move(relation);
    return inst;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<int> heads_;
  std::vector<std::string> labels_;
};

// Adds ", while Q <verb> R" under `anchor`.
void AddDistractor(SentenceBuilder* b, int anchor, const std::string& verb,
                   std::mt19937_64* rng) {
  const int comma = b->Add(",");
  const int mark = b->Add("while");
  const int subj = b->Add(Pick(kFillerNouns, rng));
  const int v = b->Add(verb);
  const int obj = b->Add(Pick(kFillerNouns, rng));
  b->Attach(v, anchor, "advcl");
  b->Attach(comma, v, "punct");
  b->Attach(mark, v, "mark");
  b->Attach(subj, v, "nsubj");
  b->Attach(obj, v, "obj");
}

class Generator {
 public:
  Generator(const SyntheticConfig& config) : config_(config), rng_(config.seed) {
    for (const char* first : kFirstNames) {
      for (const char* last : kLastNames) {
        std::uniform_int_distribution<size_t> type(0, kEntityTypes.size() - 1);
        entities_.push_back({first, last,
                             absl::StrFormat("/m/e%04d", entities_.size()),
                             kEntityTypes[type(rng_)]});
      }
    }
    for (int k = 0; k < config.num_relations; ++k) {
      verbs_.push_back(k < static_cast<int>(std::size(kPatternVerbs))
                           ? kPatternVerbs[k]
                           : absl::StrCat("relverb", k));
    }
  }

  const std::vector<std::string>& verbs() const { return verbs_; }

  std::pair<int, int> NewPair() {
    std::uniform_int_distribution<size_t> pick(0, entities_.size() - 1);
    while (true) {
      const int h = static_cast<int>(pick(rng_));
      const int t = static_cast<int>(pick(rng_));
      if (h != t && used_pairs_.insert({h, t}).second) return {h, t};
    }
  }

  // Relation index in [0, K] where K stands for NA.
  int DrawLabel() {
    std::bernoulli_distribution na(config_.na_fraction);
    if (na(rng_)) return config_.num_relations;
    std::uniform_int_distribution<int> r(0, config_.num_relations - 1);
    return r(rng_);
  }

  std::string Label(int r) const {
    return r == config_.num_relations ? std::string(kNaRelation)
                                      : SyntheticRelationLabel(r);
  }

  int NumSentences() {
    std::uniform_int_distribution<int> n(1, config_.max_sentences_per_bag);
    return n(rng_);
  }

  // A sentence in which `expressed` (K = NA) holds between the pair.
  Instance Sentence(const std::string& id, std::pair<int, int> pair,
                    int expressed, const std::string& label) {
    const Entity& h = entities_[pair.first];
    const Entity& t = entities_[pair.second];
    const std::string verb = expressed == config_.num_relations
                                 ? std::string(Pick(kNeutralVerbs, &rng_))
                                 : verbs_[expressed];
    std::bernoulli_distribution coin(0.5);
    std::bernoulli_distribution distract(config_.distractor_rate);
    std::bernoulli_distribution passive(config_.passive_fraction);

    SentenceBuilder b;
    std::pair<int, int> hs, ts;
    int v = -1;
    int clause_root = -1;
    const int layout = passive(rng_) ? 2 : (coin(rng_) ? 1 : 0);
    switch (layout) {
      case 0: {  // [adv] H V T
        const int adv = coin(rng_) ? b.Add(Pick(kAdverbs, &rng_)) : -1;
        hs = b.AddEntity(h);
        v = b.Add(verb);
        ts = b.AddEntity(t);
        if (adv >= 0) b.Attach(adv, v, "advmod");
        b.Attach(hs.second, v, "nsubj");
        b.Attach(ts.second, v, "obj");
        clause_root = v;
        break;
      }
      case 1: {  // S said that H V T
        const int src = b.Add(Pick(kSources, &rng_));
        const int said = b.Add("said");
        const int that = b.Add("that");
        hs = b.AddEntity(h);
        v = b.Add(verb);
        ts = b.AddEntity(t);
        b.Attach(src, said, "nsubj");
        b.Attach(v, said, "ccomp");
        b.Attach(that, v, "mark");
        b.Attach(hs.second, v, "nsubj");
        b.Attach(ts.second, v, "obj");
        clause_root = said;
        break;
      }
      default: {  // T was V by H
        ts = b.AddEntity(t);
        const int was = b.Add("was");
        v = b.Add(verb);
        const int by = b.Add("by");
        hs = b.AddEntity(h);
        b.Attach(ts.second, v, "nsubj:pass");
        b.Attach(was, v, "aux:pass");
        b.Attach(by, hs.second, "case");
        b.Attach(hs.second, v, "obl");
        clause_root = v;
        break;
      }
    }
    if (distract(rng_) && config_.num_relations > 1) {
      std::uniform_int_distribution<int> other(0, config_.num_relations - 1);
      int d = other(rng_);
      while (d == expressed) d = other(rng_);
      AddDistractor(&b, clause_root, verbs_[d], &rng_);
    }
    const int stop = b.Add(".");
    b.Attach(stop, clause_root, "punct");
    return b.Finish(id, h, hs, t, ts, label);
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  const SyntheticConfig& config_;
  std::mt19937_64 rng_;
  std::vector<Entity> entities_;
  std::vector<std::string> verbs_;
  std::set<std::pair<int, int>> used_pairs_;
};

}  // namespace

std::string SyntheticRelationLabel(int k) {
  return absl::StrCat("/synthetic/rel_", k + 1);
}

absl::Status SyntheticConfig::Validate() const {
  if (num_relations < 1) {
    return absl::InvalidArgumentError("num_relations must be at least 1");
  }
  if (train_bags < 0 || test_bags < 0 || max_sentences_per_bag < 1) {
    return absl::InvalidArgumentError("bag counts must be non-negative");
  }
  for (double p : {noise_rate, na_fraction, multi_label_fraction, distractor_rate,
                   passive_fraction}) {
    if (p < 0.0 || p > 1.0) {
      return absl::InvalidArgumentError("rates must lie in [0, 1]");
    }
  }
  const int64_t capacity =
      static_cast<int64_t>(std::size(kFirstNames)) * std::size(kLastNames);
  if (static_cast<int64_t>(train_bags) + test_bags > capacity * (capacity - 1) / 4) {
    return absl::InvalidArgumentError("too many bags for the entity pool");
  }
  return absl::OkStatus();
}

nlohmann::json SyntheticConfig::ToJson() const {
  return {{"num_relations", num_relations},
          {"train_bags", train_bags},
          {"test_bags", test_bags},
          {"noise_rate", noise_rate},
          {"na_fraction", na_fraction},
          {"max_sentences_per_bag", max_sentences_per_bag},
          {"multi_label_fraction", multi_label_fraction},
          {"distractor_rate", distractor_rate},
          {"passive_fraction", passive_fraction},
          {"seed", seed}};
}

absl::StatusOr<SyntheticConfig> SyntheticConfig::FromJson(
    const nlohmann::json& j, const SyntheticConfig& base) {
  SyntheticConfig c = base;
  try {
    c.num_relations = j.value("num_relations", c.num_relations);
    c.train_bags = j.value("train_bags", c.train_bags);
    c.test_bags = j.value("test_bags", c.test_bags);
    c.noise_rate = j.value("noise_rate", c.noise_rate);
    c.na_fraction = j.value("na_fraction", c.na_fraction);
    c.max_sentences_per_bag = j.value("max_sentences_per_bag", c.max_sentences_per_bag);
    c.multi_label_fraction = j.value("multi_label_fraction", c.multi_label_fraction);
    c.distractor_rate = j.value("distractor_rate", c.distractor_rate);
    c.passive_fraction = j.value("passive_fraction", c.passive_fraction);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("synthetic config: ", e.what()));
  }
  if (absl::Status s = c.Validate(); !s.ok()) return s;
  return c;
}

absl::StatusOr<SyntheticCorpus> GenerateSynthetic(const SyntheticConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  Generator gen(config);
  SyntheticCorpus corpus;
  for (int k = 0; k < config.num_relations; ++k) {
    corpus.patterns[SyntheticRelationLabel(k)] = gen.verbs()[k];
  }
  const int na = config.num_relations;
  std::bernoulli_distribution noisy(config.noise_rate);
  std::bernoulli_distribution multi(config.multi_label_fraction);

  for (int bag = 0; bag < config.train_bags; ++bag) {
    const auto pair = gen.NewPair();
    const int expressed = gen.DrawLabel();
    int label = expressed;
    if (noisy(gen.rng())) {
      std::uniform_int_distribution<int> other(0, config.num_relations - 1);
      label = other(gen.rng());
      if (label >= expressed) ++label;
    }
    const int n = gen.NumSentences();
    for (int s = 0; s < n; ++s) {
      corpus.train.push_back(gen.Sentence(absl::StrFormat("train-%05d-%d", bag, s),
                                          pair, expressed, gen.Label(label)));
    }
  }
  for (int bag = 0; bag < config.test_bags; ++bag) {
    const auto pair = gen.NewPair();
    const int first = gen.DrawLabel();
    int second = -1;
    if (first != na && config.num_relations > 1 && multi(gen.rng())) {
      std::uniform_int_distribution<int> other(0, config.num_relations - 2);
      second = other(gen.rng());
      if (second >= first) ++second;
    }
    const int n = std::max(gen.NumSentences(), second >= 0 ? 2 : 1);
    for (int s = 0; s < n; ++s) {
      const int r = (second >= 0 && s % 2 == 1) ? second : first;
      corpus.test.push_back(gen.Sentence(absl::StrFormat("test-%05d-%d", bag, s),
                                         pair, r, gen.Label(r)));
    }
  }
  return corpus;
}

}  // namespace dsre
