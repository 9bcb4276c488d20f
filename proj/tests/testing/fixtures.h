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


// Shared builders for the unit tests.

#ifndef DSRE_TESTS_TESTING_FIXTURES_H_
#define DSRE_TESTS_TESTING_FIXTURES_H_

#include <algorithm>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dsre/corpus.h"
#include "dsre/synthetic.h"
#include "gtest/gtest.h"

namespace dsre::testing {

// Uniformly random tree over n nodes: node order is shuffled, then each node
// after the first attaches to a random earlier one.
inline std::vector<int> RandomHeads(int n, std::mt19937_64* rng) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), *rng);
  std::vector<int> heads(n, -1);
  for (int k = 1; k < n; ++k) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    heads[order[k]] = order[pick(*rng)];
  }
  return heads;
}

inline EntityMention Mention(const std::vector<std::string>& tokens, int start,
                             int end, const std::string& type,
                             std::optional<std::string> kb_id = std::nullopt) {
  EntityMention m;
  for (int i = start; i < end; ++i) {
    if (i > start) m.surface += " ";
    m.surface += tokens[i];
  }
  m.start = start;
  m.end = end;
  m.type_tag = type;
  m.kb_id = std::move(kb_id);
  return m;
}

// "Ann founded Acme ." with Ann as head and Acme as tail.
inline Instance SimpleInstance(const std::string& id = "s1",
                               const std::string& relation = "/org/founder") {
  Instance x;
  x.id = id;
  x.tokens = {"Ann", "founded", "Acme", "."};
  x.head = Mention(x.tokens, 0, 1, "PERSON", "/m/ann");
  x.tail = Mention(x.tokens, 2, 3, "ORG", "/m/acme");
  x.dep_heads = {1, -1, 1, 1};
  x.dep_labels = {"nsubj", "root", "obj", "punct"};
  x.relation = relation;
  return x;
}

// Small generated corpus: every instance has a valid tree.
inline SyntheticCorpus SmallCorpus(int train_bags, int test_bags, uint64_t seed,
                                   double noise = 0.0) {
  SyntheticConfig config;
  config.num_relations = 3;
  config.train_bags = train_bags;
  config.test_bags = test_bags;
  config.noise_rate = noise;
  config.seed = seed;
  return GenerateSynthetic(config).value();
}

// Fresh per-test scratch directory.
inline std::string ScratchDir(const std::string& name) {
  const ::testing::TestInfo* info =
      ::testing::UnitTest::GetInstance()->current_test_info();
  std::filesystem::path dir = std::filesystem::path(::testing::TempDir()) /
                              (std::string(info->test_suite_name()) + "." +
                               info->name() + "." + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace dsre::testing

#endif  // DSRE_TESTS_TESTING_FIXTURES_H_
