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


#include "dsre/deptree.h"

#include <algorithm>
#include <random>
#include <set>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/fixtures.h"

namespace dsre {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

DepTree Tree(std::vector<int> heads) {
  absl::StatusOr<DepTree> tree = ValidateTree(heads);
  EXPECT_TRUE(tree.ok()) << tree.status();
  return *std::move(tree);
}

// Root path by walking parents directly on the head array.
std::vector<int> RootPath(const std::vector<int>& heads, int node) {
  std::vector<int> path = {node};
  while (heads[node] >= 0) {
    node = heads[node];
    path.push_back(node);
  }
  return path;
}

int OracleLca(const std::vector<int>& heads, int i, int j) {
  std::vector<int> pi = RootPath(heads, i);
  std::set<int> pj_set;
  for (int n : RootPath(heads, j)) pj_set.insert(n);
  for (int n : pi) {
    if (pj_set.count(n)) return n;
  }
  return -1;
}

std::set<int> OracleStp(const std::vector<int>& heads, int i, int j) {
  const int lca = OracleLca(heads, i, j);
  std::set<int> out;
  for (int start : {i, j}) {
    for (int n : RootPath(heads, start)) {
      out.insert(n);
      if (n == lca) break;
    }
  }
  out.insert(heads[lca] >= 0 ? heads[lca] : lca);
  return out;
}

TEST(ValidateTreeTest, SingleNode) {
  DepTree t = Tree({-1});
  EXPECT_EQ(t.size(), 1);
  EXPECT_EQ(t.root(), 0);
}

TEST(ValidateTreeTest, MutualParentsIsCycle) {
  absl::StatusOr<DepTree> t = ValidateTree(std::vector<int>{1, 0});
  ASSERT_FALSE(t.ok());
  EXPECT_THAT(std::string(t.status().message()), HasSubstr("cycle"));
}

TEST(ValidateTreeTest, ValidFourNodes) {
  DepTree t = Tree({1, -1, 1, 2});
  EXPECT_EQ(t.root(), 1);
  EXPECT_EQ(t.depth(3), 2);
  EXPECT_THAT(t.PathToRoot(3), ElementsAre(3, 2, 1));
}

TEST(ValidateTreeTest, NamesEachViolation) {
  auto message = [](std::vector<int> heads) {
    return std::string(ValidateTree(heads).status().message());
  };
  EXPECT_THAT(message({0, -1}), HasSubstr("own parent"));
  EXPECT_THAT(message({1, 2, 0}), HasSubstr("no root"));
  EXPECT_THAT(message({-1, -1}), HasSubstr("root"));
  EXPECT_THAT(message({-1, 7}), HasSubstr("range"));
  EXPECT_THAT(message({-1, 2, 3, 1}), HasSubstr("cycle"));
  EXPECT_FALSE(ValidateTree(std::vector<int>{}).ok());
}

TEST(ValidateTreeTest, LabelLengthMustMatch) {
  std::vector<int> heads = {-1, 0};
  std::vector<std::string> labels = {"root"};
  EXPECT_FALSE(ValidateTree(heads, labels).ok());
}

TEST(ValidateTreeTest, RandomHeadArraysMatchWalkOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    std::uniform_int_distribution<int> size(1, 8);
    const int n = size(rng);
    std::uniform_int_distribution<int> parent(-1, n - 1);
    std::vector<int> heads(n);
    for (int& h : heads) h = parent(rng);
    // Oracle: one root, and every walk reaches it within n steps.
    bool valid = std::count(heads.begin(), heads.end(), -1) == 1;
    for (int i = 0; valid && i < n; ++i) {
      int node = i;
      int steps = 0;
      while (heads[node] >= 0 && steps <= n) {
        node = heads[node];
        ++steps;
      }
      valid = steps <= n;
    }
    EXPECT_EQ(ValidateTree(heads).ok(), valid) << ::testing::PrintToString(heads);
  }
}

TEST(LcaTest, Reflexive) {
  DepTree t = Tree({1, -1, 1, 2});
  for (int k = 0; k < t.size(); ++k) EXPECT_EQ(Lca(t, k, k), k);
}

TEST(LcaTest, AncestorInChain) {
  DepTree t = Tree({-1, 0, 1});
  EXPECT_EQ(Lca(t, 1, 2), 1);
}

TEST(LcaTest, StarSiblings) {
  DepTree t = Tree({-1, 0, 0, 0});
  EXPECT_EQ(Lca(t, 2, 3), 0);
}

// "James 's girlfriend gave birth to son".
const std::vector<int> kBirthHeads = {2, 0, 3, -1, 3, 6, 4};

TEST(SubtreePathTest, ParentIsRootDegenerate) {
  // Tail is the head's parent and the root.
  DepTree t = Tree({1, -1});
  EXPECT_THAT(SubtreePath(t, 0, 1), ElementsAre(0, 1));
}

TEST(SubtreePathTest, IncludesParentOfLcaBelowRoot) {
  DepTree t = Tree(kBirthHeads);
  // lca(James, 's) = James, whose parent is "girlfriend".
  EXPECT_THAT(SubtreePath(t, 0, 1), ElementsAre(0, 1, 2));
  // lca(to, son) = son, whose parent is "birth".
  EXPECT_THAT(SubtreePath(t, 5, 6), ElementsAre(4, 5, 6));
  // LCA is the root.
  EXPECT_THAT(SubtreePath(t, 0, 6), ElementsAre(0, 2, 3, 4, 6));
  for (auto [i, j] : {std::pair{0, 1}, std::pair{5, 6}, std::pair{0, 6}}) {
    TokenPath p = SubtreePath(t, i, j);
    EXPECT_EQ(std::set<int>(p.begin(), p.end()), OracleStp(kBirthHeads, i, j));
  }
}

TEST(SubtreePathTest, EqualAnchors) {
  DepTree t = Tree(kBirthHeads);
  EXPECT_THAT(SubtreePath(t, 6, 6), ElementsAre(4, 6));
  EXPECT_THAT(SubtreePath(t, 3, 3), ElementsAre(3));
}

TEST(ShortestDependencyPathTest, Examples) {
  DepTree chain = Tree({-1, 0, 1});
  EXPECT_THAT(ShortestDependencyPath(chain, 0, 2), ElementsAre(0, 1, 2));
  EXPECT_THAT(ShortestDependencyPath(chain, 1, 1), ElementsAre(1));
  DepTree t = Tree(kBirthHeads);
  EXPECT_THAT(ShortestDependencyPath(t, 0, 6), ElementsAre(0, 2, 3, 4, 6));
  EXPECT_THAT(ShortestDependencyPath(t, 5, 6), ElementsAre(5, 6));
}

TEST(DepTreePropertyTest, ThousandRandomTrees) {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<int> size(1, 30);
    const int n = size(rng);
    const std::vector<int> heads = testing::RandomHeads(n, &rng);
    DepTree t = Tree(heads);
    std::uniform_int_distribution<int> node(0, n - 1);
    const int i = node(rng);
    const int j = node(rng);

    EXPECT_EQ(Lca(t, i, j), Lca(t, j, i));
    EXPECT_EQ(Lca(t, i, j), OracleLca(heads, i, j));

    const TokenPath stp = SubtreePath(t, i, j);
    const TokenPath sdp = ShortestDependencyPath(t, i, j);
    ASSERT_FALSE(stp.empty());
    EXPECT_TRUE(std::is_sorted(stp.begin(), stp.end()));
    EXPECT_TRUE(std::adjacent_find(stp.begin(), stp.end()) == stp.end());
    EXPECT_TRUE(std::binary_search(stp.begin(), stp.end(), i));
    EXPECT_TRUE(std::binary_search(stp.begin(), stp.end(), j));
    EXPECT_TRUE(std::includes(stp.begin(), stp.end(), sdp.begin(), sdp.end()));
    EXPECT_LE(static_cast<int>(stp.size()), t.depth(i) + t.depth(j) + 2);
    EXPECT_EQ(std::set<int>(stp.begin(), stp.end()), OracleStp(heads, i, j));
    for (int k : stp) {
      EXPECT_GE(k, 0);
      EXPECT_LT(k, n);
    }
  }
}

TEST(EntityAnchorTest, SingleToken) {
  DepTree t = Tree(kBirthHeads);
  EXPECT_EQ(EntityAnchor(t, 4, 5), 4);
}

TEST(EntityAnchorTest, SyntacticHeadOfSpan) {
  // Token 1 attaches to 2, whose parent (0) lies outside the span.
  DepTree t = Tree({-1, 2, 0});
  EXPECT_EQ(EntityAnchor(t, 1, 3), 2);
}

TEST(EntityAnchorTest, NoUniqueHeadFallsBackToLast) {
  // Two tokens with parents outside the span.
  DepTree siblings = Tree({-1, 0, 0});
  EXPECT_EQ(EntityAnchor(siblings, 1, 3), 2);
  // A span holding the root is headed by the root.
  DepTree chain = Tree({1, -1, 1});
  EXPECT_EQ(EntityAnchor(chain, 0, 2), 1);
}

}  // namespace
}  // namespace dsre
