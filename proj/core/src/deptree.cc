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

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dsre {

std::vector<int> DepTree::PathToRoot(int node) const {
  std::vector<int> path;
  path.reserve(depth_[node] + 1);
  path.push_back(node);
  while (node != root_) {
    node = heads_[node];
    path.push_back(node);
  }
  return path;
}

absl::StatusOr<DepTree> ValidateTree(std::span<const int> heads,
                                     std::span<const std::string> labels) {
  const int n = static_cast<int>(heads.size());
  if (n == 0) return absl::InvalidArgumentError("empty dependency tree");
  if (!labels.empty() && static_cast<int>(labels.size()) != n) {
    return absl::InvalidArgumentError(
        absl::StrCat("dependency labels length ", labels.size(),
                     " does not match heads length ", n));
  }

  int root = -1;
  for (int i = 0; i < n; ++i) {
    const int h = heads[i];
    if (h == -1) {
      if (root != -1) {
        return absl::InvalidArgumentError(absl::StrCat(
            "multiple roots: tokens ", root, " and ", i));
      }
      root = i;
    } else if (h < 0 || h >= n) {
      return absl::InvalidArgumentError(absl::StrCat(
          "parent index ", h, " of token ", i, " out of range [0, ", n, ")"));
    } else if (h == i) {
      return absl::InvalidArgumentError(
          absl::StrCat("cycle: token ", i, " is its own parent"));
    }
  }
  if (root == -1) {
    return absl::InvalidArgumentError(
        "no root: every token has a parent, so the heads contain a cycle");
  }

  // Depths by memoized walks; state 1 marks nodes on the current walk.
  std::vector<int> depth(n, -1);
  std::vector<char> on_walk(n, 0);
  depth[root] = 0;
  std::vector<int> walk;
  for (int start = 0; start < n; ++start) {
    if (depth[start] >= 0) continue;
    walk.clear();
    int node = start;
    while (depth[node] < 0) {
      if (on_walk[node]) {
        return absl::InvalidArgumentError(
            absl::StrCat("cycle through token ", node));
      }
      on_walk[node] = 1;
      walk.push_back(node);
      node = heads[node];
    }
    int d = depth[node];
    for (auto it = walk.rbegin(); it != walk.rend(); ++it) {
      depth[*it] = ++d;
      on_walk[*it] = 0;
    }
  }

  DepTree tree;
  tree.heads_.assign(heads.begin(), heads.end());
  tree.labels_.assign(labels.begin(), labels.end());
  tree.depth_ = std::move(depth);
  tree.root_ = root;
  return tree;
}

int Lca(const DepTree& tree, int i, int j) {
  while (tree.depth(i) > tree.depth(j)) i = tree.parent(i);
  while (tree.depth(j) > tree.depth(i)) j = tree.parent(j);
  while (i != j) {
    i = tree.parent(i);
    j = tree.parent(j);
  }
  return i;
}

namespace {

// Appends the nodes from `node` up to (and including) `ancestor`.
void AppendUpTo(const DepTree& tree, int node, int ancestor,
                std::vector<int>* out) {
  out->push_back(node);
  while (node != ancestor) {
    node = tree.parent(node);
    out->push_back(node);
  }
}

TokenPath SortedUnique(std::vector<int> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

}  // namespace

TokenPath SubtreePath(const DepTree& tree, int head_anchor, int tail_anchor) {
  const int lca = Lca(tree, head_anchor, tail_anchor);
  std::vector<int> nodes;
  AppendUpTo(tree, head_anchor, lca, &nodes);
  AppendUpTo(tree, tail_anchor, lca, &nodes);
  nodes.push_back(tree.parent(lca));
  return SortedUnique(std::move(nodes));
}

TokenPath ShortestDependencyPath(const DepTree& tree, int head_anchor,
                                 int tail_anchor) {
  const int lca = Lca(tree, head_anchor, tail_anchor);
  std::vector<int> nodes;
  AppendUpTo(tree, head_anchor, lca, &nodes);
  AppendUpTo(tree, tail_anchor, lca, &nodes);
  return SortedUnique(std::move(nodes));
}

int EntityAnchor(const DepTree& tree, int start, int end) {
  int anchor = -1;
  int candidates = 0;
  for (int k = start; k < end; ++k) {
    const int p = tree.parent(k);
    const bool outside = k == tree.root() || p < start || p >= end;
    if (outside) {
      anchor = k;
      ++candidates;
    }
  }
  return candidates == 1 ? anchor : end - 1;
}

}  // namespace dsre
