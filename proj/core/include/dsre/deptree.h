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

// Dependency-tree algorithms over sentence tokens: validation, least common
// ancestor, and the two entity-connecting token paths (sub-tree path and
// shortest dependency path).

#ifndef DSRE_DEPTREE_H_
#define DSRE_DEPTREE_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace dsre {

// A validated dependency tree. Construct through ValidateTree().
class DepTree {
 public:
  int size() const { return static_cast<int>(heads_.size()); }
  int root() const { return root_; }

  // Parent of `node`; the root is its own parent.
  int parent(int node) const { return node == root_ ? root_ : heads_[node]; }
  int depth(int node) const { return depth_[node]; }
  const std::vector<int>& heads() const { return heads_; }
  const std::vector<std::string>& labels() const { return labels_; }

  // Nodes from `node` up to and including the root.
  std::vector<int> PathToRoot(int node) const;

 private:
  friend absl::StatusOr<DepTree> ValidateTree(std::span<const int>,
                                              std::span<const std::string>);
  std::vector<int> heads_;
  std::vector<std::string> labels_;
  std::vector<int> depth_;
  int root_ = 0;
};

// Validates a head array (root marked -1). Fails on zero or multiple roots,
// out-of-range parents, and cycles; the error message names the violation.
// `labels` may be empty, otherwise it must match `heads` in length.
absl::StatusOr<DepTree> ValidateTree(std::span<const int> heads,
                                     std::span<const std::string> labels = {});

// Token indices, strictly increasing (original sentence order).
using TokenPath = std::vector<int>;

// Deepest node that lies on both root paths.
int Lca(const DepTree& tree, int i, int j);

// Sub-tree path: both anchor-to-LCA paths plus the LCA's parent, sorted.
TokenPath SubtreePath(const DepTree& tree, int head_anchor, int tail_anchor);

// Shortest dependency path: both anchor-to-LCA paths, sorted.
TokenPath ShortestDependencyPath(const DepTree& tree, int head_anchor,
                                 int tail_anchor);

// Syntactic head of the half-open span [start, end): the unique token whose
// parent lies outside the span. Falls back to the last token when there is
// no unique such token.
int EntityAnchor(const DepTree& tree, int start, int end);

}  // namespace dsre

#endif  // DSRE_DEPTREE_H_
