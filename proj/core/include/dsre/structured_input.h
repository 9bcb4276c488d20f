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

// The encoder input for one sentence:
//
//   [CLS] <head-type> head words [H-SEP] <tail-type> tail words [T-SEP]
//   path words [SEP]
//
// where the path is the sub-tree path (default), the shortest dependency
// path, or the whole sentence. Entity masks mark the sub-words of entity
// occurrences inside the path region.

#ifndef DSRE_STRUCTURED_INPUT_H_
#define DSRE_STRUCTURED_INPUT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dsre/corpus.h"
#include "dsre/deptree.h"
#include "dsre/tokenizer.h"

namespace dsre {

enum class PathMode { kStp, kSdp, kFull };

const char* PathModeName(PathMode mode);
absl::StatusOr<PathMode> ParsePathMode(const std::string& name);

enum class WordRole {
  kCls,
  kHeadType,
  kHeadWord,
  kHeadSep,
  kTailType,
  kTailWord,
  kTailSep,
  kPath,
  kSep,
};

struct MarkedWord {
  std::string text;
  WordRole role = WordRole::kPath;
  // Sentence token index for path words, -1 otherwise.
  int source_index = -1;
  bool head_occurrence = false;
  bool tail_occurrence = false;
};

struct MarkedSequence {
  std::vector<MarkedWord> words;

  std::vector<std::string> Texts() const;
};

// Head and tail anchors plus the path selected by `mode`.
absl::StatusOr<TokenPath> SelectPath(const Instance& instance, PathMode mode);

// Lays out the marker-annotated word sequence for `path`. Path words that
// fall inside an entity span, or that start a repeated occurrence of the
// entity surface, are flagged as occurrences; head claims first so the two
// flags never overlap. Fails on an empty path.
absl::StatusOr<MarkedSequence> BuildSequence(const Instance& instance,
                                             const TokenPath& path,
                                             bool use_entity_types);

struct StructuredInput {
  std::vector<int> token_ids;
  std::vector<int> position_ids;
  // 1 at sub-words of head (tail) occurrences.
  std::vector<uint8_t> head_mask;
  std::vector<uint8_t> tail_mask;
  // 1 for real tokens, 0 for padding.
  std::vector<uint8_t> padding_mask;
  // Half-open sub-word interval holding the path words.
  int region_begin = 0;
  int region_end = 0;
  // Set when an entity has no occurrence in the region and its mask falls
  // back to the header-segment sub-words.
  bool head_fallback = false;
  bool tail_fallback = false;
  // Sub-word strings per position, for inspection output.
  std::vector<std::string> pieces;
  // Sentence token index behind each position; -1 for markers, header words
  // and padding.
  std::vector<int> source_index;

  int length() const { return static_cast<int>(token_ids.size()); }
  int num_real() const;
};

// Converts words to sub-word ids. Over-length inputs drop whole path words
// from the end; [CLS], the entity header segments and [SEP] always survive.
// Fails when the header segments alone do not fit in `max_seq_length`.
absl::StatusOr<StructuredInput> Tokenize(const MarkedSequence& sequence,
                                         const WordPieceTokenizer& tokenizer,
                                         int max_seq_length);

// Extends with padding up to `length` (no-op when already that long).
void PadTo(int length, int pad_id, StructuredInput* input);

struct InputOptions {
  PathMode path_mode = PathMode::kStp;
  bool use_entity_types = true;
  int max_seq_length = 64;
};

// SelectPath + BuildSequence + Tokenize.
absl::StatusOr<StructuredInput> PrepareInput(const Instance& instance,
                                             const WordPieceTokenizer& tokenizer,
                                             const InputOptions& options);

}  // namespace dsre

#endif  // DSRE_STRUCTURED_INPUT_H_
