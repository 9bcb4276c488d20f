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

#include "dsre/structured_input.h"

#include <algorithm>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dsre {

const char* PathModeName(PathMode mode) {
  switch (mode) {
    case PathMode::kStp:
      return "stp";
    case PathMode::kSdp:
      return "sdp";
    case PathMode::kFull:
      return "full";
  }
  return "?";
}

absl::StatusOr<PathMode> ParsePathMode(const std::string& name) {
  if (name == "stp") return PathMode::kStp;
  if (name == "sdp") return PathMode::kSdp;
  if (name == "full") return PathMode::kFull;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown path mode '", name, "' (expected stp|sdp|full)"));
}

std::vector<std::string> MarkedSequence::Texts() const {
  std::vector<std::string> texts;
  texts.reserve(words.size());
  for (const MarkedWord& w : words) texts.push_back(w.text);
  return texts;
}

absl::StatusOr<TokenPath> SelectPath(const Instance& instance, PathMode mode) {
  if (mode == PathMode::kFull) {
    TokenPath all(instance.tokens.size());
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  absl::StatusOr<DepTree> tree = ValidateTree(instance.dep_heads);
  if (!tree.ok()) return tree.status();
  const int head = EntityAnchor(*tree, instance.head.start, instance.head.end);
  const int tail = EntityAnchor(*tree, instance.tail.start, instance.tail.end);
  return mode == PathMode::kStp ? SubtreePath(*tree, head, tail)
                                : ShortestDependencyPath(*tree, head, tail);
}

namespace {

bool InSpan(int index, const EntityMention& m) {
  return index >= m.start && index < m.end;
}

// Flags runs of path words equal to the mention's surface tokens.
void MarkSurfaceRuns(const Instance& instance, const EntityMention& mention,
                     bool head, std::vector<MarkedWord>* path_words) {
  const std::vector<std::string> surface(
      instance.tokens.begin() + mention.start,
      instance.tokens.begin() + mention.end);
  const size_t n = surface.size();
  std::vector<MarkedWord>& words = *path_words;
  for (size_t i = 0; i + n <= words.size(); ++i) {
    bool match = true;
    for (size_t k = 0; k < n && match; ++k) {
      const MarkedWord& w = words[i + k];
      match = w.text == surface[k] && !w.head_occurrence && !w.tail_occurrence;
    }
    if (!match) continue;
    for (size_t k = 0; k < n; ++k) {
      (head ? words[i + k].head_occurrence : words[i + k].tail_occurrence) =
          true;
    }
    i += n - 1;
  }
}

}  // namespace

absl::StatusOr<MarkedSequence> BuildSequence(const Instance& instance,
                                             const TokenPath& path,
                                             bool use_entity_types) {
  if (path.empty()) return absl::InvalidArgumentError("empty token path");
  const int n = static_cast<int>(instance.tokens.size());
  for (size_t k = 0; k < path.size(); ++k) {
    if (path[k] < 0 || path[k] >= n || (k > 0 && path[k] <= path[k - 1])) {
      return absl::InvalidArgumentError(
          "token path must be strictly increasing sentence indices");
    }
  }

  MarkedSequence seq;
  auto push = [&seq](std::string text, WordRole role) {
    MarkedWord w;
    w.text = std::move(text);
    w.role = role;
    seq.words.push_back(std::move(w));
  };
  push(SpecialVocab::kCls, WordRole::kCls);
  if (use_entity_types) {
    push(SpecialVocab::TypeMarker(instance.head.type_tag), WordRole::kHeadType);
  }
  for (int i = instance.head.start; i < instance.head.end; ++i) {
    push(instance.tokens[i], WordRole::kHeadWord);
  }
  push(SpecialVocab::kHeadSep, WordRole::kHeadSep);
  if (use_entity_types) {
    push(SpecialVocab::TypeMarker(instance.tail.type_tag), WordRole::kTailType);
  }
  for (int i = instance.tail.start; i < instance.tail.end; ++i) {
    push(instance.tokens[i], WordRole::kTailWord);
  }
  push(SpecialVocab::kTailSep, WordRole::kTailSep);

  std::vector<MarkedWord> path_words;
  for (int index : path) {
    MarkedWord w;
    w.text = instance.tokens[index];
    w.role = WordRole::kPath;
    w.source_index = index;
    w.head_occurrence = InSpan(index, instance.head);
    w.tail_occurrence = InSpan(index, instance.tail);
    path_words.push_back(std::move(w));
  }
  MarkSurfaceRuns(instance, instance.head, /*head=*/true, &path_words);
  MarkSurfaceRuns(instance, instance.tail, /*head=*/false, &path_words);
  seq.words.insert(seq.words.end(), path_words.begin(), path_words.end());
  push(SpecialVocab::kSep, WordRole::kSep);
  return seq;
}

int StructuredInput::num_real() const {
  return static_cast<int>(
      std::count(padding_mask.begin(), padding_mask.end(), uint8_t{1}));
}

absl::StatusOr<StructuredInput> Tokenize(const MarkedSequence& sequence,
                                         const WordPieceTokenizer& tokenizer,
                                         int max_seq_length) {
  const auto& words = sequence.words;
  if (words.empty() || words.front().role != WordRole::kCls ||
      words.back().role != WordRole::kSep) {
    return absl::InvalidArgumentError(
        "sequence must start with [CLS] and end with [SEP]");
  }
  std::vector<std::vector<int>> ids(words.size());
  for (size_t i = 0; i < words.size(); ++i) {
    ids[i] = tokenizer.TokenizeWord(words[i].text);
  }

  size_t first_path = 0;
  while (first_path < words.size() && words[first_path].role != WordRole::kPath &&
         words[first_path].role != WordRole::kSep) {
    ++first_path;
  }
  const size_t sep_index = words.size() - 1;
  int prefix = 0;
  for (size_t i = 0; i < first_path; ++i) prefix += ids[i].size();
  const int sep_len = ids[sep_index].size();
  if (prefix + sep_len > max_seq_length) {
    return absl::InvalidArgumentError(absl::StrCat(
        "entity header segments need ", prefix + sep_len,
        " sub-words, more than max_seq_length ", max_seq_length));
  }
  // Keep path words while they fit.
  size_t path_end = first_path;
  int used = prefix + sep_len;
  while (path_end < sep_index &&
         used + static_cast<int>(ids[path_end].size()) <= max_seq_length) {
    used += ids[path_end].size();
    ++path_end;
  }

  StructuredInput input;
  std::vector<size_t> kept;
  for (size_t i = 0; i < path_end; ++i) kept.push_back(i);
  kept.push_back(sep_index);

  bool head_in_region = false;
  bool tail_in_region = false;
  for (size_t i = first_path; i < path_end; ++i) {
    head_in_region |= words[i].head_occurrence;
    tail_in_region |= words[i].tail_occurrence;
  }
  input.head_fallback = !head_in_region;
  input.tail_fallback = !tail_in_region;

  for (size_t i : kept) {
    const MarkedWord& w = words[i];
    if (i == first_path && i < path_end) input.region_begin = input.length();
    if (i == sep_index) {
      input.region_end = input.length();
      if (path_end == first_path) input.region_begin = input.length();
    }
    const bool in_region = i >= first_path && i < path_end;
    const bool head = in_region ? w.head_occurrence
                                : input.head_fallback && w.role == WordRole::kHeadWord;
    const bool tail = in_region ? w.tail_occurrence
                                : input.tail_fallback && w.role == WordRole::kTailWord;
    for (int id : ids[i]) {
      input.position_ids.push_back(input.length());
      input.token_ids.push_back(id);
      input.pieces.push_back(tokenizer.Token(id));
      input.source_index.push_back(in_region ? w.source_index : -1);
      input.head_mask.push_back(head ? 1 : 0);
      input.tail_mask.push_back(tail ? 1 : 0);
      input.padding_mask.push_back(1);
    }
  }
  return input;
}

void PadTo(int length, int pad_id, StructuredInput* input) {
  while (input->length() < length) {
    input->position_ids.push_back(input->length());
    input->token_ids.push_back(pad_id);
    input->pieces.push_back(SpecialVocab::kPad);
    input->source_index.push_back(-1);
    input->head_mask.push_back(0);
    input->tail_mask.push_back(0);
    input->padding_mask.push_back(0);
  }
}

absl::StatusOr<StructuredInput> PrepareInput(const Instance& instance,
                                             const WordPieceTokenizer& tokenizer,
                                             const InputOptions& options) {
  absl::StatusOr<TokenPath> path = SelectPath(instance, options.path_mode);
  if (!path.ok()) return path.status();
  absl::StatusOr<MarkedSequence> seq =
      BuildSequence(instance, *path, options.use_entity_types);
  if (!seq.ok()) return seq.status();
  return Tokenize(*seq, tokenizer, options.max_seq_length);
}

}  // namespace dsre
