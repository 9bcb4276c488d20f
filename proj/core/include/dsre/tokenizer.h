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

// Sub-word tokenizer compatible with the vocab.txt of cased BERT bundles,
// extended with task-specific atomic tokens.

#ifndef DSRE_TOKENIZER_H_
#define DSRE_TOKENIZER_H_

#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dsre/corpus.h"

namespace dsre {

// Marker strings for the structured input. The head/tail separators and the
// 18 entity-type markers are the tokens added on top of a pretrained vocab.
struct SpecialVocab {
  static constexpr char kPad[] = "[PAD]";
  static constexpr char kUnk[] = "[UNK]";
  static constexpr char kCls[] = "[CLS]";
  static constexpr char kSep[] = "[SEP]";
  static constexpr char kMask[] = "[MASK]";
  static constexpr char kHeadSep[] = "[H-SEP]";
  static constexpr char kTailSep[] = "[T-SEP]";

  // "[PERSON]", "[ORG]", ...
  static std::string TypeMarker(const std::string& type_tag);

  // [H-SEP], [T-SEP], then the 18 type markers in kEntityTypes order.
  static std::vector<std::string> AddedTokens();
};

class WordPieceTokenizer {
 public:
  WordPieceTokenizer() = default;
  explicit WordPieceTokenizer(std::vector<std::string> vocab);

  static absl::StatusOr<WordPieceTokenizer> FromFile(const std::string& path);
  absl::Status Save(const std::string& path) const;

  // Appends the added tokens that are not yet present and marks every added
  // token atomic. Returns how many rows were appended.
  int AddSpecialTokens(const std::vector<std::string>& tokens);

  // Sub-word ids for one pre-split word. Atomic tokens map to a single id;
  // other words are split on punctuation and then greedily matched
  // longest-prefix-first with "##" continuation pieces.
  std::vector<int> TokenizeWord(const std::string& word) const;

  int Id(const std::string& token) const;  // -1 when absent.
  bool Contains(const std::string& token) const { return Id(token) >= 0; }
  const std::string& Token(int id) const { return vocab_.at(id); }
  int size() const { return static_cast<int>(vocab_.size()); }

  int pad_id() const { return Id(SpecialVocab::kPad); }
  int unk_id() const { return Id(SpecialVocab::kUnk); }
  int cls_id() const { return Id(SpecialVocab::kCls); }
  int sep_id() const { return Id(SpecialVocab::kSep); }

  // True when every base marker and every added token is present.
  absl::Status CheckSpecialTokens() const;

  const std::vector<std::string>& vocab() const { return vocab_; }

 private:
  void WordPiece(const std::string& piece, std::vector<int>* ids) const;

  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> index_;
  std::unordered_map<std::string, int> atomic_;
};

// Builds a small vocabulary for test-scale models: the five base markers,
// every character seen (bare and "##"-prefixed), then every distinct word in
// `instances` in sorted order. Added tokens are not included.
std::vector<std::string> BuildVocabulary(const std::vector<Instance>& instances);

}  // namespace dsre

#endif  // DSRE_TOKENIZER_H_
