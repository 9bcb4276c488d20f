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

#include "dsre/tokenizer.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "absl/strings/str_cat.h"

namespace dsre {

namespace {

constexpr size_t kMaxCharsPerWord = 100;

bool IsContinuationByte(unsigned char c) { return (c & 0xC0) == 0x80; }

bool IsAsciiPunct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

// Splits a word on whitespace and ASCII punctuation; punctuation characters
// become pieces of their own.
std::vector<std::string> SplitPunctuation(const std::string& word) {
  std::vector<std::string> pieces;
  std::string current;
  for (unsigned char c : word) {
    if (c < 0x80 && std::isspace(c)) {
      if (!current.empty()) pieces.push_back(std::move(current));
      current.clear();
    } else if (IsAsciiPunct(c)) {
      if (!current.empty()) pieces.push_back(std::move(current));
      current.clear();
      pieces.emplace_back(1, static_cast<char>(c));
    } else {
      current.push_back(static_cast<char>(c));
    }
  }
  if (!current.empty()) pieces.push_back(std::move(current));
  return pieces;
}

std::vector<std::string> CodePoints(const std::string& s) {
  std::vector<std::string> out;
  for (size_t i = 0; i < s.size();) {
    size_t j = i + 1;
    while (j < s.size() && IsContinuationByte(s[j])) ++j;
    out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::string SpecialVocab::TypeMarker(const std::string& type_tag) {
  return absl::StrCat("[", type_tag, "]");
}

std::vector<std::string> SpecialVocab::AddedTokens() {
  std::vector<std::string> tokens = {kHeadSep, kTailSep};
  for (const char* type : kEntityTypes) tokens.push_back(TypeMarker(type));
  return tokens;
}

WordPieceTokenizer::WordPieceTokenizer(std::vector<std::string> vocab)
    : vocab_(std::move(vocab)) {
  for (int i = 0; i < static_cast<int>(vocab_.size()); ++i) {
    index_.emplace(vocab_[i], i);
  }
  for (const char* marker : {SpecialVocab::kPad, SpecialVocab::kUnk,
                             SpecialVocab::kCls, SpecialVocab::kSep,
                             SpecialVocab::kMask}) {
    if (int id = Id(marker); id >= 0) atomic_.emplace(marker, id);
  }
  for (const std::string& token : SpecialVocab::AddedTokens()) {
    if (int id = Id(token); id >= 0) atomic_.emplace(token, id);
  }
}

absl::StatusOr<WordPieceTokenizer> WordPieceTokenizer::FromFile(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open vocab ", path));
  std::vector<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.push_back(line);
  }
  if (vocab.empty()) {
    return absl::InvalidArgumentError(absl::StrCat("empty vocab ", path));
  }
  return WordPieceTokenizer(std::move(vocab));
}

absl::Status WordPieceTokenizer::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  for (const std::string& token : vocab_) out << token << '\n';
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

int WordPieceTokenizer::AddSpecialTokens(
    const std::vector<std::string>& tokens) {
  int appended = 0;
  for (const std::string& token : tokens) {
    int id = Id(token);
    if (id < 0) {
      id = size();
      vocab_.push_back(token);
      index_.emplace(token, id);
      ++appended;
    }
    atomic_[token] = id;
  }
  return appended;
}

int WordPieceTokenizer::Id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : it->second;
}

std::vector<int> WordPieceTokenizer::TokenizeWord(
    const std::string& word) const {
  if (auto it = atomic_.find(word); it != atomic_.end()) return {it->second};
  std::vector<int> ids;
  for (const std::string& piece : SplitPunctuation(word)) {
    WordPiece(piece, &ids);
  }
  if (ids.empty()) ids.push_back(unk_id());
  return ids;
}

void WordPieceTokenizer::WordPiece(const std::string& piece,
                                   std::vector<int>* ids) const {
  if (piece.size() > kMaxCharsPerWord) {
    ids->push_back(unk_id());
    return;
  }
  std::vector<int> out;
  size_t start = 0;
  while (start < piece.size()) {
    size_t end = piece.size();
    int found = -1;
    while (end > start) {
      std::string candidate = piece.substr(start, end - start);
      if (start > 0) candidate.insert(0, "##");
      if (int id = Id(candidate); id >= 0) {
        found = id;
        break;
      }
      do {
        --end;
      } while (end > start && IsContinuationByte(piece[end]));
    }
    if (found < 0) {
      ids->push_back(unk_id());
      return;
    }
    out.push_back(found);
    start = end;
  }
  ids->insert(ids->end(), out.begin(), out.end());
}

absl::Status WordPieceTokenizer::CheckSpecialTokens() const {
  std::vector<std::string> required = {SpecialVocab::kPad, SpecialVocab::kUnk,
                                       SpecialVocab::kCls, SpecialVocab::kSep};
  for (const std::string& token : SpecialVocab::AddedTokens()) {
    required.push_back(token);
  }
  for (const std::string& token : required) {
    if (!Contains(token)) {
      return absl::FailedPreconditionError(
          absl::StrCat("vocabulary lacks special token ", token));
    }
  }
  return absl::OkStatus();
}

std::vector<std::string> BuildVocabulary(
    const std::vector<Instance>& instances) {
  std::set<std::string> chars;
  std::set<std::string> words;
  for (const Instance& instance : instances) {
    for (const std::string& token : instance.tokens) {
      for (const std::string& piece : SplitPunctuation(token)) {
        words.insert(piece);
        for (std::string& cp : CodePoints(piece)) chars.insert(std::move(cp));
      }
    }
  }
  std::vector<std::string> vocab = {SpecialVocab::kPad, SpecialVocab::kUnk,
                                    SpecialVocab::kCls, SpecialVocab::kSep,
                                    SpecialVocab::kMask};
  std::set<std::string> seen(vocab.begin(), vocab.end());
  auto add = [&](const std::string& token) {
    if (seen.insert(token).second) vocab.push_back(token);
  };
  for (const std::string& c : chars) add(c);
  for (const std::string& c : chars) add("##" + c);
  for (const std::string& w : words) add(w);
  return vocab;
}

}  // namespace dsre
