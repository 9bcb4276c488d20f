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

// The complete bag classifier: tokenizer, encoder, relation head and bag
// encoder, with checkpoint I/O.

#ifndef DSRE_MODEL_H_
#define DSRE_MODEL_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dsre/bag_encoder.h"
#include "dsre/corpus.h"
#include "dsre/encoder.h"
#include "dsre/sentence_repr.h"
#include "dsre/structured_input.h"
#include "dsre/tokenizer.h"
#include "nlohmann/json.hpp"

namespace dsre {

struct ModelOptions {
  InputOptions input;
  Ablation ablation = Ablation::kFull;
  double dropout = 0.4;

  nlohmann::json ToJson() const;
  static absl::StatusOr<ModelOptions> FromJson(const nlohmann::json& j);
};

// Sets the input path mode implied by `ablation` (SDP for kSdpInput).
ModelOptions WithAblation(ModelOptions options, Ablation ablation);

class RelationExtractor {
 public:
  RelationExtractor(const EncoderConfig& config, WordPieceTokenizer tokenizer,
                    RelationVocab relations, const ModelOptions& options);
  RelationExtractor(TransformerEncoder encoder, WordPieceTokenizer tokenizer,
                    RelationVocab relations, const ModelOptions& options);

  // Test-scale model whose vocabulary is built from `instances`. `config`
  // supplies everything except vocab_size.
  static absl::StatusOr<RelationExtractor> CreateTiny(
      const std::vector<Instance>& instances, RelationVocab relations,
      const ModelOptions& options, const EncoderConfig& config, uint64_t seed);

  // Encoder and tokenizer from a bundle directory; fresh heads.
  static absl::StatusOr<RelationExtractor> CreatePretrained(
      const std::string& bundle_dir, RelationVocab relations,
      const ModelOptions& options, uint64_t seed);

  // N(0, 0.02) for the relation head and bag encoder.
  void InitializeHeads(std::mt19937_64* rng);

  // Marks the last k encoder layers, the added rows and all heads trainable.
  TrainablePartition SetFineTuneLayers(int k);

  absl::StatusOr<StructuredInput> Prepare(const Instance& instance) const;

  struct SentenceOutput {
    TokenStates states;
    SentenceRepr repr;
  };
  // Encoder dropout is active only when `rng` is given.
  absl::StatusOr<SentenceOutput> EncodeSentence(const StructuredInput& input,
                                                EncoderCache* cache = nullptr,
                                                std::mt19937_64* rng = nullptr) const;

  // Relation probabilities for one bag (inference mode, no dropout).
  absl::StatusOr<Eigen::VectorXd> PredictBag(
      const std::vector<const StructuredInput*>& inputs) const;

  // Forward and backward for the loss term -coef * log p(gold | bag), with
  // dropout drawn from `rng`. Returns -log p(gold).
  absl::StatusOr<double> AccumulateBagGradient(
      const std::vector<const StructuredInput*>& inputs, int gold, double coef,
      std::mt19937_64* rng);

  ParameterList Parameters();
  ParameterList HeadParameters();

  // Writes model.safetensors, vocab.txt, relations.json and model_config.json.
  absl::Status Save(const std::string& dir) const;
  static absl::StatusOr<RelationExtractor> Load(const std::string& dir);

  const TransformerEncoder& encoder() const { return encoder_; }
  TransformerEncoder& encoder() { return encoder_; }
  const WordPieceTokenizer& tokenizer() const { return tokenizer_; }
  const RelationVocab& relations() const { return relations_; }
  const ModelOptions& options() const { return options_; }
  RelationHead& head() { return head_; }
  BagEncoderParams& bag_encoder() { return bag_; }
  int repr_dim() const { return bag_.repr_dim(); }

 private:
  TransformerEncoder encoder_;
  WordPieceTokenizer tokenizer_;
  RelationVocab relations_;
  ModelOptions options_;
  RelationHead head_;
  BagEncoderParams bag_;
};

}  // namespace dsre

#endif  // DSRE_MODEL_H_
