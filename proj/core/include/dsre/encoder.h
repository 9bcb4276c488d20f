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

// Bidirectional transformer encoder (post-layer-norm, BERT layout) with an
// explicit backward pass. Parameter names follow the public BERT checkpoint
// layout so pretrained bundles load directly.

#ifndef DSRE_ENCODER_H_
#define DSRE_ENCODER_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dsre/parameter.h"
#include "dsre/safetensors.h"
#include "dsre/structured_input.h"
#include "dsre/tokenizer.h"
#include "nlohmann/json.hpp"

namespace dsre {

struct EncoderConfig {
  int num_layers = 2;
  int num_heads = 2;
  int hidden_dim = 32;
  int intermediate_dim = 128;
  int vocab_size = 0;
  int max_positions = 64;
  int fine_tune_last_k = 2;
  double layer_norm_eps = 1e-12;
  // Training-time dropout on the embedding output and both sublayer outputs,
  // and on self-attention probabilities.
  double hidden_dropout = 0.1;
  double attention_dropout = 0.1;

  // 2 layers, 2 heads, d_h = 32, 64 positions; everything trainable.
  static EncoderConfig Tiny(int vocab_size);
  // 12 layers, 12 heads, d_h = 768; the last 4 layers fine-tuned.
  static EncoderConfig BertBase(int vocab_size);

  absl::Status Validate() const;
  nlohmann::json ToJson() const;
  static absl::StatusOr<EncoderConfig> FromJson(const nlohmann::json& j);
  // Reads the public config.json layout (num_hidden_layers, hidden_size...).
  static absl::StatusOr<EncoderConfig> FromBertConfig(const nlohmann::json& j);
};

// Final-layer hidden states h_L, one row per position.
struct TokenStates {
  Eigen::MatrixXd hidden;
  // 1 for real tokens; rows where this is 0 carry no meaning downstream.
  std::vector<uint8_t> valid;

  int length() const { return static_cast<int>(hidden.rows()); }
};

struct LayerCache {
  Eigen::MatrixXd input;
  Eigen::MatrixXd q, k, v;
  std::vector<Eigen::MatrixXd> probs;  // one [T x T] per head
  // Inverted-dropout scales (0 or 1/(1-p)); empty when dropout is off.
  std::vector<Eigen::MatrixXd> probs_mask;
  Eigen::MatrixXd attn_mask;
  Eigen::MatrixXd ffn_mask;
  Eigen::MatrixXd context;
  Eigen::MatrixXd attn_xhat;
  Eigen::VectorXd attn_rstd;
  Eigen::MatrixXd attn_out;  // after the first layer norm
  Eigen::MatrixXd inter_pre;
  Eigen::MatrixXd inter_act;
  Eigen::MatrixXd out_xhat;
  Eigen::VectorXd out_rstd;
};

struct EncoderCache {
  std::vector<int> token_ids;
  std::vector<uint8_t> valid;
  Eigen::MatrixXd emb_xhat;
  Eigen::VectorXd emb_rstd;
  Eigen::MatrixXd emb_mask;
  std::vector<LayerCache> layers;
};

class TransformerEncoder {
 public:
  explicit TransformerEncoder(const EncoderConfig& config);

  const EncoderConfig& config() const { return config_; }
  void set_fine_tune_last_k(int k) { config_.fine_tune_last_k = k; }

  // N(0, stddev) weights, zero biases, unit layer-norm gains.
  void InitializeRandom(std::mt19937_64* rng, double stddev = 0.02);

  // h_0[t] = token_embedding[id_t] + position_embedding[t].
  absl::StatusOr<Eigen::MatrixXd> Embed(const StructuredInput& input) const;

  // Embedding layer norm followed by num_layers transformer layers. Padded
  // positions are excluded as attention keys. Fills `cache` for Backward().
  // Dropout is applied only when `rng` is given.
  absl::StatusOr<TokenStates> Encode(const StructuredInput& input,
                                     EncoderCache* cache = nullptr,
                                     std::mt19937_64* rng = nullptr) const;

  // Accumulates parameter gradients given dLoss/dh_L. Frozen parameters and
  // frozen rows receive nothing.
  void Backward(const Eigen::MatrixXd& d_hidden, const EncoderCache& cache);

  ParameterList Parameters();
  ParameterList LayerParameters(int layer);
  ParameterList EmbeddingParameters();

  Parameter& word_embeddings() { return word_embeddings_; }
  const Parameter& word_embeddings() const { return word_embeddings_; }
  Parameter& position_embeddings() { return position_embeddings_; }

  // Rows of the token table from this index on are the added special tokens.
  int num_base_tokens() const { return num_base_tokens_; }
  void set_num_base_tokens(int n) { num_base_tokens_ = n; }

  // Appends `rows` token-embedding rows drawn from N(mean, std) of the
  // existing table; grows vocab_size accordingly.
  void ExtendVocabulary(int rows, std::mt19937_64* rng);

 private:
  struct Layer {
    Parameter query_w, query_b, key_w, key_b, value_w, value_b;
    Parameter attn_out_w, attn_out_b, attn_ln_g, attn_ln_b;
    Parameter inter_w, inter_b, out_w, out_b, out_ln_g, out_ln_b;
  };

  absl::Status LayerForward(const Layer& layer, int index,
                            const std::vector<uint8_t>& valid,
                            std::mt19937_64* rng, Eigen::MatrixXd* x,
                            LayerCache* cache) const;
  Eigen::MatrixXd LayerBackward(Layer& layer, const LayerCache& cache,
                                const Eigen::MatrixXd& d_out);

  EncoderConfig config_;
  int num_base_tokens_ = 0;
  Parameter word_embeddings_;
  Parameter position_embeddings_;
  Parameter emb_ln_g_, emb_ln_b_;
  std::vector<Layer> layers_;
};

// Which parameters train under "fine-tune the last k layers": the last k
// transformer layers, the task heads, and the added token rows. With
// k == num_layers the whole encoder trains.
struct TrainablePartition {
  std::vector<std::string> trainable;
  std::vector<std::string> frozen;
};

TrainablePartition ApplyTrainableMask(TransformerEncoder* encoder, int k);

struct PretrainedEncoder {
  TransformerEncoder encoder;
  WordPieceTokenizer tokenizer;
  std::string bundle_sha256;
  int added_rows = 0;
};

// Loads a bundle directory: config.json, vocab.txt and model.safetensors in
// the public BERT layout (an optional "bert." name prefix is accepted). Token
// type embedding row 0 is folded into the position table, since every input
// is a single segment. The special tokens missing from vocab.txt are
// appended, and their embedding rows drawn with `seed`.
absl::StatusOr<PretrainedEncoder> LoadPretrained(const std::string& bundle_dir,
                                                 uint64_t seed);

// Writes the encoder tensors into `tensors` under their public names.
void ExportEncoder(const TransformerEncoder& encoder, TensorMap* tensors);

// Copies matching tensors into `encoder`. Names may carry a "bert." prefix.
// A token-type table, when present, has its first row added to the position
// table. Fails naming the first missing or mis-shaped tensor.
absl::Status ImportEncoder(const TensorMap& tensors, TransformerEncoder* encoder);

}  // namespace dsre

#endif  // DSRE_ENCODER_H_
