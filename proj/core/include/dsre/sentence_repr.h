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

// Sentence representation on top of the encoder states:
//
//   h = sum of head-occurrence states, t = likewise for the tail
//   l = tanh(W_l (t - h) + b_l)
//   alpha = softmax over real tokens of h_L[t] . l
//   s = [l ; sum_t alpha_t h_L[t]]

#ifndef DSRE_SENTENCE_REPR_H_
#define DSRE_SENTENCE_REPR_H_

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dsre/encoder.h"
#include "dsre/parameter.h"

namespace dsre {

enum class Ablation {
  kFull,
  kNoRelEmb,   // s = h_L[CLS]
  kNoRelAttn,  // s = [l ; h_L[CLS]]
  kSdpInput,   // representation as kFull; the input uses the SDP
};

const char* AblationName(Ablation ablation);
absl::StatusOr<Ablation> ParseAblation(const std::string& name);

// Length of s for `ablation` with hidden size `hidden_dim`.
int ReprDim(Ablation ablation, int hidden_dim);

struct RelationHead {
  explicit RelationHead(int hidden_dim);

  void InitializeRandom(std::mt19937_64* rng, double stddev = 0.02);
  ParameterList Parameters() { return {&w_l, &b_l}; }

  Parameter w_l;  // [d x d]
  Parameter b_l;  // {d}
};

// Mask-weighted sums of hidden rows. Fails if either mask selects nothing.
absl::StatusOr<std::pair<Eigen::VectorXd, Eigen::VectorXd>> EntityVectors(
    const TokenStates& states, const std::vector<uint8_t>& head_mask,
    const std::vector<uint8_t>& tail_mask);

Eigen::VectorXd RelationEmbedding(const Eigen::VectorXd& h,
                                  const Eigen::VectorXd& t,
                                  const RelationHead& head);

// Softmax of h_L[t] . l over positions with states.valid set; 0 elsewhere.
Eigen::VectorXd RelationAttention(const TokenStates& states,
                                  const Eigen::VectorXd& l);

Eigen::VectorXd WeightedHidden(const TokenStates& states,
                               const Eigen::VectorXd& alpha);

struct SentenceRepr {
  Eigen::VectorXd l;        // empty under kNoRelEmb
  Eigen::VectorXd h_prime;  // attention-pooled states; empty unless used
  Eigen::VectorXd s;
  Eigen::VectorXd alpha;    // relation attention; empty unless used
  // Kept for the backward pass.
  Eigen::VectorXd h, t;
};

// Computes s for one sentence. `expected_dim`, when positive, must equal
// ReprDim(ablation, d_h); a mismatch means the classifier was built for a
// different variant.
absl::StatusOr<SentenceRepr> ComputeSentenceRepr(
    const TokenStates& states, const StructuredInput& input,
    const RelationHead& head, Ablation ablation, int expected_dim = -1);

// Accumulates head gradients given dLoss/ds and returns dLoss/dh_L.
Eigen::MatrixXd SentenceReprBackward(const TokenStates& states,
                                     const StructuredInput& input,
                                     RelationHead& head, Ablation ablation,
                                     const SentenceRepr& repr,
                                     const Eigen::VectorXd& d_s);

}  // namespace dsre

#endif  // DSRE_SENTENCE_REPR_H_
