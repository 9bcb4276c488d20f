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

// Bag-level classifier: selective attention over sentence vectors with one
// learned query r, then a softmax layer.

#ifndef DSRE_BAG_ENCODER_H_
#define DSRE_BAG_ENCODER_H_

#include <random>
#include <utility>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dsre/parameter.h"

namespace dsre {

struct BagEncoderParams {
  BagEncoderParams(int repr_dim, int num_relations, double dropout_rate);

  void InitializeRandom(std::mt19937_64* rng, double stddev = 0.02);
  ParameterList Parameters() { return {&r, &w_r, &b_r}; }
  int repr_dim() const { return static_cast<int>(r.value.cols()); }
  int num_relations() const { return static_cast<int>(w_r.value.rows()); }

  Parameter r;    // {repr_dim}
  Parameter w_r;  // [num_relations x repr_dim]
  Parameter b_r;  // {num_relations}
  double dropout_rate = 0.0;
};

// Returns (B, beta) with beta = softmax(S r) and B = S^T beta. `sentences`
// holds one s_i per row.
std::pair<Eigen::VectorXd, Eigen::VectorXd> SelectiveAttention(
    const Eigen::MatrixXd& sentences, const BagEncoderParams& params);

// softmax(W_r B + b_r), without dropout.
Eigen::VectorXd Classify(const Eigen::VectorXd& bag,
                         const BagEncoderParams& params);

struct BagForward {
  Eigen::MatrixXd sentences;
  Eigen::VectorXd beta;
  Eigen::VectorXd bag;
  // Inverted-dropout multipliers (0 or 1/(1-rate)); empty outside training.
  Eigen::VectorXd dropout_scale;
  Eigen::VectorXd classifier_input;
  Eigen::VectorXd log_probs;
  Eigen::VectorXd probs;
};

// Full bag forward pass. Dropout is applied to B only when `rng` is non-null.
absl::StatusOr<BagForward> ForwardBag(const Eigen::MatrixXd& sentences,
                                      const BagEncoderParams& params,
                                      std::mt19937_64* rng = nullptr);

// -(1/n) sum_i weight[gold_i] log p_i(gold_i).
double BagLoss(const std::vector<Eigen::VectorXd>& log_probs,
               const std::vector<int>& gold,
               const std::vector<double>& class_weights);

// Backward for the loss term -coef * log p(gold). Accumulates into `params`
// and returns dLoss/dS.
Eigen::MatrixXd BackwardBag(const BagForward& forward, int gold, double coef,
                            BagEncoderParams& params);

}  // namespace dsre

#endif  // DSRE_BAG_ENCODER_H_
