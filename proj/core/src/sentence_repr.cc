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

#include "dsre/sentence_repr.h"

#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace dsre {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const char* AblationName(Ablation ablation) {
  switch (ablation) {
    case Ablation::kFull:
      return "full";
    case Ablation::kNoRelEmb:
      return "no_rel_emb";
    case Ablation::kNoRelAttn:
      return "no_rel_attn";
    case Ablation::kSdpInput:
      return "sdp_input";
  }
  return "full";
}

absl::StatusOr<Ablation> ParseAblation(const std::string& name) {
  for (Ablation a : {Ablation::kFull, Ablation::kNoRelEmb, Ablation::kNoRelAttn,
                     Ablation::kSdpInput}) {
    if (name == AblationName(a)) return a;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown ablation '", name,
      "' (expected full, no_rel_emb, no_rel_attn or sdp_input)"));
}

int ReprDim(Ablation ablation, int hidden_dim) {
  return ablation == Ablation::kNoRelEmb ? hidden_dim : 2 * hidden_dim;
}

RelationHead::RelationHead(int hidden_dim)
    : w_l(Parameter::Matrix("relation_head.w_l", hidden_dim, hidden_dim)),
      b_l(Parameter::Vector("relation_head.b_l", hidden_dim)) {}

void RelationHead::InitializeRandom(std::mt19937_64* rng, double stddev) {
  w_l.FillNormal(0.0, stddev, rng);
  b_l.value.setZero();
}

absl::StatusOr<std::pair<VectorXd, VectorXd>> EntityVectors(
    const TokenStates& states, const std::vector<uint8_t>& head_mask,
    const std::vector<uint8_t>& tail_mask) {
  const int n = states.length();
  if (static_cast<int>(head_mask.size()) != n ||
      static_cast<int>(tail_mask.size()) != n) {
    return absl::InvalidArgumentError("entity mask length differs from states");
  }
  VectorXd h = VectorXd::Zero(states.hidden.cols());
  VectorXd t = VectorXd::Zero(states.hidden.cols());
  int head_count = 0;
  int tail_count = 0;
  for (int i = 0; i < n; ++i) {
    if (head_mask[i]) {
      h += states.hidden.row(i).transpose();
      ++head_count;
    }
    if (tail_mask[i]) {
      t += states.hidden.row(i).transpose();
      ++tail_count;
    }
  }
  if (head_count == 0 || tail_count == 0) {
    return absl::FailedPreconditionError(absl::StrCat(
        head_count == 0 ? "head" : "tail", " mask selects no tokens"));
  }
  return std::make_pair(std::move(h), std::move(t));
}

VectorXd RelationEmbedding(const VectorXd& h, const VectorXd& t,
                           const RelationHead& head) {
  VectorXd u = head.w_l.value * (t - h) + head.b_l.value.row(0).transpose();
  return u.array().tanh();
}

VectorXd RelationAttention(const TokenStates& states, const VectorXd& l) {
  VectorXd logits = states.hidden * l;
  double max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < states.length(); ++i) {
    if (states.valid[i]) max = std::max(max, logits(i));
  }
  VectorXd alpha = VectorXd::Zero(states.length());
  double sum = 0.0;
  for (int i = 0; i < states.length(); ++i) {
    if (!states.valid[i]) continue;
    alpha(i) = std::exp(logits(i) - max);
    sum += alpha(i);
  }
  return alpha / sum;
}

VectorXd WeightedHidden(const TokenStates& states, const VectorXd& alpha) {
  return states.hidden.transpose() * alpha;
}

absl::StatusOr<SentenceRepr> ComputeSentenceRepr(const TokenStates& states,
                                                 const StructuredInput& input,
                                                 const RelationHead& head,
                                                 Ablation ablation,
                                                 int expected_dim) {
  const int d = static_cast<int>(states.hidden.cols());
  if (expected_dim > 0 && expected_dim != ReprDim(ablation, d)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "ablation ", AblationName(ablation), " yields a ", ReprDim(ablation, d),
        "-dim representation but the classifier expects ", expected_dim));
  }
  SentenceRepr repr;
  if (ablation == Ablation::kNoRelEmb) {
    repr.s = states.hidden.row(0).transpose();
    return repr;
  }
  auto entities = EntityVectors(states, input.head_mask, input.tail_mask);
  if (!entities.ok()) return entities.status();
  repr.h = std::move(entities->first);
  repr.t = std::move(entities->second);
  repr.l = RelationEmbedding(repr.h, repr.t, head);
  repr.s.resize(2 * d);
  repr.s.head(d) = repr.l;
  if (ablation == Ablation::kNoRelAttn) {
    repr.s.tail(d) = states.hidden.row(0).transpose();
  } else {
    repr.alpha = RelationAttention(states, repr.l);
    repr.h_prime = WeightedHidden(states, repr.alpha);
    repr.s.tail(d) = repr.h_prime;
  }
  return repr;
}

MatrixXd SentenceReprBackward(const TokenStates& states,
                              const StructuredInput& input, RelationHead& head,
                              Ablation ablation, const SentenceRepr& repr,
                              const VectorXd& d_s) {
  const int n = states.length();
  const int d = static_cast<int>(states.hidden.cols());
  MatrixXd d_hidden = MatrixXd::Zero(n, d);
  if (ablation == Ablation::kNoRelEmb) {
    d_hidden.row(0) = d_s.transpose();
    return d_hidden;
  }
  VectorXd d_l = d_s.head(d);
  if (ablation == Ablation::kNoRelAttn) {
    d_hidden.row(0) += d_s.tail(d).transpose();
  } else {
    const VectorXd d_hp = d_s.tail(d);
    // h' = H^T alpha.
    d_hidden += repr.alpha * d_hp.transpose();
    const VectorXd d_alpha = states.hidden * d_hp;
    const double mean = repr.alpha.dot(d_alpha);
    const VectorXd d_logits =
        (repr.alpha.array() * (d_alpha.array() - mean)).matrix();
    // logits = H l.
    d_hidden += d_logits * repr.l.transpose();
    d_l += states.hidden.transpose() * d_logits;
  }
  const VectorXd d_u = (d_l.array() * (1.0 - repr.l.array().square())).matrix();
  if (head.w_l.trainable) head.w_l.grad.noalias() += d_u * (repr.t - repr.h).transpose();
  if (head.b_l.trainable) head.b_l.grad.row(0) += d_u.transpose();
  const VectorXd d_diff = head.w_l.value.transpose() * d_u;
  for (int i = 0; i < n; ++i) {
    if (input.head_mask[i]) d_hidden.row(i) -= d_diff.transpose();
    if (input.tail_mask[i]) d_hidden.row(i) += d_diff.transpose();
  }
  return d_hidden;
}

}  // namespace dsre
