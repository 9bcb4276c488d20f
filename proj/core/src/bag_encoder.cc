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

#include "dsre/bag_encoder.h"

#include <cmath>
#include <tuple>

#include "absl/strings/str_cat.h"

namespace dsre {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd LogSoftmax(const VectorXd& logits) {
  const double max = logits.maxCoeff();
  const double lse = max + std::log((logits.array() - max).exp().sum());
  return logits.array() - lse;
}

}  // namespace

BagEncoderParams::BagEncoderParams(int repr_dim, int num_relations,
                                   double dropout_rate)
    : r(Parameter::Vector("bag_encoder.r", repr_dim)),
      w_r(Parameter::Matrix("bag_encoder.w_r", num_relations, repr_dim)),
      b_r(Parameter::Vector("bag_encoder.b_r", num_relations)),
      dropout_rate(dropout_rate) {}

void BagEncoderParams::InitializeRandom(std::mt19937_64* rng, double stddev) {
  r.FillNormal(0.0, stddev, rng);
  w_r.FillNormal(0.0, stddev, rng);
  b_r.value.setZero();
}

std::pair<VectorXd, VectorXd> SelectiveAttention(const MatrixXd& sentences,
                                                 const BagEncoderParams& params) {
  const VectorXd beta =
      LogSoftmax(sentences * params.r.value.row(0).transpose()).array().exp();
  return {sentences.transpose() * beta, beta};
}

VectorXd Classify(const VectorXd& bag, const BagEncoderParams& params) {
  const VectorXd logits = params.w_r.value * bag + params.b_r.value.row(0).transpose();
  return LogSoftmax(logits).array().exp();
}

absl::StatusOr<BagForward> ForwardBag(const MatrixXd& sentences,
                                      const BagEncoderParams& params,
                                      std::mt19937_64* rng) {
  if (sentences.rows() == 0) {
    return absl::InvalidArgumentError("empty bag");
  }
  if (sentences.cols() != params.repr_dim()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "sentence vectors have dimension ", sentences.cols(),
        " but the bag encoder expects ", params.repr_dim()));
  }
  BagForward f;
  f.sentences = sentences;
  std::tie(f.bag, f.beta) = SelectiveAttention(sentences, params);
  f.classifier_input = f.bag;
  if (rng != nullptr && params.dropout_rate > 0.0) {
    std::bernoulli_distribution keep(1.0 - params.dropout_rate);
    const double scale = 1.0 / (1.0 - params.dropout_rate);
    f.dropout_scale.resize(f.bag.size());
    for (Eigen::Index i = 0; i < f.bag.size(); ++i) {
      f.dropout_scale(i) = keep(*rng) ? scale : 0.0;
    }
    f.classifier_input = f.bag.cwiseProduct(f.dropout_scale);
  }
  f.log_probs = LogSoftmax(params.w_r.value * f.classifier_input +
                           params.b_r.value.row(0).transpose());
  f.probs = f.log_probs.array().exp();
  if (!f.log_probs.allFinite()) {
    return absl::InternalError("non-finite classifier output");
  }
  return f;
}

double BagLoss(const std::vector<VectorXd>& log_probs,
               const std::vector<int>& gold,
               const std::vector<double>& class_weights) {
  double loss = 0.0;
  for (size_t i = 0; i < log_probs.size(); ++i) {
    loss -= class_weights[gold[i]] * log_probs[i](gold[i]);
  }
  return log_probs.empty() ? 0.0 : loss / static_cast<double>(log_probs.size());
}

MatrixXd BackwardBag(const BagForward& f, int gold, double coef,
                     BagEncoderParams& params) {
  VectorXd d_logits = coef * f.probs;
  d_logits(gold) -= coef;
  if (params.w_r.trainable) {
    params.w_r.grad.noalias() += d_logits * f.classifier_input.transpose();
  }
  if (params.b_r.trainable) params.b_r.grad.row(0) += d_logits.transpose();
  VectorXd d_bag = params.w_r.value.transpose() * d_logits;
  if (f.dropout_scale.size() > 0) d_bag = d_bag.cwiseProduct(f.dropout_scale);

  // B = S^T beta, beta = softmax(S r).
  MatrixXd d_sentences = f.beta * d_bag.transpose();
  const VectorXd d_beta = f.sentences * d_bag;
  const VectorXd d_z = (f.beta.array() * (d_beta.array() - f.beta.dot(d_beta))).matrix();
  d_sentences += d_z * params.r.value.row(0);
  if (params.r.trainable) params.r.grad.row(0) += (f.sentences.transpose() * d_z).transpose();
  return d_sentences;
}

}  // namespace dsre
