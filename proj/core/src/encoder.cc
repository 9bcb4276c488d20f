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

#include "dsre/encoder.h"

#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "absl/strings/match.h"
#include "dsre/manifest.h"

namespace dsre {

using Eigen::MatrixXd;
using Eigen::VectorXd;

EncoderConfig EncoderConfig::Tiny(int vocab_size) {
  EncoderConfig c;
  c.num_layers = 2;
  c.num_heads = 2;
  c.hidden_dim = 32;
  c.intermediate_dim = 128;
  c.vocab_size = vocab_size;
  c.max_positions = 64;
  c.fine_tune_last_k = 2;
  return c;
}

EncoderConfig EncoderConfig::BertBase(int vocab_size) {
  EncoderConfig c;
  c.num_layers = 12;
  c.num_heads = 12;
  c.hidden_dim = 768;
  c.intermediate_dim = 3072;
  c.vocab_size = vocab_size;
  c.max_positions = 512;
  c.fine_tune_last_k = 4;
  return c;
}

absl::Status EncoderConfig::Validate() const {
  if (num_layers <= 0 || num_heads <= 0 || hidden_dim <= 0 ||
      intermediate_dim <= 0 || vocab_size <= 0 || max_positions <= 0) {
    return absl::InvalidArgumentError("encoder dimensions must be positive");
  }
  if (hidden_dim % num_heads != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "hidden_dim ", hidden_dim, " not divisible by num_heads ", num_heads));
  }
  if (hidden_dropout < 0.0 || hidden_dropout >= 1.0 || attention_dropout < 0.0 ||
      attention_dropout >= 1.0) {
    return absl::InvalidArgumentError("dropout rates must lie in [0, 1)");
  }
  if (fine_tune_last_k < 0 || fine_tune_last_k > num_layers) {
    return absl::InvalidArgumentError(absl::StrCat(
        "fine_tune_last_k ", fine_tune_last_k, " outside [0, ", num_layers, "]"));
  }
  return absl::OkStatus();
}

nlohmann::json EncoderConfig::ToJson() const {
  return {{"num_layers", num_layers},
          {"num_heads", num_heads},
          {"hidden_dim", hidden_dim},
          {"intermediate_dim", intermediate_dim},
          {"vocab_size", vocab_size},
          {"max_positions", max_positions},
          {"fine_tune_last_k", fine_tune_last_k},
          {"layer_norm_eps", layer_norm_eps},
          {"hidden_dropout", hidden_dropout},
          {"attention_dropout", attention_dropout}};
}

absl::StatusOr<EncoderConfig> EncoderConfig::FromJson(const nlohmann::json& j) {
  EncoderConfig c;
  try {
    c.num_layers = j.at("num_layers");
    c.num_heads = j.at("num_heads");
    c.hidden_dim = j.at("hidden_dim");
    c.intermediate_dim = j.at("intermediate_dim");
    c.vocab_size = j.at("vocab_size");
    c.max_positions = j.at("max_positions");
    c.fine_tune_last_k = j.at("fine_tune_last_k");
    c.layer_norm_eps = j.value("layer_norm_eps", 1e-12);
    c.hidden_dropout = j.value("hidden_dropout", c.hidden_dropout);
    c.attention_dropout = j.value("attention_dropout", c.attention_dropout);
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("encoder config: ", e.what()));
  }
  if (absl::Status s = c.Validate(); !s.ok()) return s;
  return c;
}

absl::StatusOr<EncoderConfig> EncoderConfig::FromBertConfig(
    const nlohmann::json& j) {
  EncoderConfig c;
  try {
    c.num_layers = j.at("num_hidden_layers");
    c.num_heads = j.at("num_attention_heads");
    c.hidden_dim = j.at("hidden_size");
    c.intermediate_dim = j.at("intermediate_size");
    c.vocab_size = j.at("vocab_size");
    c.max_positions = j.at("max_position_embeddings");
    c.layer_norm_eps = j.value("layer_norm_eps", 1e-12);
    c.hidden_dropout = j.value("hidden_dropout_prob", c.hidden_dropout);
    c.attention_dropout = j.value("attention_probs_dropout_prob", c.attention_dropout);
    if (j.contains("hidden_act") && j["hidden_act"] != "gelu") {
      return absl::InvalidArgumentError(
          absl::StrCat("unsupported hidden_act ", j["hidden_act"].dump()));
    }
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("config.json: ", e.what()));
  }
  c.fine_tune_last_k = std::min(4, c.num_layers);
  if (absl::Status s = c.Validate(); !s.ok()) return s;
  return c;
}

namespace {

std::string LayerName(int i, const char* suffix) {
  return absl::StrCat("encoder.layer.", i, ".", suffix);
}

// Y = X W^T + b with W stored [out x in].
MatrixXd Linear(const MatrixXd& x, const Parameter& w, const Parameter& b) {
  MatrixXd y = x * w.value.transpose();
  y.rowwise() += b.value.row(0);
  return y;
}

// Accumulates weight/bias gradients and returns dX.
MatrixXd LinearBackward(const MatrixXd& x, const MatrixXd& dy, Parameter& w,
                        Parameter& b) {
  if (w.trainable) w.grad.noalias() += dy.transpose() * x;
  if (b.trainable) b.grad.row(0) += dy.colwise().sum();
  return dy * w.value;
}

void LayerNormForward(const MatrixXd& x, const Parameter& g, const Parameter& b,
                      double eps, MatrixXd* y, MatrixXd* xhat, VectorXd* rstd) {
  const Eigen::Index n = x.rows();
  const double d = static_cast<double>(x.cols());
  xhat->resize(x.rows(), x.cols());
  rstd->resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double mean = x.row(r).sum() / d;
    const double var = (x.row(r).array() - mean).square().sum() / d;
    (*rstd)(r) = 1.0 / std::sqrt(var + eps);
    xhat->row(r) = (x.row(r).array() - mean) * (*rstd)(r);
  }
  *y = xhat->array().rowwise() * g.value.row(0).array();
  y->rowwise() += b.value.row(0);
}

MatrixXd LayerNormBackward(const MatrixXd& dy, const MatrixXd& xhat,
                           const VectorXd& rstd, Parameter& g, Parameter& b) {
  if (g.trainable) g.grad.row(0) += (dy.array() * xhat.array()).colwise().sum().matrix();
  if (b.trainable) b.grad.row(0) += dy.colwise().sum();
  const double d = static_cast<double>(dy.cols());
  MatrixXd dxhat = dy.array().rowwise() * g.value.row(0).array();
  MatrixXd dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const double mean_d = dxhat.row(r).sum() / d;
    const double mean_dx = dxhat.row(r).dot(xhat.row(r)) / d;
    dx.row(r) = rstd(r) * (dxhat.row(r).array() - mean_d -
                           xhat.row(r).array() * mean_dx)
                              .matrix();
  }
  return dx;
}

double Gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

double GeluGrad(double x) {
  constexpr double kInvSqrt2Pi = 0.3989422804014327;
  return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))) +
         x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

// Row-wise softmax; columns with valid[j] == 0 get probability 0.
// Inverted-dropout scale matrix, or an empty one when dropout is off.
MatrixXd DropoutMask(Eigen::Index rows, Eigen::Index cols, double rate,
                     std::mt19937_64* rng) {
  if (rng == nullptr || rate <= 0.0) return MatrixXd();
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  MatrixXd mask(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) mask(i, j) = keep(*rng) ? scale : 0.0;
  }
  return mask;
}

// x * mask elementwise; an empty mask is the identity.
MatrixXd ApplyMask(const MatrixXd& x, const MatrixXd& mask) {
  if (mask.size() == 0) return x;
  return x.cwiseProduct(mask);
}

void MaskedSoftmaxRows(const std::vector<uint8_t>& valid, MatrixXd* s) {
  for (Eigen::Index r = 0; r < s->rows(); ++r) {
    double max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < s->cols(); ++c) {
      if (valid[c]) max = std::max(max, (*s)(r, c));
    }
    double sum = 0.0;
    for (Eigen::Index c = 0; c < s->cols(); ++c) {
      const double e = valid[c] ? std::exp((*s)(r, c) - max) : 0.0;
      (*s)(r, c) = e;
      sum += e;
    }
    s->row(r) /= sum;
  }
}

}  // namespace

TransformerEncoder::TransformerEncoder(const EncoderConfig& config)
    : config_(config), num_base_tokens_(config.vocab_size) {
  const int d = config.hidden_dim;
  const int inter = config.intermediate_dim;
  word_embeddings_ = Parameter::Matrix("embeddings.word_embeddings.weight",
                                       config.vocab_size, d);
  position_embeddings_ = Parameter::Matrix(
      "embeddings.position_embeddings.weight", config.max_positions, d);
  position_embeddings_.decay = true;
  emb_ln_g_ = Parameter::Vector("embeddings.LayerNorm.weight", d);
  emb_ln_b_ = Parameter::Vector("embeddings.LayerNorm.bias", d);
  emb_ln_g_.value.setOnes();
  layers_.resize(config.num_layers);
  for (int i = 0; i < config.num_layers; ++i) {
    Layer& l = layers_[i];
    l.query_w = Parameter::Matrix(LayerName(i, "attention.self.query.weight"), d, d);
    l.query_b = Parameter::Vector(LayerName(i, "attention.self.query.bias"), d);
    l.key_w = Parameter::Matrix(LayerName(i, "attention.self.key.weight"), d, d);
    l.key_b = Parameter::Vector(LayerName(i, "attention.self.key.bias"), d);
    l.value_w = Parameter::Matrix(LayerName(i, "attention.self.value.weight"), d, d);
    l.value_b = Parameter::Vector(LayerName(i, "attention.self.value.bias"), d);
    l.attn_out_w =
        Parameter::Matrix(LayerName(i, "attention.output.dense.weight"), d, d);
    l.attn_out_b =
        Parameter::Vector(LayerName(i, "attention.output.dense.bias"), d);
    l.attn_ln_g =
        Parameter::Vector(LayerName(i, "attention.output.LayerNorm.weight"), d);
    l.attn_ln_b =
        Parameter::Vector(LayerName(i, "attention.output.LayerNorm.bias"), d);
    l.inter_w =
        Parameter::Matrix(LayerName(i, "intermediate.dense.weight"), inter, d);
    l.inter_b = Parameter::Vector(LayerName(i, "intermediate.dense.bias"), inter);
    l.out_w = Parameter::Matrix(LayerName(i, "output.dense.weight"), d, inter);
    l.out_b = Parameter::Vector(LayerName(i, "output.dense.bias"), d);
    l.out_ln_g = Parameter::Vector(LayerName(i, "output.LayerNorm.weight"), d);
    l.out_ln_b = Parameter::Vector(LayerName(i, "output.LayerNorm.bias"), d);
    l.attn_ln_g.value.setOnes();
    l.out_ln_g.value.setOnes();
  }
}

void TransformerEncoder::InitializeRandom(std::mt19937_64* rng, double stddev) {
  word_embeddings_.FillNormal(0.0, stddev, rng);
  position_embeddings_.FillNormal(0.0, stddev, rng);
  for (Layer& l : layers_) {
    for (Parameter* w : {&l.query_w, &l.key_w, &l.value_w, &l.attn_out_w,
                         &l.inter_w, &l.out_w}) {
      w->FillNormal(0.0, stddev, rng);
    }
  }
}

ParameterList TransformerEncoder::EmbeddingParameters() {
  return {&word_embeddings_, &position_embeddings_, &emb_ln_g_, &emb_ln_b_};
}

ParameterList TransformerEncoder::LayerParameters(int i) {
  Layer& l = layers_.at(i);
  return {&l.query_w,    &l.query_b,    &l.key_w,     &l.key_b,
          &l.value_w,    &l.value_b,    &l.attn_out_w, &l.attn_out_b,
          &l.attn_ln_g,  &l.attn_ln_b,  &l.inter_w,   &l.inter_b,
          &l.out_w,      &l.out_b,      &l.out_ln_g,  &l.out_ln_b};
}

ParameterList TransformerEncoder::Parameters() {
  ParameterList params = EmbeddingParameters();
  for (int i = 0; i < config_.num_layers; ++i) {
    ParameterList layer = LayerParameters(i);
    params.insert(params.end(), layer.begin(), layer.end());
  }
  return params;
}

void TransformerEncoder::ExtendVocabulary(int rows, std::mt19937_64* rng) {
  if (rows <= 0) return;
  const MatrixXd& table = word_embeddings_.value;
  const double mean = table.mean();
  const double var =
      (table.array() - mean).square().sum() / std::max<Eigen::Index>(1, table.size());
  std::normal_distribution<double> dist(mean, std::sqrt(var));
  const Eigen::Index old_rows = table.rows();
  MatrixXd grown(old_rows + rows, table.cols());
  grown.topRows(old_rows) = table;
  for (Eigen::Index r = old_rows; r < grown.rows(); ++r) {
    for (Eigen::Index c = 0; c < grown.cols(); ++c) grown(r, c) = dist(*rng);
  }
  word_embeddings_.value = std::move(grown);
  word_embeddings_.grad = MatrixXd::Zero(old_rows + rows, table.cols());
  word_embeddings_.shape = {old_rows + rows, word_embeddings_.shape[1]};
  config_.vocab_size += rows;
}

absl::StatusOr<MatrixXd> TransformerEncoder::Embed(
    const StructuredInput& input) const {
  const int n = input.length();
  if (n > config_.max_positions) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sequence length ", n, " exceeds max_positions ", config_.max_positions));
  }
  MatrixXd h0(n, config_.hidden_dim);
  for (int t = 0; t < n; ++t) {
    const int id = input.token_ids[t];
    const int pos = input.position_ids[t];
    if (id < 0 || id >= config_.vocab_size) {
      return absl::InvalidArgumentError(absl::StrCat(
          "token id ", id, " at position ", t, " outside vocab of ",
          config_.vocab_size));
    }
    if (pos < 0 || pos >= config_.max_positions) {
      return absl::InvalidArgumentError(
          absl::StrCat("position id ", pos, " out of range"));
    }
    h0.row(t) = word_embeddings_.value.row(id) + position_embeddings_.value.row(pos);
  }
  return h0;
}

absl::Status TransformerEncoder::LayerForward(const Layer& l, int index,
                                              const std::vector<uint8_t>& valid,
                                              std::mt19937_64* rng, MatrixXd* x,
                                              LayerCache* cache) const {
  const int heads = config_.num_heads;
  const int dk = config_.hidden_dim / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  const Eigen::Index n = x->rows();

  cache->input = *x;
  cache->q = Linear(*x, l.query_w, l.query_b);
  cache->k = Linear(*x, l.key_w, l.key_b);
  cache->v = Linear(*x, l.value_w, l.value_b);
  cache->probs.resize(heads);
  cache->probs_mask.resize(heads);
  cache->context.resize(n, config_.hidden_dim);
  for (int h = 0; h < heads; ++h) {
    MatrixXd s = cache->q.middleCols(h * dk, dk) *
                 cache->k.middleCols(h * dk, dk).transpose() * scale;
    MaskedSoftmaxRows(valid, &s);
    cache->probs_mask[h] = DropoutMask(n, n, config_.attention_dropout, rng);
    cache->context.middleCols(h * dk, dk) =
        ApplyMask(s, cache->probs_mask[h]) * cache->v.middleCols(h * dk, dk);
    cache->probs[h] = std::move(s);
  }
  cache->attn_mask = DropoutMask(n, config_.hidden_dim, config_.hidden_dropout, rng);
  MatrixXd residual =
      *x + ApplyMask(Linear(cache->context, l.attn_out_w, l.attn_out_b), cache->attn_mask);
  LayerNormForward(residual, l.attn_ln_g, l.attn_ln_b, config_.layer_norm_eps,
                   &cache->attn_out, &cache->attn_xhat, &cache->attn_rstd);

  cache->inter_pre = Linear(cache->attn_out, l.inter_w, l.inter_b);
  cache->inter_act = cache->inter_pre.unaryExpr(&Gelu);
  cache->ffn_mask = DropoutMask(n, config_.hidden_dim, config_.hidden_dropout, rng);
  residual = cache->attn_out +
             ApplyMask(Linear(cache->inter_act, l.out_w, l.out_b), cache->ffn_mask);
  LayerNormForward(residual, l.out_ln_g, l.out_ln_b, config_.layer_norm_eps, x,
                   &cache->out_xhat, &cache->out_rstd);
  if (!x->allFinite()) {
    return absl::InternalError(
        absl::StrCat("non-finite activations in encoder layer ", index + 1));
  }
  return absl::OkStatus();
}

absl::StatusOr<TokenStates> TransformerEncoder::Encode(
    const StructuredInput& input, EncoderCache* cache, std::mt19937_64* rng) const {
  absl::StatusOr<MatrixXd> h0 = Embed(input);
  if (!h0.ok()) return h0.status();
  EncoderCache local;
  EncoderCache* c = cache != nullptr ? cache : &local;
  c->token_ids = input.token_ids;
  c->valid = input.padding_mask;
  c->layers.resize(config_.num_layers);

  TokenStates states;
  states.valid = input.padding_mask;
  LayerNormForward(*h0, emb_ln_g_, emb_ln_b_, config_.layer_norm_eps,
                   &states.hidden, &c->emb_xhat, &c->emb_rstd);
  if (!states.hidden.allFinite()) {
    return absl::InternalError("non-finite activations in embedding layer");
  }
  c->emb_mask = DropoutMask(states.hidden.rows(), states.hidden.cols(),
                            config_.hidden_dropout, rng);
  states.hidden = ApplyMask(states.hidden, c->emb_mask);
  for (int i = 0; i < config_.num_layers; ++i) {
    absl::Status s = LayerForward(layers_[i], i, input.padding_mask, rng,
                                  &states.hidden, &c->layers[i]);
    if (!s.ok()) return s;
  }
  return states;
}

MatrixXd TransformerEncoder::LayerBackward(Layer& l, const LayerCache& cache,
                                           const MatrixXd& d_out) {
  const int heads = config_.num_heads;
  const int dk = config_.hidden_dim / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  // Output block: x_out = LN(attn_out + FFN(attn_out)).
  MatrixXd d_res = LayerNormBackward(d_out, cache.out_xhat, cache.out_rstd,
                                     l.out_ln_g, l.out_ln_b);
  MatrixXd d_act =
      LinearBackward(cache.inter_act, ApplyMask(d_res, cache.ffn_mask), l.out_w, l.out_b);
  MatrixXd d_pre = d_act.array() * cache.inter_pre.unaryExpr(&GeluGrad).array();
  MatrixXd d_attn_out = d_res + LinearBackward(cache.attn_out, d_pre, l.inter_w, l.inter_b);

  // Attention block: attn_out = LN(x + Attn(x)).
  MatrixXd d_res1 = LayerNormBackward(d_attn_out, cache.attn_xhat, cache.attn_rstd,
                                      l.attn_ln_g, l.attn_ln_b);
  MatrixXd d_context = LinearBackward(cache.context, ApplyMask(d_res1, cache.attn_mask),
                                      l.attn_out_w, l.attn_out_b);
  MatrixXd dq(cache.q.rows(), cache.q.cols());
  MatrixXd dk_all(cache.k.rows(), cache.k.cols());
  MatrixXd dv(cache.v.rows(), cache.v.cols());
  for (int h = 0; h < heads; ++h) {
    const MatrixXd& p = cache.probs[h];
    const MatrixXd& mask = cache.probs_mask[h];
    const auto dch = d_context.middleCols(h * dk, dk);
    MatrixXd dp = ApplyMask(dch * cache.v.middleCols(h * dk, dk).transpose(), mask);
    dv.middleCols(h * dk, dk) = ApplyMask(p, mask).transpose() * dch;
    MatrixXd ds = p.array() * (dp.colwise() - (dp.array() * p.array()).rowwise().sum().matrix()).array();
    dq.middleCols(h * dk, dk) = ds * cache.k.middleCols(h * dk, dk) * scale;
    dk_all.middleCols(h * dk, dk) = ds.transpose() * cache.q.middleCols(h * dk, dk) * scale;
  }
  MatrixXd dx = d_res1;
  dx += LinearBackward(cache.input, dq, l.query_w, l.query_b);
  dx += LinearBackward(cache.input, dk_all, l.key_w, l.key_b);
  dx += LinearBackward(cache.input, dv, l.value_w, l.value_b);
  return dx;
}

void TransformerEncoder::Backward(const MatrixXd& d_hidden,
                                  const EncoderCache& cache) {
  MatrixXd d = d_hidden;
  for (int i = config_.num_layers - 1; i >= 0; --i) {
    d = LayerBackward(layers_[i], cache.layers[i], d);
  }
  MatrixXd d_emb =
      LayerNormBackward(ApplyMask(d, cache.emb_mask), cache.emb_xhat, cache.emb_rstd, emb_ln_g_, emb_ln_b_);
  for (Eigen::Index t = 0; t < d_emb.rows(); ++t) {
    const int id = cache.token_ids[t];
    if (word_embeddings_.RowTrainable(id)) {
      word_embeddings_.grad.row(id) += d_emb.row(t);
    }
    if (position_embeddings_.trainable) {
      position_embeddings_.grad.row(t) += d_emb.row(t);
    }
  }
}

TrainablePartition ApplyTrainableMask(TransformerEncoder* encoder, int k) {
  const int layers = encoder->config().num_layers;
  k = std::clamp(k, 0, layers);
  encoder->set_fine_tune_last_k(k);
  TrainablePartition partition;
  auto mark = [&](Parameter* p, bool trainable) {
    p->trainable = trainable;
    p->frozen_rows = 0;
    (trainable ? partition.trainable : partition.frozen).push_back(p->name);
  };
  const bool all = k == layers;
  // Added special-token rows always train.
  Parameter& words = encoder->word_embeddings();
  const bool split_words = !all && encoder->num_base_tokens() < words.value.rows();
  for (Parameter* p : encoder->EmbeddingParameters()) {
    if (p != &words || !split_words) {
      mark(p, all);
      continue;
    }
    words.trainable = true;
    words.frozen_rows = encoder->num_base_tokens();
    partition.trainable.push_back(
        absl::StrCat(words.name, "[", words.frozen_rows, ":]"));
    partition.frozen.push_back(
        absl::StrCat(words.name, "[:", words.frozen_rows, "]"));
  }
  for (int i = 0; i < layers; ++i) {
    for (Parameter* p : encoder->LayerParameters(i)) mark(p, i >= layers - k);
  }
  return partition;
}

void ExportEncoder(const TransformerEncoder& encoder, TensorMap* tensors) {
  auto& mutable_encoder = const_cast<TransformerEncoder&>(encoder);
  for (const Parameter* p : mutable_encoder.Parameters()) {
    (*tensors)[p->name] = ToTensor(*p);
  }
}

absl::Status ImportEncoder(const TensorMap& tensors, TransformerEncoder* encoder) {
  auto find = [&](const std::string& name) -> const Tensor* {
    auto it = tensors.find(name);
    if (it == tensors.end()) it = tensors.find("bert." + name);
    if (it == tensors.end() && absl::EndsWith(name, "LayerNorm.weight")) {
      std::string legacy = name.substr(0, name.size() - 6) + "gamma";
      it = tensors.find(legacy);
      if (it == tensors.end()) it = tensors.find("bert." + legacy);
    }
    if (it == tensors.end() && absl::EndsWith(name, "LayerNorm.bias")) {
      std::string legacy = name.substr(0, name.size() - 4) + "beta";
      it = tensors.find(legacy);
      if (it == tensors.end()) it = tensors.find("bert." + legacy);
    }
    return it == tensors.end() ? nullptr : &it->second;
  };
  for (Parameter* p : encoder->Parameters()) {
    const Tensor* t = find(p->name);
    if (t == nullptr) {
      return absl::NotFoundError(absl::StrCat("missing tensor ", p->name));
    }
    if (absl::Status s = AssignTensor(*t, p); !s.ok()) return s;
  }
  if (const Tensor* types = find("embeddings.token_type_embeddings.weight")) {
    Parameter& pos = encoder->position_embeddings();
    if (types->shape.size() != 2 || types->shape[1] != pos.value.cols()) {
      return absl::InvalidArgumentError(
          "shape mismatch for tensor embeddings.token_type_embeddings.weight");
    }
    for (Eigen::Index c = 0; c < pos.value.cols(); ++c) {
      pos.value.col(c).array() += types->data[c];
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<PretrainedEncoder> LoadPretrained(const std::string& bundle_dir,
                                                 uint64_t seed) {
  absl::StatusOr<nlohmann::json> config_json =
      ReadJsonFile(bundle_dir + "/config.json");
  if (!config_json.ok()) return config_json.status();
  absl::StatusOr<EncoderConfig> config = EncoderConfig::FromBertConfig(*config_json);
  if (!config.ok()) return config.status();
  absl::StatusOr<WordPieceTokenizer> tokenizer =
      WordPieceTokenizer::FromFile(bundle_dir + "/vocab.txt");
  if (!tokenizer.ok()) return tokenizer.status();
  if (tokenizer->size() != config->vocab_size) {
    return absl::InvalidArgumentError(absl::StrCat(
        "vocab.txt has ", tokenizer->size(), " entries but config.json says ",
        config->vocab_size));
  }
  const std::string weights_path = bundle_dir + "/model.safetensors";
  absl::StatusOr<TensorMap> tensors = ReadSafetensors(weights_path);
  if (!tensors.ok()) return tensors.status();
  absl::StatusOr<std::string> hash = Sha256File(weights_path);
  if (!hash.ok()) return hash.status();

  PretrainedEncoder out{TransformerEncoder(*config), *std::move(tokenizer),
                        *hash, 0};
  if (absl::Status s = ImportEncoder(*tensors, &out.encoder); !s.ok()) return s;
  out.added_rows = out.tokenizer.AddSpecialTokens(SpecialVocab::AddedTokens());
  std::mt19937_64 rng(seed);
  out.encoder.ExtendVocabulary(out.added_rows, &rng);
  out.encoder.set_num_base_tokens(config->vocab_size);
  return out;
}

}  // namespace dsre
