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

#include "dsre/model.h"

#include <filesystem>
#include <optional>
#include <utility>

#include "absl/strings/str_cat.h"
#include "dsre/manifest.h"
#include "dsre/safetensors.h"

namespace dsre {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Bags above this size are encoded twice during training instead of holding
// every activation cache at once.
constexpr size_t kMaxCachedSentences = 32;

bool AnyEncoderTrainable(TransformerEncoder& encoder) {
  for (const Parameter* p : encoder.Parameters()) {
    if (p->AnyTrainable()) return true;
  }
  return false;
}

}  // namespace

nlohmann::json ModelOptions::ToJson() const {
  return {{"path_mode", PathModeName(input.path_mode)},
          {"use_entity_types", input.use_entity_types},
          {"max_seq_length", input.max_seq_length},
          {"ablation", AblationName(ablation)},
          {"dropout", dropout}};
}

absl::StatusOr<ModelOptions> ModelOptions::FromJson(const nlohmann::json& j) {
  ModelOptions o;
  try {
    auto mode = ParsePathMode(j.value("path_mode", std::string("stp")));
    if (!mode.ok()) return mode.status();
    o.input.path_mode = *mode;
    o.input.use_entity_types = j.value("use_entity_types", true);
    o.input.max_seq_length = j.value("max_seq_length", 64);
    auto ablation = ParseAblation(j.value("ablation", std::string("full")));
    if (!ablation.ok()) return ablation.status();
    o.ablation = *ablation;
    o.dropout = j.value("dropout", 0.4);
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("model options: ", e.what()));
  }
  if (o.dropout < 0.0 || o.dropout >= 1.0) {
    return absl::InvalidArgumentError("dropout must lie in [0, 1)");
  }
  return o;
}

ModelOptions WithAblation(ModelOptions options, Ablation ablation) {
  options.ablation = ablation;
  if (ablation == Ablation::kSdpInput) options.input.path_mode = PathMode::kSdp;
  return options;
}

RelationExtractor::RelationExtractor(const EncoderConfig& config,
                                     WordPieceTokenizer tokenizer,
                                     RelationVocab relations,
                                     const ModelOptions& options)
    : RelationExtractor(TransformerEncoder(config), std::move(tokenizer),
                        std::move(relations), options) {}

RelationExtractor::RelationExtractor(TransformerEncoder encoder,
                                     WordPieceTokenizer tokenizer,
                                     RelationVocab relations,
                                     const ModelOptions& options)
    : encoder_(std::move(encoder)),
      tokenizer_(std::move(tokenizer)),
      relations_(std::move(relations)),
      options_(options),
      head_(encoder_.config().hidden_dim),
      bag_(ReprDim(options.ablation, encoder_.config().hidden_dim),
           relations_.size(), options.dropout) {
  SetFineTuneLayers(encoder_.config().fine_tune_last_k);
}

absl::StatusOr<RelationExtractor> RelationExtractor::CreateTiny(
    const std::vector<Instance>& instances, RelationVocab relations,
    const ModelOptions& options, const EncoderConfig& config, uint64_t seed) {
  WordPieceTokenizer tokenizer(BuildVocabulary(instances));
  const int base = tokenizer.size();
  tokenizer.AddSpecialTokens(SpecialVocab::AddedTokens());
  EncoderConfig c = config;
  c.vocab_size = tokenizer.size();
  if (absl::Status s = c.Validate(); !s.ok()) return s;
  if (options.input.max_seq_length > c.max_positions) {
    return absl::InvalidArgumentError(absl::StrCat(
        "max_seq_length ", options.input.max_seq_length,
        " exceeds max_positions ", c.max_positions));
  }
  RelationExtractor model(c, std::move(tokenizer), std::move(relations), options);
  model.encoder_.set_num_base_tokens(base);
  std::mt19937_64 rng(seed);
  model.encoder_.InitializeRandom(&rng);
  model.InitializeHeads(&rng);
  model.SetFineTuneLayers(c.fine_tune_last_k);
  return model;
}

absl::StatusOr<RelationExtractor> RelationExtractor::CreatePretrained(
    const std::string& bundle_dir, RelationVocab relations,
    const ModelOptions& options, uint64_t seed) {
  absl::StatusOr<PretrainedEncoder> pretrained = LoadPretrained(bundle_dir, seed);
  if (!pretrained.ok()) return pretrained.status();
  if (options.input.max_seq_length > pretrained->encoder.config().max_positions) {
    return absl::InvalidArgumentError("max_seq_length exceeds max_positions");
  }
  RelationExtractor model(std::move(pretrained->encoder),
                          std::move(pretrained->tokenizer), std::move(relations),
                          options);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  model.InitializeHeads(&rng);
  model.SetFineTuneLayers(model.encoder_.config().fine_tune_last_k);
  return model;
}

void RelationExtractor::InitializeHeads(std::mt19937_64* rng) {
  head_.InitializeRandom(rng);
  bag_.InitializeRandom(rng);
}

TrainablePartition RelationExtractor::SetFineTuneLayers(int k) {
  TrainablePartition partition = ApplyTrainableMask(&encoder_, k);
  for (Parameter* p : HeadParameters()) {
    p->trainable = true;
    p->frozen_rows = 0;
    partition.trainable.push_back(p->name);
  }
  return partition;
}

absl::StatusOr<StructuredInput> RelationExtractor::Prepare(
    const Instance& instance) const {
  return PrepareInput(instance, tokenizer_, options_.input);
}

absl::StatusOr<RelationExtractor::SentenceOutput>
RelationExtractor::EncodeSentence(const StructuredInput& input,
                                  EncoderCache* cache, std::mt19937_64* rng) const {
  absl::StatusOr<TokenStates> states = encoder_.Encode(input, cache, rng);
  if (!states.ok()) return states.status();
  absl::StatusOr<SentenceRepr> repr = ComputeSentenceRepr(
      *states, input, head_, options_.ablation, bag_.repr_dim());
  if (!repr.ok()) return repr.status();
  return SentenceOutput{*std::move(states), *std::move(repr)};
}

absl::StatusOr<VectorXd> RelationExtractor::PredictBag(
    const std::vector<const StructuredInput*>& inputs) const {
  MatrixXd sentences(inputs.size(), bag_.repr_dim());
  for (size_t i = 0; i < inputs.size(); ++i) {
    absl::StatusOr<SentenceOutput> out = EncodeSentence(*inputs[i]);
    if (!out.ok()) return out.status();
    sentences.row(i) = out->repr.s.transpose();
  }
  absl::StatusOr<BagForward> forward = ForwardBag(sentences, bag_);
  if (!forward.ok()) return forward.status();
  return forward->probs;
}

absl::StatusOr<double> RelationExtractor::AccumulateBagGradient(
    const std::vector<const StructuredInput*>& inputs, int gold, double coef,
    std::mt19937_64* rng) {
  const size_t n = inputs.size();
  const bool keep = n <= kMaxCachedSentences;
  std::vector<EncoderCache> caches(keep ? n : 0);
  std::vector<SentenceOutput> outputs;
  outputs.reserve(keep ? n : 0);
  // One dropout stream per sentence, so a recomputed pass sees the same masks.
  std::vector<uint64_t> seeds(n);
  if (rng != nullptr) {
    for (uint64_t& seed : seeds) seed = (*rng)();
  }
  auto sentence_rng = [&](size_t i) {
    return rng != nullptr ? std::optional<std::mt19937_64>(std::in_place, seeds[i])
                          : std::nullopt;
  };
  MatrixXd sentences(n, bag_.repr_dim());
  for (size_t i = 0; i < n; ++i) {
    std::optional<std::mt19937_64> dropout = sentence_rng(i);
    absl::StatusOr<SentenceOutput> out = EncodeSentence(
        *inputs[i], keep ? &caches[i] : nullptr, dropout ? &*dropout : nullptr);
    if (!out.ok()) return out.status();
    sentences.row(i) = out->repr.s.transpose();
    if (keep) outputs.push_back(*std::move(out));
  }
  absl::StatusOr<BagForward> forward = ForwardBag(sentences, bag_, rng);
  if (!forward.ok()) return forward.status();
  const MatrixXd d_sentences = BackwardBag(*forward, gold, coef, bag_);

  const bool encoder_trainable = AnyEncoderTrainable(encoder_);
  const bool head_used = options_.ablation != Ablation::kNoRelEmb;
  if (!encoder_trainable && !head_used) return -forward->log_probs(gold);
  for (size_t i = 0; i < n; ++i) {
    EncoderCache recomputed;
    const EncoderCache* cache = keep ? &caches[i] : &recomputed;
    SentenceOutput redo;
    const SentenceOutput* out = keep ? &outputs[i] : &redo;
    if (!keep) {
      std::optional<std::mt19937_64> dropout = sentence_rng(i);
      absl::StatusOr<SentenceOutput> again =
          EncodeSentence(*inputs[i], &recomputed, dropout ? &*dropout : nullptr);
      if (!again.ok()) return again.status();
      redo = *std::move(again);
    }
    const MatrixXd d_hidden =
        SentenceReprBackward(out->states, *inputs[i], head_, options_.ablation,
                             out->repr, d_sentences.row(i).transpose());
    if (encoder_trainable) encoder_.Backward(d_hidden, *cache);
  }
  return -forward->log_probs(gold);
}

ParameterList RelationExtractor::HeadParameters() {
  ParameterList params = head_.Parameters();
  for (Parameter* p : bag_.Parameters()) params.push_back(p);
  return params;
}

ParameterList RelationExtractor::Parameters() {
  ParameterList params = encoder_.Parameters();
  for (Parameter* p : HeadParameters()) params.push_back(p);
  return params;
}

absl::Status RelationExtractor::Save(const std::string& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }
  auto& self = const_cast<RelationExtractor&>(*this);
  TensorMap tensors;
  for (const Parameter* p : self.Parameters()) tensors[p->name] = ToTensor(*p);
  if (absl::Status s = WriteSafetensors(dir + "/model.safetensors", tensors);
      !s.ok()) {
    return s;
  }
  if (absl::Status s = tokenizer_.Save(dir + "/vocab.txt"); !s.ok()) return s;
  if (absl::Status s =
          WriteTextFile(dir + "/relations.json", relations_.ToJson().dump(2) + "\n");
      !s.ok()) {
    return s;
  }
  nlohmann::json config = {{"encoder", encoder_.config().ToJson()},
                           {"num_base_tokens", encoder_.num_base_tokens()},
                           {"options", options_.ToJson()}};
  return WriteTextFile(dir + "/model_config.json", config.dump(2) + "\n");
}

absl::StatusOr<RelationExtractor> RelationExtractor::Load(const std::string& dir) {
  absl::StatusOr<nlohmann::json> config = ReadJsonFile(dir + "/model_config.json");
  if (!config.ok()) return config.status();
  if (!config->contains("encoder") || !config->contains("options")) {
    return absl::InvalidArgumentError(
        absl::StrCat(dir, "/model_config.json lacks encoder or options"));
  }
  absl::StatusOr<EncoderConfig> encoder_config =
      EncoderConfig::FromJson((*config)["encoder"]);
  if (!encoder_config.ok()) return encoder_config.status();
  absl::StatusOr<ModelOptions> options = ModelOptions::FromJson((*config)["options"]);
  if (!options.ok()) return options.status();
  absl::StatusOr<WordPieceTokenizer> tokenizer =
      WordPieceTokenizer::FromFile(dir + "/vocab.txt");
  if (!tokenizer.ok()) return tokenizer.status();
  tokenizer->AddSpecialTokens(SpecialVocab::AddedTokens());
  if (tokenizer->size() != encoder_config->vocab_size) {
    return absl::InvalidArgumentError(absl::StrCat(
        "checkpoint vocab.txt has ", tokenizer->size(),
        " tokens but the encoder expects ", encoder_config->vocab_size));
  }
  absl::StatusOr<nlohmann::json> relations_json = ReadJsonFile(dir + "/relations.json");
  if (!relations_json.ok()) return relations_json.status();
  absl::StatusOr<RelationVocab> relations = RelationVocab::FromJson(*relations_json);
  if (!relations.ok()) return relations.status();

  RelationExtractor model(*encoder_config, *std::move(tokenizer),
                          *std::move(relations), *options);
  model.encoder_.set_num_base_tokens(
      config->value("num_base_tokens", encoder_config->vocab_size));
  model.SetFineTuneLayers(encoder_config->fine_tune_last_k);

  absl::StatusOr<TensorMap> tensors = ReadSafetensors(dir + "/model.safetensors");
  if (!tensors.ok()) return tensors.status();
  for (Parameter* p : model.Parameters()) {
    auto it = tensors->find(p->name);
    if (it == tensors->end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("checkpoint is missing tensor ", p->name));
    }
    if (absl::Status s = AssignTensor(it->second, p); !s.ok()) return s;
  }
  return model;
}

}  // namespace dsre
