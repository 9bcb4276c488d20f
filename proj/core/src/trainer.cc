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

#include "dsre/trainer.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>

#include "absl/strings/str_cat.h"

namespace dsre {

TrainConfig TrainConfig::TinyDefaults() {
  TrainConfig c;
  c.batch_size = 16;
  c.learning_rate = 2e-3;
  c.warmup_fraction = 0.05;
  return c;
}

absl::Status TrainConfig::Validate() const {
  if (batch_size <= 0 || epochs <= 0 || max_bag_size <= 0) {
    return absl::InvalidArgumentError(
        "batch_size, epochs and max_bag_size must be positive");
  }
  if (!(learning_rate > 0.0) || !(adam_epsilon > 0.0)) {
    return absl::InvalidArgumentError("learning_rate and adam_epsilon must be positive");
  }
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
    return absl::InvalidArgumentError("adam betas must lie in [0, 1)");
  }
  if (warmup_fraction < 0.0 || warmup_fraction > 1.0) {
    return absl::InvalidArgumentError("warmup_fraction must lie in [0, 1]");
  }
  if (weight_decay < 0.0) {
    return absl::InvalidArgumentError("weight_decay must be non-negative");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    return absl::InvalidArgumentError("dropout must lie in [0, 1)");
  }
  return absl::OkStatus();
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"batch_size", batch_size},
          {"epochs", epochs},
          {"learning_rate", learning_rate},
          {"beta1", beta1},
          {"beta2", beta2},
          {"adam_epsilon", adam_epsilon},
          {"warmup_fraction", warmup_fraction},
          {"weight_decay", weight_decay},
          {"dropout", dropout},
          {"max_bag_size", max_bag_size},
          {"class_weighted", class_weighted},
          {"seed", seed}};
}

absl::StatusOr<TrainConfig> TrainConfig::FromJson(const nlohmann::json& j,
                                                  const TrainConfig& base) {
  TrainConfig c = base;
  if (!j.is_object()) return absl::InvalidArgumentError("train config must be an object");
  try {
    c.batch_size = j.value("batch_size", c.batch_size);
    c.epochs = j.value("epochs", c.epochs);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
    c.warmup_fraction = j.value("warmup_fraction", c.warmup_fraction);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.dropout = j.value("dropout", c.dropout);
    c.max_bag_size = j.value("max_bag_size", c.max_bag_size);
    c.class_weighted = j.value("class_weighted", c.class_weighted);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("train config: ", e.what()));
  }
  if (absl::Status s = c.Validate(); !s.ok()) return s;
  return c;
}

int WarmupSteps(int total_steps, double fraction) {
  return static_cast<int>(std::ceil(fraction * total_steps - 1e-12));
}

double LearningRate(int step, int total_steps, int warmup_steps, double base) {
  if (step <= warmup_steps) {
    return base * static_cast<double>(step) / static_cast<double>(warmup_steps);
  }
  if (total_steps <= warmup_steps) return 0.0;
  const double progress = static_cast<double>(step - warmup_steps) /
                          static_cast<double>(total_steps - warmup_steps);
  return base * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

AdamW::AdamW(ParameterList params, double beta1, double beta2, double epsilon,
             double weight_decay)
    : params_(std::move(params)),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon),
      weight_decay_(weight_decay) {
  for (const Parameter* p : params_) {
    m_.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
  }
}

void AdamW::Step(double learning_rate) {
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = *params_[i];
    if (!p.AnyTrainable()) continue;
    const Eigen::Index first = p.frozen_rows;
    const Eigen::Index rows = p.value.rows() - first;
    auto g = p.grad.bottomRows(rows);
    auto m = m_[i].bottomRows(rows);
    auto v = v_[i].bottomRows(rows);
    auto w = p.value.bottomRows(rows);
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseAbs2();
    if (p.decay && weight_decay_ > 0.0) w *= 1.0 - learning_rate * weight_decay_;
    w.array() -= learning_rate * (m.array() / c1) /
                 ((v.array() / c2).sqrt() + epsilon_);
  }
}

nlohmann::json StepRecord::ToJson() const {
  return {{"step", step}, {"lr", lr}, {"loss", loss}, {"epoch", epoch}};
}

std::vector<int> SubsampleBag(int n, int cap, std::mt19937_64* rng) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  if (n <= cap) return all;
  for (int i = 0; i < cap; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(all[i], all[pick(*rng)]);
  }
  all.resize(cap);
  std::sort(all.begin(), all.end());
  return all;
}

absl::StatusOr<TrainResult> Train(RelationExtractor* model,
                                  const std::vector<Instance>& instances,
                                  const TrainConfig& config,
                                  std::ostream* log_stream) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  TrainResult result;
  model->bag_encoder().dropout_rate = config.dropout;

  std::vector<std::optional<StructuredInput>> inputs(instances.size());
  for (size_t i = 0; i < instances.size(); ++i) {
    absl::StatusOr<StructuredInput> input = model->Prepare(instances[i]);
    if (input.ok()) {
      inputs[i] = *std::move(input);
    } else {
      ++result.skipped_instances;
    }
  }

  std::vector<Bag> bags;
  for (Bag& bag : GroupIntoBags(instances, model->relations(), Split::kTrain)) {
    std::erase_if(bag.instance_indices, [&](int i) { return !inputs[i]; });
    if (!bag.instance_indices.empty()) bags.push_back(std::move(bag));
  }
  if (bags.empty()) return absl::FailedPreconditionError("no trainable bags");
  result.num_bags = static_cast<int>(bags.size());
  result.class_weights =
      config.class_weighted
          ? ClassWeights(bags, model->relations())
          : std::vector<double>(model->relations().size(), 1.0);

  const int batches_per_epoch =
      (result.num_bags + config.batch_size - 1) / config.batch_size;
  result.total_steps = batches_per_epoch * config.epochs;
  const int warmup = WarmupSteps(result.total_steps, config.warmup_fraction);

  ParameterList params = model->Parameters();
  AdamW optimizer(params, config.beta1, config.beta2, config.adam_epsilon,
                  config.weight_decay);
  std::mt19937_64 rng(config.seed);
  std::vector<int> order(bags.size());
  std::iota(order.begin(), order.end(), 0);

  int step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int b = 0; b < batches_per_epoch; ++b) {
      ++step;
      ZeroGrads(params);
      const int begin = b * config.batch_size;
      const int end = std::min(begin + config.batch_size, result.num_bags);
      const double batch = static_cast<double>(end - begin);
      double loss = 0.0;
      for (int k = begin; k < end; ++k) {
        const Bag& bag = bags[order[k]];
        std::vector<const StructuredInput*> bag_inputs;
        for (int j : SubsampleBag(static_cast<int>(bag.instance_indices.size()),
                                  config.max_bag_size, &rng)) {
          bag_inputs.push_back(&*inputs[bag.instance_indices[j]]);
        }
        const double weight = result.class_weights[bag.label()];
        absl::StatusOr<double> nll = model->AccumulateBagGradient(
            bag_inputs, bag.label(), weight / batch, &rng);
        if (!nll.ok()) {
          return absl::Status(nll.status().code(),
                              absl::StrCat("step ", step, ": ",
                                           nll.status().message()));
        }
        loss += weight * *nll / batch;
      }
      if (!std::isfinite(loss)) {
        return absl::InternalError(
            absl::StrCat("non-finite loss at step ", step));
      }
      const double lr =
          LearningRate(step, result.total_steps, warmup, config.learning_rate);
      optimizer.Step(lr);
      StepRecord record{step, lr, loss, epoch};
      if (log_stream != nullptr) *log_stream << record.ToJson().dump() << "\n";
      result.log.push_back(record);
    }
  }
  return result;
}

}  // namespace dsre
