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

// Multi-instance training: class-weighted bag loss, AdamW with decoupled
// weight decay, linear warm-up followed by cosine decay.

#ifndef DSRE_TRAINER_H_
#define DSRE_TRAINER_H_

#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dsre/corpus.h"
#include "dsre/model.h"
#include "dsre/parameter.h"
#include "nlohmann/json.hpp"

namespace dsre {

struct TrainConfig {
  int batch_size = 32;  // bags per optimizer step
  int epochs = 3;
  double learning_rate = 2e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double warmup_fraction = 0.001;
  double weight_decay = 0.001;
  double dropout = 0.4;
  int max_bag_size = 500;
  bool class_weighted = true;
  uint64_t seed = 1;

  static TrainConfig PretrainedDefaults() { return TrainConfig(); }
  // Settings for the 2-layer test encoder trained from scratch.
  static TrainConfig TinyDefaults();

  absl::Status Validate() const;
  nlohmann::json ToJson() const;
  // Fields absent from `j` keep their values from `base`.
  static absl::StatusOr<TrainConfig> FromJson(const nlohmann::json& j,
                                              const TrainConfig& base);
};

// ceil(fraction * total_steps).
int WarmupSteps(int total_steps, double fraction);

// Learning rate at 1-based `step`: linear ramp to `base` over the warm-up
// steps, then half-cosine decay reaching 0 at `total_steps`.
double LearningRate(int step, int total_steps, int warmup_steps, double base);

class AdamW {
 public:
  AdamW(ParameterList params, double beta1, double beta2, double epsilon,
        double weight_decay);

  // One update of every trainable parameter row using the current grads.
  void Step(double learning_rate);
  int64_t step_count() const { return step_; }

 private:
  ParameterList params_;
  std::vector<Eigen::MatrixXd> m_, v_;
  double beta1_, beta2_, epsilon_, weight_decay_;
  int64_t step_ = 0;
};

struct StepRecord {
  int step = 0;
  double lr = 0.0;
  double loss = 0.0;
  int epoch = 0;

  nlohmann::json ToJson() const;
};

struct TrainResult {
  std::vector<StepRecord> log;
  int total_steps = 0;
  int num_bags = 0;
  // Instances dropped because their structured input could not be built.
  int skipped_instances = 0;
  std::vector<double> class_weights;
};

// Trains `model` in place on the bags of `instances`. Every step is appended
// to `log_stream` as one JSON line when it is non-null. Aborts with the step
// index on a non-finite loss.
absl::StatusOr<TrainResult> Train(RelationExtractor* model,
                                  const std::vector<Instance>& instances,
                                  const TrainConfig& config,
                                  std::ostream* log_stream = nullptr);

// Draws min(n, cap) distinct indices from [0, n) in ascending order; all of
// them when n <= cap.
std::vector<int> SubsampleBag(int n, int cap, std::mt19937_64* rng);

}  // namespace dsre

#endif  // DSRE_TRAINER_H_
