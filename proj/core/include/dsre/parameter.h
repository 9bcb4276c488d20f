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

#ifndef DSRE_PARAMETER_H_
#define DSRE_PARAMETER_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "Eigen/Dense"

namespace dsre {

// A named weight tensor with its gradient accumulator. Vectors are stored as
// 1 x n matrices; `shape` is the exported (row-major) shape.
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Eigen::Index rows, Eigen::Index cols,
            std::vector<int64_t> shape, bool decay = true);

  // Matrix [rows x cols] exported with shape {rows, cols}.
  static Parameter Matrix(std::string name, Eigen::Index rows,
                          Eigen::Index cols);
  // Row vector exported with shape {n}. Never weight-decayed.
  static Parameter Vector(std::string name, Eigen::Index n);

  std::string name;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;
  std::vector<int64_t> shape;
  bool trainable = true;
  // Rows [0, frozen_rows) stay fixed even when the parameter is trainable.
  Eigen::Index frozen_rows = 0;
  bool decay = true;

  bool RowTrainable(Eigen::Index row) const {
    return trainable && row >= frozen_rows;
  }
  bool AnyTrainable() const { return trainable && frozen_rows < value.rows(); }
  void ZeroGrad() { grad.setZero(); }
  Eigen::Index size() const { return value.size(); }

  void FillNormal(double mean, double stddev, std::mt19937_64* rng);
};

using ParameterList = std::vector<Parameter*>;

// Clears all gradient accumulators.
void ZeroGrads(const ParameterList& params);

int64_t CountTrainable(const ParameterList& params);

}  // namespace dsre

#endif  // DSRE_PARAMETER_H_
