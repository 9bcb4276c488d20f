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

#include "dsre/parameter.h"

namespace dsre {

Parameter::Parameter(std::string name, Eigen::Index rows, Eigen::Index cols,
                     std::vector<int64_t> shape, bool decay)
    : name(std::move(name)),
      value(Eigen::MatrixXd::Zero(rows, cols)),
      grad(Eigen::MatrixXd::Zero(rows, cols)),
      shape(std::move(shape)),
      decay(decay) {}

Parameter Parameter::Matrix(std::string name, Eigen::Index rows,
                            Eigen::Index cols) {
  return Parameter(std::move(name), rows, cols, {rows, cols}, true);
}

Parameter Parameter::Vector(std::string name, Eigen::Index n) {
  return Parameter(std::move(name), 1, n, {n}, false);
}

void Parameter::FillNormal(double mean, double stddev, std::mt19937_64* rng) {
  std::normal_distribution<double> dist(mean, stddev);
  // Row-major fill so the draw order matches the exported layout.
  for (Eigen::Index r = 0; r < value.rows(); ++r) {
    for (Eigen::Index c = 0; c < value.cols(); ++c) value(r, c) = dist(*rng);
  }
}

void ZeroGrads(const ParameterList& params) {
  for (Parameter* p : params) p->ZeroGrad();
}

int64_t CountTrainable(const ParameterList& params) {
  int64_t n = 0;
  for (const Parameter* p : params) {
    if (p->trainable) n += (p->value.rows() - p->frozen_rows) * p->value.cols();
  }
  return n;
}

}  // namespace dsre
