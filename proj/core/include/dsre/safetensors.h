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

// Reader and writer for the safetensors container: an 8-byte little-endian
// header length, a JSON header mapping names to dtype/shape/offsets, then raw
// little-endian tensor bytes. F32 and F64 are supported; tensors are held in
// memory as doubles.

#ifndef DSRE_SAFETENSORS_H_
#define DSRE_SAFETENSORS_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dsre/parameter.h"

namespace dsre {

struct Tensor {
  std::vector<int64_t> shape;
  // Row-major.
  std::vector<double> data;

  int64_t NumElements() const;
};

using TensorMap = std::map<std::string, Tensor>;

enum class TensorDType { kF32, kF64 };

absl::StatusOr<TensorMap> ReadSafetensors(const std::string& path);

// Tensors are written in name order, so equal maps give equal bytes.
absl::Status WriteSafetensors(const std::string& path, const TensorMap& tensors,
                              TensorDType dtype = TensorDType::kF64,
                              const std::map<std::string, std::string>& metadata = {});

Tensor ToTensor(const Parameter& param);

// Copies `tensor` into `param`, failing with the parameter name on a shape
// mismatch.
absl::Status AssignTensor(const Tensor& tensor, Parameter* param);

}  // namespace dsre

#endif  // DSRE_SAFETENSORS_H_
