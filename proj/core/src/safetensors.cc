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

#include "dsre/safetensors.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "nlohmann/json.hpp"

namespace dsre {

static_assert(std::endian::native == std::endian::little,
              "safetensors I/O assumes a little-endian host");

int64_t Tensor::NumElements() const {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

absl::StatusOr<TensorMap> ReadSafetensors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (bytes.size() < 8) {
    return absl::DataLossError(absl::StrCat(path, ": truncated header"));
  }
  uint64_t header_len = 0;
  std::memcpy(&header_len, bytes.data(), 8);
  if (header_len > bytes.size() - 8) {
    return absl::DataLossError(absl::StrCat(path, ": header length overflows file"));
  }
  nlohmann::json header = nlohmann::json::parse(
      bytes.begin() + 8, bytes.begin() + 8 + header_len, nullptr, false);
  if (header.is_discarded() || !header.is_object()) {
    return absl::DataLossError(absl::StrCat(path, ": malformed JSON header"));
  }
  const char* data = bytes.data() + 8 + header_len;
  const uint64_t data_len = bytes.size() - 8 - header_len;

  TensorMap tensors;
  for (auto& [name, entry] : header.items()) {
    if (name == "__metadata__") continue;
    if (!entry.contains("dtype") || !entry.contains("shape") ||
        !entry.contains("data_offsets")) {
      return absl::DataLossError(absl::StrCat(path, ": bad entry for ", name));
    }
    Tensor t;
    t.shape = entry["shape"].get<std::vector<int64_t>>();
    const auto offsets = entry["data_offsets"].get<std::vector<uint64_t>>();
    const std::string dtype = entry["dtype"].get<std::string>();
    size_t width = 0;
    if (dtype == "F32") {
      width = 4;
    } else if (dtype == "F64") {
      width = 8;
    } else {
      return absl::UnimplementedError(
          absl::StrCat(path, ": tensor ", name, " has unsupported dtype ", dtype));
    }
    const int64_t n = t.NumElements();
    if (offsets.size() != 2 || offsets[1] < offsets[0] || offsets[1] > data_len ||
        offsets[1] - offsets[0] != static_cast<uint64_t>(n) * width) {
      return absl::DataLossError(
          absl::StrCat(path, ": inconsistent data offsets for ", name));
    }
    t.data.resize(n);
    const char* src = data + offsets[0];
    if (width == 4) {
      for (int64_t i = 0; i < n; ++i) {
        float f;
        std::memcpy(&f, src + 4 * i, 4);
        t.data[i] = f;
      }
    } else {
      std::memcpy(t.data.data(), src, 8 * n);
    }
    tensors.emplace(name, std::move(t));
  }
  return tensors;
}

absl::Status WriteSafetensors(const std::string& path, const TensorMap& tensors,
                              TensorDType dtype,
                              const std::map<std::string, std::string>& metadata) {
  const size_t width = dtype == TensorDType::kF32 ? 4 : 8;
  nlohmann::ordered_json header;
  if (!metadata.empty()) header["__metadata__"] = metadata;
  uint64_t offset = 0;
  for (const auto& [name, t] : tensors) {
    const uint64_t len = t.data.size() * width;
    header[name] = {{"dtype", dtype == TensorDType::kF32 ? "F32" : "F64"},
                    {"shape", t.shape},
                    {"data_offsets", {offset, offset + len}}};
    offset += len;
  }
  std::string header_text = header.dump();
  while ((8 + header_text.size()) % 8 != 0) header_text.push_back(' ');

  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  const uint64_t header_len = header_text.size();
  out.write(reinterpret_cast<const char*>(&header_len), 8);
  out.write(header_text.data(), header_text.size());
  for (const auto& [name, t] : tensors) {
    if (dtype == TensorDType::kF32) {
      for (double v : t.data) {
        const float f = static_cast<float>(v);
        out.write(reinterpret_cast<const char*>(&f), 4);
      }
    } else {
      out.write(reinterpret_cast<const char*>(t.data.data()), 8 * t.data.size());
    }
  }
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

Tensor ToTensor(const Parameter& param) {
  Tensor t;
  t.shape = param.shape;
  t.data.reserve(param.value.size());
  for (Eigen::Index r = 0; r < param.value.rows(); ++r) {
    for (Eigen::Index c = 0; c < param.value.cols(); ++c) {
      t.data.push_back(param.value(r, c));
    }
  }
  return t;
}

absl::Status AssignTensor(const Tensor& tensor, Parameter* param) {
  if (tensor.shape != param->shape) {
    return absl::InvalidArgumentError(absl::StrCat(
        "shape mismatch for tensor ", param->name, ": expected [",
        absl::StrJoin(param->shape, ", "), "], got [",
        absl::StrJoin(tensor.shape, ", "), "]"));
  }
  const Eigen::Index cols = param->value.cols();
  for (Eigen::Index r = 0; r < param->value.rows(); ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      param->value(r, c) = tensor.data[r * cols + c];
    }
  }
  return absl::OkStatus();
}

}  // namespace dsre
