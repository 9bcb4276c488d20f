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

// Run manifests: the JSON record written next to every artifact so a run can
// be reproduced from it alone, plus the content hashes stamped into outputs.

#ifndef DSRE_MANIFEST_H_
#define DSRE_MANIFEST_H_

#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace dsre {

// Lower-case hex SHA-256.
std::string Sha256Hex(const std::string& bytes);
absl::StatusOr<std::string> Sha256File(const std::string& path);

// Project version plus `git describe` at configure time.
const char* CodeVersion();

// Hash of the canonical (sorted-key, compact) serialization.
std::string JsonHash(const nlohmann::json& j);

// Writes `manifest` (pretty-printed, sorted keys) and returns the SHA-256 of
// the written file.
absl::StatusOr<std::string> WriteManifest(const std::string& path,
                                          const nlohmann::json& manifest);

absl::StatusOr<nlohmann::json> ReadJsonFile(const std::string& path);
absl::Status WriteTextFile(const std::string& path, const std::string& text);
absl::StatusOr<std::string> ReadTextFile(const std::string& path);

}  // namespace dsre

#endif  // DSRE_MANIFEST_H_
