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

// The pipeline commands behind the `dsre` tool. Each artifact-producing
// command writes manifest.json (configuration, seeds, input hashes, code
// version) into its output directory before its other outputs, and stamps
// those outputs with the manifest hash.

#ifndef DSRE_COMMANDS_H_
#define DSRE_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dsre/corpus.h"
#include "dsre/encoder.h"
#include "dsre/model.h"
#include "dsre/synthetic.h"
#include "dsre/trainer.h"
#include "nlohmann/json.hpp"

namespace dsre::cli {

// Process exit code for a command result: 0 ok, 3 I/O, 4 bad data or
// configuration, 5 numeric or internal failure. Usage errors exit with 2
// before any command runs.
int ExitCode(const absl::Status& status);

inline constexpr int kUsageExitCode = 2;

struct RunConfig {
  std::string train_path;
  std::string test_path;
  std::string output_dir;
  std::string profile = "tiny";  // "tiny" or "pretrained"
  std::string bundle_dir;        // pretrained profile only
  EncoderConfig tiny_encoder = EncoderConfig::Tiny(0);
  int fine_tune_last_k = -1;     // -1 keeps the profile default
  TrainConfig train = TrainConfig::TinyDefaults();
  ModelOptions model;
  uint64_t seed = 1;

  nlohmann::json ToJson() const;
  // Starts from the defaults of the profile named in `j` (tiny if absent).
  static absl::StatusOr<RunConfig> FromJson(const nlohmann::json& j);
};

// Command-line values; set fields override the config file.
struct RunOverrides {
  std::optional<std::string> train_path, test_path, output_dir, profile,
      bundle_dir, ablation, path_mode;
  std::optional<bool> no_entity_types;
  std::optional<int> epochs, batch_size, max_seq_length, fine_tune_last_k;
  std::optional<double> learning_rate, dropout;
  std::optional<uint64_t> seed;
};

// Reads `config_path` (may be empty; a run manifest is also accepted) and
// applies `overrides`.
absl::StatusOr<RunConfig> ResolveRunConfig(const std::string& config_path,
                                           const RunOverrides& overrides);

// Untrained model for `run` and `options`.
absl::StatusOr<RelationExtractor> BuildModel(const RunConfig& run,
                                             const std::vector<Instance>& train,
                                             const RelationVocab& relations,
                                             const ModelOptions& options);

// Raw records: either records already in the native layout, or token lists
// with "token", "h"/"t" ({name, id, pos, type}), "relation",
// "stanford_head" (1-based, 0 = root) and "stanford_deprel".
absl::StatusOr<Instance> ConvertRawRecord(const nlohmann::json& record,
                                          int64_t line);

// Native record plus "stp" and "sdp" token-index arrays.
nlohmann::ordered_json EnhancedRecord(const Instance& instance);

absl::Status CmdPrepare(const std::string& input_path,
                        const std::string& output_path, std::ostream& out);
absl::Status CmdMakeSynthetic(const SyntheticConfig& config,
                              const std::string& output_dir, std::ostream& out);
absl::Status CmdTrain(const RunConfig& run, std::ostream& out);
absl::Status CmdEval(const std::string& checkpoint_dir,
                     const std::string& test_path,
                     const std::string& output_dir, std::ostream& out);
absl::Status CmdPlot(const std::vector<std::pair<std::string, std::string>>&
                         labeled_curve_paths,
                     const std::string& output_path, std::ostream& out);
// Empty `instance_ids` inspects every instance in `data_path`.
absl::Status CmdInspect(const std::string& checkpoint_dir,
                        const std::string& data_path,
                        const std::vector<std::string>& instance_ids,
                        const std::string& output_dir, std::ostream& out);
absl::Status CmdAblate(const RunConfig& run, std::ostream& out);

}  // namespace dsre::cli

#endif  // DSRE_COMMANDS_H_
