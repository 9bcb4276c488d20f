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


// dsre: prepare data, train, evaluate and inspect relation extractors.

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "dsre/commands.h"
#include "dsre/manifest.h"

namespace {

using dsre::cli::RunOverrides;

// Flags shared by `train` and `ablate`; each maps to one RunConfig field.
void AddRunFlags(CLI::App* cmd, std::string* config_path, RunOverrides* o) {
  cmd->add_option("--config", *config_path,
                  "JSON run config (a run manifest also works)");
  cmd->add_option("--train", o->train_path, "training records (JSONL)");
  cmd->add_option("--output", o->output_dir, "output directory");
  cmd->add_option("--profile", o->profile, "encoder profile")
      ->check(CLI::IsMember({"tiny", "pretrained"}));
  cmd->add_option("--bundle", o->bundle_dir,
                  "pretrained bundle directory (config.json, vocab.txt, "
                  "model.safetensors)");
  cmd->add_option("--ablation", o->ablation, "model variant")
      ->check(CLI::IsMember({"full", "no_rel_emb", "no_rel_attn", "sdp_input"}));
  cmd->add_option("--path-mode", o->path_mode, "sentence region fed to the encoder")
      ->check(CLI::IsMember({"stp", "sdp", "full"}));
  cmd->add_flag("--no-entity-types", o->no_entity_types,
                "use plain entity markers without type tokens");
  cmd->add_option("--epochs", o->epochs)->check(CLI::PositiveNumber);
  cmd->add_option("--batch-size", o->batch_size)->check(CLI::PositiveNumber);
  cmd->add_option("--max-seq-length", o->max_seq_length)->check(CLI::PositiveNumber);
  cmd->add_option("--fine-tune-last-k", o->fine_tune_last_k,
                  "number of top encoder layers to train")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--lr", o->learning_rate)->check(CLI::PositiveNumber);
  cmd->add_option("--dropout", o->dropout)->check(CLI::Range(0.0, 0.999));
  cmd->add_option("--seed", o->seed);
}

int Finish(const absl::Status& status) {
  if (!status.ok()) std::cerr << "error: " << status.message() << "\n";
  return dsre::cli::ExitCode(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distantly supervised relation extraction toolkit", "dsre"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dsre::CodeVersion()));

  std::string prepare_in, prepare_out;
  CLI::App* prepare = app.add_subcommand(
      "prepare", "parse raw records and add stp/sdp index arrays");
  prepare->add_option("input", prepare_in, "raw JSONL")->required();
  prepare->add_option("output", prepare_out, "enhanced JSONL")->required();

  std::string train_config;
  RunOverrides train_flags;
  CLI::App* train = app.add_subcommand("train", "train a model and save a checkpoint");
  AddRunFlags(train, &train_config, &train_flags);

  std::string eval_ckpt, eval_test, eval_out;
  CLI::App* eval = app.add_subcommand("eval", "held-out PR curve, AUC and P@N");
  eval->add_option("--checkpoint", eval_ckpt)->required();
  eval->add_option("--test", eval_test)->required();
  eval->add_option("--output", eval_out)->required();

  std::vector<std::string> plot_curves;
  std::string plot_out;
  CLI::App* plot = app.add_subcommand("plot", "overlay PR curves in one SVG");
  plot->add_option("curves", plot_curves, "LABEL=pr_curve.csv or pr_curve.csv")
      ->required();
  plot->add_option("--output", plot_out)->required();

  std::string inspect_ckpt, inspect_data, inspect_out;
  std::vector<std::string> inspect_ids;
  CLI::App* inspect = app.add_subcommand(
      "inspect-attention", "token-level relation attention for instances");
  inspect->add_option("--checkpoint", inspect_ckpt)->required();
  inspect->add_option("--data", inspect_data)->required();
  inspect->add_option("--id", inspect_ids, "instance id (repeatable; default all)");
  inspect->add_option("--output", inspect_out, "directory for tables and heatmaps");

  std::string ablate_config;
  RunOverrides ablate_flags;
  CLI::App* ablate = app.add_subcommand("ablate", "train and score the five model variants");
  AddRunFlags(ablate, &ablate_config, &ablate_flags);
  ablate->add_option("--test", ablate_flags.test_path, "held-out records (JSONL)");

  std::string synth_config, synth_out;
  std::optional<int> synth_relations, synth_train, synth_test;
  std::optional<double> synth_noise, synth_na, synth_passive;
  std::optional<uint64_t> synth_seed;
  CLI::App* synth = app.add_subcommand(
      "make-synthetic", "generate a parsed corpus with planted relation patterns");
  synth->add_option("--config", synth_config, "JSON generator config");
  synth->add_option("--relations", synth_relations)->check(CLI::PositiveNumber);
  synth->add_option("--train-bags", synth_train)->check(CLI::PositiveNumber);
  synth->add_option("--test-bags", synth_test)->check(CLI::PositiveNumber);
  synth->add_option("--noise", synth_noise)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--na-fraction", synth_na)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--passive-fraction", synth_passive,
                    "share of sentences with the tail before the head")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--seed", synth_seed);
  synth->add_option("--output", synth_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dsre::cli::kUsageExitCode;
  }

  if (*prepare) return Finish(dsre::cli::CmdPrepare(prepare_in, prepare_out, std::cout));
  if (*train || *ablate) {
    const bool is_train = static_cast<bool>(*train);
    absl::StatusOr<dsre::cli::RunConfig> run = dsre::cli::ResolveRunConfig(
        is_train ? train_config : ablate_config, is_train ? train_flags : ablate_flags);
    if (!run.ok()) return Finish(run.status());
    return Finish(is_train ? dsre::cli::CmdTrain(*run, std::cout)
                           : dsre::cli::CmdAblate(*run, std::cout));
  }
  if (*eval) return Finish(dsre::cli::CmdEval(eval_ckpt, eval_test, eval_out, std::cout));
  if (*plot) {
    std::vector<std::pair<std::string, std::string>> curves;
    for (const std::string& arg : plot_curves) {
      const size_t eq = arg.find('=');
      if (eq == std::string::npos) {
        curves.emplace_back(arg, arg);
      } else {
        curves.emplace_back(arg.substr(0, eq), arg.substr(eq + 1));
      }
    }
    return Finish(dsre::cli::CmdPlot(curves, plot_out, std::cout));
  }
  if (*inspect) {
    return Finish(dsre::cli::CmdInspect(inspect_ckpt, inspect_data, inspect_ids,
                                        inspect_out, std::cout));
  }
  if (*synth) {
    dsre::SyntheticConfig config;
    if (!synth_config.empty()) {
      absl::StatusOr<nlohmann::json> j = dsre::ReadJsonFile(synth_config);
      if (!j.ok()) return Finish(j.status());
      absl::StatusOr<dsre::SyntheticConfig> parsed =
          dsre::SyntheticConfig::FromJson(*j, config);
      if (!parsed.ok()) return Finish(parsed.status());
      config = *parsed;
    }
    if (synth_relations) config.num_relations = *synth_relations;
    if (synth_train) config.train_bags = *synth_train;
    if (synth_test) config.test_bags = *synth_test;
    if (synth_noise) config.noise_rate = *synth_noise;
    if (synth_na) config.na_fraction = *synth_na;
    if (synth_passive) config.passive_fraction = *synth_passive;
    if (synth_seed) config.seed = *synth_seed;
    return Finish(dsre::cli::CmdMakeSynthetic(config, synth_out, std::cout));
  }
  return dsre::cli::kUsageExitCode;
}
