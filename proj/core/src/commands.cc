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

#include "dsre/commands.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <cctype>
#include <map>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dsre/deptree.h"
#include "dsre/eval.h"
#include "dsre/manifest.h"
#include "dsre/plot.h"
#include "dsre/structured_input.h"

namespace dsre::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

int ExitCode(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 0;
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kDataLoss:
    case absl::StatusCode::kAlreadyExists:
      return 3;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kUnimplemented:
      return 4;
    default:
      return 5;
  }
}

namespace {

absl::Status MakeDir(const std::string& dir) {
  if (dir.empty()) return absl::InvalidArgumentError("output directory not set");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }
  return absl::OkStatus();
}

absl::Status RequireFile(const std::string& path, const char* what) {
  if (path.empty()) return absl::InvalidArgumentError(absl::StrCat(what, " path not set"));
  if (!fs::exists(path)) return absl::NotFoundError(absl::StrCat(what, " not found: ", path));
  return absl::OkStatus();
}

// Prints collected record errors; returns a data error when there were any.
absl::Status ReportRecordErrors(const std::string& path,
                                const std::vector<RecordError>& errors) {
  for (const RecordError& e : errors) {
    std::cerr << path << ":" << e.line << ": " << e.message << "\n";
  }
  if (errors.empty()) return absl::OkStatus();
  return absl::InvalidArgumentError(
      absl::StrCat(errors.size(), " record(s) rejected in ", path));
}

absl::StatusOr<json> InputEntry(const std::string& path, const LoadedCorpus& corpus) {
  absl::StatusOr<std::string> hash = Sha256File(path);
  if (!hash.ok()) return hash.status();
  return json{{"path", path},
              {"sha256", *hash},
              {"records", corpus.instances.size()},
              {"rejected", corpus.errors.size()}};
}

json BaseManifest(const std::string& command) {
  return {{"command", command}, {"code_version", CodeVersion()}};
}

// The first error wins; later statuses only matter if everything else is ok.
absl::Status Combine(absl::Status first, const absl::Status& second) {
  if (!first.ok()) return first;
  return second;
}

ModelOptions EffectiveOptions(const RunConfig& run) {
  ModelOptions options = WithAblation(run.model, run.model.ablation);
  options.dropout = run.train.dropout;
  return options;
}

}  // namespace

json RunConfig::ToJson() const {
  json encoder = {{"profile", profile}, {"fine_tune_last_k", fine_tune_last_k}};
  if (profile == "pretrained") {
    encoder["bundle"] = bundle_dir;
  } else {
    json tiny = tiny_encoder.ToJson();
    tiny.erase("vocab_size");
    encoder["tiny"] = tiny;
  }
  TrainConfig t = train;
  t.seed = seed;
  return {{"train_path", train_path},
          {"test_path", test_path},
          {"output_dir", output_dir},
          {"encoder", encoder},
          {"training", t.ToJson()},
          {"model", model.ToJson()},
          {"seed", seed}};
}

absl::StatusOr<RunConfig> RunConfig::FromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("run config must be a JSON object");
  RunConfig run;
  try {
    run.train_path = j.value("train_path", run.train_path);
    run.test_path = j.value("test_path", run.test_path);
    run.output_dir = j.value("output_dir", run.output_dir);
    run.seed = j.value("seed", run.seed);
    if (j.contains("encoder")) {
      const json& e = j["encoder"];
      run.profile = e.value("profile", run.profile);
      run.bundle_dir = e.value("bundle", run.bundle_dir);
      run.fine_tune_last_k = e.value("fine_tune_last_k", run.fine_tune_last_k);
      if (e.contains("tiny")) {
        json tiny = run.tiny_encoder.ToJson();
        tiny.update(e["tiny"]);
        tiny["vocab_size"] = 1;
        absl::StatusOr<EncoderConfig> c = EncoderConfig::FromJson(tiny);
        if (!c.ok()) return c.status();
        run.tiny_encoder = *c;
        run.tiny_encoder.vocab_size = 0;
      }
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("run config: ", e.what()));
  }
  if (run.profile != "tiny" && run.profile != "pretrained") {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown encoder profile '", run.profile, "'"));
  }
  run.train = run.profile == "tiny" ? TrainConfig::TinyDefaults()
                                    : TrainConfig::PretrainedDefaults();
  if (j.contains("training")) {
    absl::StatusOr<TrainConfig> t = TrainConfig::FromJson(j["training"], run.train);
    if (!t.ok()) return t.status();
    run.train = *t;
    if (!j.contains("seed") && j["training"].contains("seed")) run.seed = run.train.seed;
  }
  if (j.contains("model")) {
    absl::StatusOr<ModelOptions> m = ModelOptions::FromJson(j["model"]);
    if (!m.ok()) return m.status();
    run.model = *m;
  }
  run.train.seed = run.seed;
  return run;
}

absl::StatusOr<RunConfig> ResolveRunConfig(const std::string& config_path,
                                           const RunOverrides& o) {
  json j = json::object();
  if (!config_path.empty()) {
    absl::StatusOr<json> file = ReadJsonFile(config_path);
    if (!file.ok()) return file.status();
    j = *std::move(file);
    // A run manifest carries its configuration under "config".
    if (j.is_object() && j.contains("command") && j.contains("config")) {
      j = j["config"];
    }
  }
  if (!j.is_object()) return absl::InvalidArgumentError("config file must hold an object");
  if (o.profile) j["encoder"]["profile"] = *o.profile;
  absl::StatusOr<RunConfig> parsed = RunConfig::FromJson(j);
  if (!parsed.ok()) return parsed.status();
  RunConfig run = *std::move(parsed);
  if (o.train_path) run.train_path = *o.train_path;
  if (o.test_path) run.test_path = *o.test_path;
  if (o.output_dir) run.output_dir = *o.output_dir;
  if (o.bundle_dir) run.bundle_dir = *o.bundle_dir;
  if (o.ablation) {
    absl::StatusOr<Ablation> a = ParseAblation(*o.ablation);
    if (!a.ok()) return a.status();
    run.model.ablation = *a;
  }
  if (o.path_mode) {
    absl::StatusOr<PathMode> m = ParsePathMode(*o.path_mode);
    if (!m.ok()) return m.status();
    run.model.input.path_mode = *m;
  }
  if (o.no_entity_types) run.model.input.use_entity_types = !*o.no_entity_types;
  if (o.max_seq_length) run.model.input.max_seq_length = *o.max_seq_length;
  if (o.fine_tune_last_k) run.fine_tune_last_k = *o.fine_tune_last_k;
  if (o.epochs) run.train.epochs = *o.epochs;
  if (o.batch_size) run.train.batch_size = *o.batch_size;
  if (o.learning_rate) run.train.learning_rate = *o.learning_rate;
  if (o.dropout) run.train.dropout = *o.dropout;
  if (o.seed) run.seed = *o.seed;
  run.train.seed = run.seed;
  run.model.dropout = run.train.dropout;
  if (absl::Status s = run.train.Validate(); !s.ok()) return s;
  if (run.model.input.max_seq_length < 4) {
    return absl::InvalidArgumentError("max_seq_length must be at least 4");
  }
  return run;
}

absl::StatusOr<RelationExtractor> BuildModel(const RunConfig& run,
                                             const std::vector<Instance>& train,
                                             const RelationVocab& relations,
                                             const ModelOptions& options) {
  if (run.profile == "pretrained") {
    if (run.bundle_dir.empty()) {
      return absl::InvalidArgumentError("pretrained profile needs a bundle directory");
    }
    absl::StatusOr<RelationExtractor> model =
        RelationExtractor::CreatePretrained(run.bundle_dir, relations, options, run.seed);
    if (model.ok() && run.fine_tune_last_k >= 0) {
      model->SetFineTuneLayers(run.fine_tune_last_k);
    }
    return model;
  }
  EncoderConfig config = run.tiny_encoder;
  if (run.fine_tune_last_k >= 0) config.fine_tune_last_k = run.fine_tune_last_k;
  return RelationExtractor::CreateTiny(train, relations, options, config, run.seed);
}

absl::StatusOr<Instance> ConvertRawRecord(const json& record, int64_t line) {
  if (!record.is_object()) return absl::InvalidArgumentError("record is not a JSON object");
  if (record.contains("tokens")) return ParseRecord(record);
  try {
    const auto tokens = record.at("token").get<std::vector<std::string>>();
    const auto heads = record.at("stanford_head").get<std::vector<int>>();
    json native;
    native["id"] = record.contains("id") ? record["id"].get<std::string>()
                                         : absl::StrCat("line-", line);
    native["tokens"] = tokens;
    for (const char* side : {"h", "t"}) {
      const json& e = record.at(side);
      const auto pos = e.at("pos").get<std::vector<int>>();
      if (pos.size() != 2) {
        return absl::InvalidArgumentError(absl::StrCat(side, ".pos must hold two offsets"));
      }
      if (!e.contains("type")) {
        return absl::InvalidArgumentError(absl::StrCat(side, " has no entity type"));
      }
      json mention = {{"surface", e.at("name")},
                      {"start", pos[0]},
                      {"end", pos[1]},
                      {"type", e.at("type")}};
      if (e.contains("id")) mention["kb_id"] = e["id"];
      native[side[0] == 'h' ? "head" : "tail"] = mention;
    }
    std::vector<int> parents;
    for (int h : heads) parents.push_back(h - 1);
    native["dep_heads"] = parents;
    native["dep_labels"] = record.at("stanford_deprel");
    native["relation"] = record.at("relation");
    return ParseRecord(native);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed raw record: ", e.what()));
  }
}

nlohmann::ordered_json EnhancedRecord(const Instance& instance) {
  nlohmann::ordered_json j = InstanceToRecord(instance);
  absl::StatusOr<TokenPath> stp = SelectPath(instance, PathMode::kStp);
  absl::StatusOr<TokenPath> sdp = SelectPath(instance, PathMode::kSdp);
  j["stp"] = stp.ok() ? *stp : TokenPath();
  j["sdp"] = sdp.ok() ? *sdp : TokenPath();
  return j;
}

namespace {

absl::Status WriteEnhanced(const std::string& path,
                           const std::vector<Instance>& instances) {
  std::string text;
  for (const Instance& instance : instances) {
    absl::StrAppend(&text, EnhancedRecord(instance).dump(), "\n");
  }
  return WriteTextFile(path, text);
}

void PrintStats(const std::string& name, const std::vector<Instance>& instances,
                std::ostream& out) {
  const CorpusStats stats = ComputeStats(instances);
  out << absl::StrFormat("%s: %d sentences, %d entity pairs, %d relation mentions\n",
                         name, stats.sentences, stats.entity_pairs,
                         stats.relation_mentions);
}

}  // namespace

namespace {

// True when the record's head array (raw 1-based or native) is well formed
// JSON but does not describe a tree.
bool HasBrokenTree(const json& record) {
  std::vector<int> heads;
  try {
    if (record.contains("stanford_head")) {
      for (int h : record["stanford_head"].get<std::vector<int>>()) heads.push_back(h - 1);
    } else if (record.contains("dep_heads")) {
      heads = record["dep_heads"].get<std::vector<int>>();
    } else {
      return false;
    }
  } catch (const json::exception&) {
    return false;
  }
  return !ValidateTree(heads).ok();
}

}  // namespace

absl::Status CmdPrepare(const std::string& input_path,
                        const std::string& output_path, std::ostream& out) {
  if (absl::Status s = RequireFile(input_path, "input"); !s.ok()) return s;
  if (output_path.empty()) return absl::InvalidArgumentError("output path not set");
  std::ifstream in(input_path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", input_path));
  std::vector<Instance> instances;
  // Malformed records fail the command; records whose dependency tree cannot
  // yield a path are dropped and counted as parse failures.
  std::vector<RecordError> errors;
  std::vector<RecordError> parse_failures;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record = json::parse(line, nullptr, false);
    absl::StatusOr<Instance> instance =
        record.is_discarded()
            ? absl::StatusOr<Instance>(absl::InvalidArgumentError("line is not valid JSON"))
            : ConvertRawRecord(record, line_no);
    if (!instance.ok()) {
      (!record.is_discarded() && HasBrokenTree(record) ? parse_failures : errors)
          .push_back({line_no, std::string(instance.status().message())});
      continue;
    }
    if (absl::StatusOr<TokenPath> stp = SelectPath(*instance, PathMode::kStp); !stp.ok()) {
      parse_failures.push_back({line_no, std::string(stp.status().message())});
      continue;
    }
    instances.push_back(*std::move(instance));
  }
  if (fs::path parent = fs::path(output_path).parent_path(); !parent.empty()) {
    if (absl::Status s = MakeDir(parent.string()); !s.ok()) return s;
  }
  if (absl::Status s = WriteEnhanced(output_path, instances); !s.ok()) return s;
  absl::StatusOr<std::string> input_hash = Sha256File(input_path);
  if (!input_hash.ok()) return input_hash.status();
  json manifest = BaseManifest("prepare");
  manifest["inputs"] = {{"raw", {{"path", input_path}, {"sha256", *input_hash}}}};
  manifest["records"] = instances.size();
  manifest["rejected"] = errors.size();
  manifest["parse_failures"] = parse_failures.size();
  absl::StatusOr<std::string> hash =
      WriteManifest(output_path + ".manifest.json", manifest);
  if (!hash.ok()) return hash.status();
  PrintStats(output_path, instances, out);
  out << "parse failures: " << parse_failures.size() << "\n";
  for (const RecordError& e : parse_failures) {
    out << "  " << input_path << ":" << e.line << ": " << e.message << "\n";
  }
  return ReportRecordErrors(input_path, errors);
}

absl::Status CmdMakeSynthetic(const SyntheticConfig& config,
                              const std::string& output_dir, std::ostream& out) {
  absl::StatusOr<SyntheticCorpus> corpus = GenerateSynthetic(config);
  if (!corpus.ok()) return corpus.status();
  if (absl::Status s = MakeDir(output_dir); !s.ok()) return s;
  const std::string train = output_dir + "/train.jsonl";
  const std::string test = output_dir + "/test.jsonl";
  if (absl::Status s = WriteEnhanced(train, corpus->train); !s.ok()) return s;
  if (absl::Status s = WriteEnhanced(test, corpus->test); !s.ok()) return s;
  json patterns = corpus->patterns;
  if (absl::Status s = WriteTextFile(output_dir + "/patterns.json", patterns.dump(2) + "\n");
      !s.ok()) {
    return s;
  }
  json manifest = BaseManifest("make-synthetic");
  manifest["config"] = config.ToJson();
  manifest["seed"] = config.seed;
  json outputs;
  for (const char* name : {"train.jsonl", "test.jsonl", "patterns.json"}) {
    absl::StatusOr<std::string> h = Sha256File(output_dir + "/" + name);
    if (!h.ok()) return h.status();
    outputs[name] = *h;
  }
  manifest["outputs"] = outputs;
  absl::StatusOr<std::string> hash = WriteManifest(output_dir + "/manifest.json", manifest);
  if (!hash.ok()) return hash.status();
  PrintStats("train", corpus->train, out);
  PrintStats("test", corpus->test, out);
  out << "manifest " << *hash << "\n";
  return absl::OkStatus();
}

absl::Status CmdTrain(const RunConfig& run, std::ostream& out) {
  if (absl::Status s = RequireFile(run.train_path, "train data"); !s.ok()) return s;
  if (absl::Status s = MakeDir(run.output_dir); !s.ok()) return s;
  absl::StatusOr<LoadedCorpus> corpus = LoadDataset(run.train_path, Split::kTrain);
  if (!corpus.ok()) return corpus.status();
  const absl::Status record_status = ReportRecordErrors(run.train_path, corpus->errors);

  const ModelOptions options = EffectiveOptions(run);
  absl::StatusOr<RelationExtractor> model =
      BuildModel(run, corpus->instances, corpus->vocab, options);
  if (!model.ok()) return model.status();

  json manifest = BaseManifest("train");
  manifest["config"] = run.ToJson();
  manifest["config_hash"] = JsonHash(run.ToJson());
  manifest["seed"] = run.seed;
  absl::StatusOr<json> input = InputEntry(run.train_path, *corpus);
  if (!input.ok()) return input.status();
  manifest["inputs"] = {{"train", *input}};
  if (run.profile == "pretrained") {
    absl::StatusOr<std::string> bundle = Sha256File(run.bundle_dir + "/model.safetensors");
    if (!bundle.ok()) return bundle.status();
    manifest["bundle_sha256"] = *bundle;
  }
  manifest["trainable_parameters"] = CountTrainable(model->Parameters());
  absl::StatusOr<std::string> hash =
      WriteManifest(run.output_dir + "/manifest.json", manifest);
  if (!hash.ok()) return hash.status();

  std::ofstream log(run.output_dir + "/train_log.jsonl");
  if (!log) return absl::PermissionDeniedError("cannot write train_log.jsonl");
  absl::StatusOr<TrainResult> result =
      Train(&*model, corpus->instances, run.train, &log);
  log.close();
  if (!result.ok()) return result.status();
  if (absl::Status s = model->Save(run.output_dir); !s.ok()) return s;
  out << absl::StrFormat("trained %d steps over %d bags (%d instances skipped); "
                         "final loss %.6f\n",
                         result->total_steps, result->num_bags,
                         result->skipped_instances,
                         result->log.empty() ? 0.0 : result->log.back().loss);
  out << "checkpoint " << run.output_dir << " manifest " << *hash << "\n";
  return record_status;
}

absl::Status CmdEval(const std::string& checkpoint_dir, const std::string& test_path,
                     const std::string& output_dir, std::ostream& out) {
  if (absl::Status s = RequireFile(test_path, "test data"); !s.ok()) return s;
  if (absl::Status s = RequireFile(checkpoint_dir + "/model.safetensors", "checkpoint");
      !s.ok()) {
    return s;
  }
  absl::StatusOr<RelationExtractor> model = RelationExtractor::Load(checkpoint_dir);
  if (!model.ok()) return model.status();
  absl::StatusOr<LoadedCorpus> corpus =
      LoadDataset(test_path, Split::kTest, &model->relations());
  if (!corpus.ok()) return corpus.status();
  const absl::Status record_status = ReportRecordErrors(test_path, corpus->errors);
  if (absl::Status s = MakeDir(output_dir); !s.ok()) return s;

  json manifest = BaseManifest("eval");
  absl::StatusOr<std::string> weights = Sha256File(checkpoint_dir + "/model.safetensors");
  if (!weights.ok()) return weights.status();
  json checkpoint = {{"path", checkpoint_dir}, {"model_sha256", *weights}};
  if (absl::StatusOr<std::string> m = Sha256File(checkpoint_dir + "/manifest.json"); m.ok()) {
    checkpoint["manifest_sha256"] = *m;
  }
  manifest["checkpoint"] = checkpoint;
  absl::StatusOr<json> input = InputEntry(test_path, *corpus);
  if (!input.ok()) return input.status();
  manifest["inputs"] = {{"test", *input}};
  absl::StatusOr<std::string> hash = WriteManifest(output_dir + "/manifest.json", manifest);
  if (!hash.ok()) return hash.status();

  absl::StatusOr<EvalReport> report = Evaluate(*model, corpus->instances);
  if (!report.ok()) return report.status();
  json metrics = report->ToJson(model->relations());
  metrics["manifest_sha256"] = *hash;
  absl::Status s = WriteTextFile(output_dir + "/metrics.json", metrics.dump(2) + "\n");
  s = Combine(s, WriteTextFile(output_dir + "/pr_curve.csv",
                               absl::StrCat("# manifest ", *hash, "\n",
                                            PrCurveCsv(report->curve))));
  s = Combine(s, WriteTextFile(output_dir + "/pr_curve.svg",
                               absl::StrCat("<!-- manifest ", *hash, " -->\n",
                                            PrCurveSvg({{"model", report->curve}}))));
  if (!s.ok()) return s;
  out << absl::StrFormat("AUC %.4f over %d predictions (%d positives)\n",
                         report->curve.auc, report->num_predictions,
                         report->curve.total_positives);
  for (const auto& [n, p] : report->precision_at) {
    out << absl::StrFormat("P@%d %.4f\n", n, p);
  }
  out << "metrics " << output_dir << "/metrics.json manifest " << *hash << "\n";
  return record_status;
}

absl::Status CmdPlot(const std::vector<std::pair<std::string, std::string>>& inputs,
                     const std::string& output_path, std::ostream& out) {
  if (inputs.empty()) return absl::InvalidArgumentError("no curves to plot");
  if (output_path.empty()) return absl::InvalidArgumentError("output path not set");
  std::vector<LabeledCurve> curves;
  json manifest = BaseManifest("plot");
  json sources = json::array();
  for (const auto& [label, path] : inputs) {
    absl::StatusOr<std::string> text = ReadTextFile(path);
    if (!text.ok()) return text.status();
    absl::StatusOr<PrCurve> curve = ParsePrCurveCsv(*text);
    if (!curve.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(path, ": ", curve.status().message()));
    }
    curves.push_back({label, *std::move(curve)});
    sources.push_back({{"label", label}, {"path", path}, {"sha256", Sha256Hex(*text)}});
  }
  manifest["inputs"] = sources;
  if (fs::path parent = fs::path(output_path).parent_path(); !parent.empty()) {
    if (absl::Status s = MakeDir(parent.string()); !s.ok()) return s;
  }
  absl::StatusOr<std::string> hash =
      WriteManifest(output_path + ".manifest.json", manifest);
  if (!hash.ok()) return hash.status();
  if (absl::Status s = WriteTextFile(
          output_path,
          absl::StrCat("<!-- manifest ", *hash, " -->\n", PrCurveSvg(curves)));
      !s.ok()) {
    return s;
  }
  for (const LabeledCurve& c : curves) {
    out << absl::StrFormat("%s: AUC %.4f\n", c.label, c.curve.auc);
  }
  out << "plot " << output_path << "\n";
  return absl::OkStatus();
}

absl::Status CmdInspect(const std::string& checkpoint_dir, const std::string& data_path,
                        const std::vector<std::string>& instance_ids,
                        const std::string& output_dir, std::ostream& out) {
  if (absl::Status s = RequireFile(data_path, "data"); !s.ok()) return s;
  absl::StatusOr<RelationExtractor> model = RelationExtractor::Load(checkpoint_dir);
  if (!model.ok()) return model.status();
  absl::StatusOr<LoadedCorpus> corpus = LoadDataset(data_path, Split::kTest);
  if (!corpus.ok()) return corpus.status();
  const absl::Status record_status = ReportRecordErrors(data_path, corpus->errors);

  std::vector<const Instance*> selected;
  if (instance_ids.empty()) {
    for (const Instance& i : corpus->instances) selected.push_back(&i);
  } else {
    std::map<std::string, const Instance*> by_id;
    for (const Instance& i : corpus->instances) by_id.emplace(i.id, &i);
    for (const std::string& id : instance_ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        return absl::InvalidArgumentError(absl::StrCat("no instance with id ", id));
      }
      selected.push_back(it->second);
    }
  }

  std::string hash;
  if (!output_dir.empty()) {
    if (absl::Status s = MakeDir(output_dir); !s.ok()) return s;
    json manifest = BaseManifest("inspect-attention");
    absl::StatusOr<std::string> weights = Sha256File(checkpoint_dir + "/model.safetensors");
    if (!weights.ok()) return weights.status();
    manifest["checkpoint"] = {{"path", checkpoint_dir}, {"model_sha256", *weights}};
    absl::StatusOr<json> input = InputEntry(data_path, *corpus);
    if (!input.ok()) return input.status();
    manifest["inputs"] = {{"data", *input}};
    manifest["instance_ids"] = instance_ids;
    absl::StatusOr<std::string> h = WriteManifest(output_dir + "/manifest.json", manifest);
    if (!h.ok()) return h.status();
    hash = *h;
  }

  std::string jsonl;
  for (const Instance* instance : selected) {
    absl::StatusOr<AttentionTable> table = InspectAttention(*model, *instance);
    if (!table.ok()) return table.status();
    if (selected.size() == 1 || output_dir.empty()) {
      out << "# " << instance->id << "\n" << AttentionTableText(*table);
    }
    json row = {{"id", instance->id}, {"argmax", table->argmax}};
    json entries = json::array();
    for (size_t k = 0; k < table->entries.size(); ++k) {
      entries.push_back({{"piece", table->entries[k].piece},
                         {"weight", table->entries[k].weight},
                         {"source_index", table->source_index[k]}});
    }
    row["entries"] = entries;
    if (!hash.empty()) row["manifest_sha256"] = hash;
    absl::StrAppend(&jsonl, row.dump(), "\n");
    if (!output_dir.empty() && selected.size() <= 50) {
      std::string name = instance->id;
      for (char& c : name) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
      }
      if (absl::Status s = WriteTextFile(
              absl::StrCat(output_dir, "/attention_", name, ".svg"),
              absl::StrCat("<!-- manifest ", hash, " -->\n", AttentionHeatmapSvg(*table)));
          !s.ok()) {
        return s;
      }
    }
  }
  if (!output_dir.empty()) {
    if (absl::Status s = WriteTextFile(output_dir + "/attention.jsonl", jsonl); !s.ok()) {
      return s;
    }
    out << "attention for " << selected.size() << " instance(s) in " << output_dir
        << " manifest " << hash << "\n";
  }
  return record_status;
}

absl::Status CmdAblate(const RunConfig& run, std::ostream& out) {
  if (absl::Status s = RequireFile(run.train_path, "train data"); !s.ok()) return s;
  if (absl::Status s = RequireFile(run.test_path, "test data"); !s.ok()) return s;
  if (absl::Status s = MakeDir(run.output_dir); !s.ok()) return s;
  absl::StatusOr<LoadedCorpus> train = LoadDataset(run.train_path, Split::kTrain);
  if (!train.ok()) return train.status();
  absl::StatusOr<LoadedCorpus> test =
      LoadDataset(run.test_path, Split::kTest, &train->vocab);
  if (!test.ok()) return test.status();
  absl::Status record_status = ReportRecordErrors(run.train_path, train->errors);
  record_status = Combine(record_status, ReportRecordErrors(run.test_path, test->errors));

  json manifest = BaseManifest("ablate");
  manifest["config"] = run.ToJson();
  manifest["config_hash"] = JsonHash(run.ToJson());
  manifest["seed"] = run.seed;
  absl::StatusOr<json> train_entry = InputEntry(run.train_path, *train);
  absl::StatusOr<json> test_entry = InputEntry(run.test_path, *test);
  if (!train_entry.ok()) return train_entry.status();
  if (!test_entry.ok()) return test_entry.status();
  manifest["inputs"] = {{"train", *train_entry}, {"test", *test_entry}};
  absl::StatusOr<std::string> hash =
      WriteManifest(run.output_dir + "/manifest.json", manifest);
  if (!hash.ok()) return hash.status();

  const ModelFactory factory = [&](const ModelOptions& options) {
    return BuildModel(run, train->instances, train->vocab, options);
  };
  absl::StatusOr<std::vector<AblationRow>> rows = RunAblation(
      train->instances, test->instances, EffectiveOptions(run), run.train, factory);
  if (!rows.ok()) return rows.status();

  json report = {{"manifest_sha256", *hash}, {"rows", json::array()}};
  for (const AblationRow& row : *rows) {
    json p = json::object();
    for (const auto& [n, v] : row.precision_at) p[absl::StrCat("P@", n)] = v;
    report["rows"].push_back({{"variant", row.variant},
                              {"auc", row.auc},
                              {"precision_at", p},
                              {"config_hash", row.config_hash},
                              {"config", row.config}});
  }
  const std::string table = FormatAblationTable(*rows);
  absl::Status s = WriteTextFile(run.output_dir + "/ablation.json", report.dump(2) + "\n");
  s = Combine(s, WriteTextFile(run.output_dir + "/ablation.txt",
                               absl::StrCat("# manifest ", *hash, "\n", table)));
  if (!s.ok()) return s;
  out << table << "manifest " << *hash << "\n";
  return record_status;
}

}  // namespace dsre::cli
