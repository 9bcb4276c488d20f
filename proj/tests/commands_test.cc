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
#include <sstream>

#include "dsre/manifest.h"
#include "dsre/plot.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/fixtures.h"

namespace dsre::cli {
namespace {

using ::testing::HasSubstr;
namespace fs = std::filesystem;

std::string ReadAll(const std::string& path) { return ReadTextFile(path).value(); }

// One raw record: "Ann founded Acme ." with 1-based heads.
nlohmann::json RawRecord(const std::string& id, std::vector<int> heads = {2, 0, 2, 2}) {
  return {{"id", id},
          {"token", {"Ann", "founded", "Acme", "."}},
          {"h", {{"name", "Ann"}, {"id", "/m/ann"}, {"pos", {0, 1}}, {"type", "PERSON"}}},
          {"t", {{"name", "Acme"}, {"id", "/m/acme"}, {"pos", {2, 3}}, {"type", "ORG"}}},
          {"relation", "/business/person/company"},
          {"stanford_head", heads},
          {"stanford_deprel", {"nsubj", "ROOT", "obj", "punct"}}};
}

TEST(ExitCodeTest, ClassesAreDistinct) {
  EXPECT_EQ(ExitCode(absl::OkStatus()), 0);
  EXPECT_EQ(ExitCode(absl::NotFoundError("")), 3);
  EXPECT_EQ(ExitCode(absl::PermissionDeniedError("")), 3);
  EXPECT_EQ(ExitCode(absl::InvalidArgumentError("")), 4);
  EXPECT_EQ(ExitCode(absl::FailedPreconditionError("")), 4);
  EXPECT_EQ(ExitCode(absl::InternalError("")), 5);
  EXPECT_EQ(kUsageExitCode, 2);
}

TEST(ConvertRawRecordTest, ShiftsHeadsAndCopiesTypes) {
  Instance x = ConvertRawRecord(RawRecord("r1"), 1).value();
  EXPECT_THAT(x.dep_heads, ::testing::ElementsAre(1, -1, 1, 1));
  EXPECT_EQ(x.head.type_tag, "PERSON");
  EXPECT_EQ(x.tail.kb_id, "/m/acme");
  nlohmann::json bad = RawRecord("r2");
  bad["h"].erase("type");
  EXPECT_THAT(ConvertRawRecord(bad, 2).status().message(), HasSubstr("entity type"));
}

TEST(EnhancedRecordTest, CarriesPaths) {
  nlohmann::ordered_json j = EnhancedRecord(testing::SimpleInstance());
  EXPECT_EQ(j["stp"].get<std::vector<int>>(), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(j["sdp"].get<std::vector<int>>(), (std::vector<int>{0, 1, 2}));
}

TEST(PrepareTest, EmptyInputGivesEmptyOutput) {
  const std::string dir = testing::ScratchDir("p");
  ASSERT_TRUE(WriteTextFile(dir + "/raw.jsonl", "").ok());
  std::ostringstream out;
  ASSERT_TRUE(CmdPrepare(dir + "/raw.jsonl", dir + "/out.jsonl", out).ok());
  EXPECT_EQ(ReadAll(dir + "/out.jsonl"), "");
  EXPECT_THAT(out.str(), HasSubstr("parse failures: 0"));
  EXPECT_TRUE(fs::exists(dir + "/out.jsonl.manifest.json"));
}

TEST(PrepareTest, IdempotentOnItsOwnOutput) {
  const std::string dir = testing::ScratchDir("p");
  std::string raw;
  for (int i = 0; i < 3; ++i) raw += RawRecord("r" + std::to_string(i)).dump() + "\n";
  ASSERT_TRUE(WriteTextFile(dir + "/raw.jsonl", raw).ok());
  std::ostringstream out;
  ASSERT_TRUE(CmdPrepare(dir + "/raw.jsonl", dir + "/a.jsonl", out).ok());
  ASSERT_TRUE(CmdPrepare(dir + "/a.jsonl", dir + "/b.jsonl", out).ok());
  EXPECT_EQ(ReadAll(dir + "/a.jsonl"), ReadAll(dir + "/b.jsonl"));
  EXPECT_THAT(ReadAll(dir + "/a.jsonl"), HasSubstr("\"stp\":[0,1,2]"));
}

TEST(PrepareTest, BrokenTreesAreCountedNotFatal) {
  const std::string dir = testing::ScratchDir("p");
  const std::string raw = RawRecord("ok").dump() + "\n" +
                          RawRecord("cycle", {2, 1, 2, 2}).dump() + "\n";
  ASSERT_TRUE(WriteTextFile(dir + "/raw.jsonl", raw).ok());
  std::ostringstream out;
  ASSERT_TRUE(CmdPrepare(dir + "/raw.jsonl", dir + "/out.jsonl", out).ok());
  EXPECT_THAT(out.str(), HasSubstr("parse failures: 1"));
  EXPECT_THAT(out.str(), HasSubstr("raw.jsonl:2:"));
  EXPECT_EQ(ReadJsonFile(dir + "/out.jsonl.manifest.json").value()["records"], 1);
}

TEST(PrepareTest, MalformedLineFailsWithLineNumber) {
  const std::string dir = testing::ScratchDir("p");
  ASSERT_TRUE(WriteTextFile(dir + "/raw.jsonl", RawRecord("a").dump() + "\n{oops\n").ok());
  std::ostringstream out;
  absl::Status s = CmdPrepare(dir + "/raw.jsonl", dir + "/out.jsonl", out);
  EXPECT_EQ(ExitCode(s), 4);
  EXPECT_EQ(ExitCode(CmdPrepare(dir + "/missing.jsonl", dir + "/o.jsonl", out)), 3);
}

TEST(ResolveRunConfigTest, FlagsOverrideFileAndManifestsReload) {
  const std::string dir = testing::ScratchDir("c");
  nlohmann::json file = {{"train_path", "a.jsonl"},
                         {"seed", 4},
                         {"training", {{"epochs", 7}, {"batch_size", 3}}}};
  ASSERT_TRUE(WriteTextFile(dir + "/run.json", file.dump()).ok());
  RunOverrides o;
  o.epochs = 2;
  o.ablation = "no_rel_emb";
  RunConfig run = ResolveRunConfig(dir + "/run.json", o).value();
  EXPECT_EQ(run.train_path, "a.jsonl");
  EXPECT_EQ(run.train.epochs, 2);
  EXPECT_EQ(run.train.batch_size, 3);
  EXPECT_EQ(run.seed, 4u);
  EXPECT_EQ(run.train.seed, 4u);
  EXPECT_EQ(run.model.ablation, Ablation::kNoRelEmb);

  nlohmann::json manifest = {{"command", "train"}, {"config", run.ToJson()}};
  ASSERT_TRUE(WriteTextFile(dir + "/manifest.json", manifest.dump()).ok());
  RunConfig again = ResolveRunConfig(dir + "/manifest.json", RunOverrides()).value();
  EXPECT_EQ(again.ToJson(), run.ToJson());

  o.path_mode = "diagonal";
  EXPECT_FALSE(ResolveRunConfig(dir + "/run.json", o).ok());
  EXPECT_EQ(ResolveRunConfig(dir + "/none.json", RunOverrides()).status().code(),
            absl::StatusCode::kNotFound);
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::ScratchDir("run");
    SyntheticConfig c;
    c.num_relations = 3;
    c.train_bags = 40;
    c.test_bags = 30;
    c.seed = 3;
    std::ostringstream out;
    ASSERT_TRUE(CmdMakeSynthetic(c, dir_ + "/data", out).ok());
  }

  RunConfig Run(const std::string& output) const {
    RunOverrides o;
    o.train_path = dir_ + "/data/train.jsonl";
    o.test_path = dir_ + "/data/test.jsonl";
    o.output_dir = dir_ + "/" + output;
    o.epochs = 1;
    RunConfig run = ResolveRunConfig("", o).value();
    run.tiny_encoder.hidden_dim = 16;
    run.tiny_encoder.intermediate_dim = 32;
    return run;
  }

  std::string dir_;
};

TEST_F(PipelineTest, SyntheticOutputsAreStamped) {
  nlohmann::json m = ReadJsonFile(dir_ + "/data/manifest.json").value();
  EXPECT_EQ(m["command"], "make-synthetic");
  EXPECT_EQ(m["outputs"]["train.jsonl"], Sha256File(dir_ + "/data/train.jsonl").value());
  EXPECT_TRUE(fs::exists(dir_ + "/data/patterns.json"));
}

TEST_F(PipelineTest, TrainTwiceGivesIdenticalCheckpoints) {
  std::ostringstream out;
  ASSERT_TRUE(CmdTrain(Run("a"), out).ok());
  ASSERT_TRUE(CmdTrain(Run("b"), out).ok());
  EXPECT_EQ(Sha256File(dir_ + "/a/model.safetensors").value(),
            Sha256File(dir_ + "/b/model.safetensors").value());
  EXPECT_EQ(ReadAll(dir_ + "/a/train_log.jsonl"), ReadAll(dir_ + "/b/train_log.jsonl"));
  nlohmann::json m = ReadJsonFile(dir_ + "/a/manifest.json").value();
  EXPECT_EQ(m["seed"], 1);
  EXPECT_EQ(m["config_hash"], JsonHash(m["config"]));
  EXPECT_EQ(m["inputs"]["train"]["sha256"], Sha256File(dir_ + "/data/train.jsonl").value());
  EXPECT_TRUE(m.contains("code_version"));
}

TEST_F(PipelineTest, EvalPlotAndInspect) {
  std::ostringstream out;
  ASSERT_TRUE(CmdTrain(Run("ckpt"), out).ok());
  ASSERT_TRUE(CmdEval(dir_ + "/ckpt", dir_ + "/data/test.jsonl", dir_ + "/eval", out).ok());
  const std::string hash = Sha256File(dir_ + "/eval/manifest.json").value();
  nlohmann::json metrics = ReadJsonFile(dir_ + "/eval/metrics.json").value();
  EXPECT_EQ(metrics["manifest_sha256"], hash);
  const std::string csv = ReadAll(dir_ + "/eval/pr_curve.csv");
  EXPECT_THAT(csv, ::testing::StartsWith("# manifest " + hash + "\n"));
  EXPECT_NEAR(ParsePrCurveCsv(csv).value().auc, metrics["auc"].get<double>(), 1e-9);

  ASSERT_TRUE(CmdPlot({{"full", dir_ + "/eval/pr_curve.csv"},
                       {"again", dir_ + "/eval/pr_curve.csv"}},
                      dir_ + "/plot.svg", out)
                  .ok());
  EXPECT_THAT(ReadAll(dir_ + "/plot.svg"), HasSubstr("again (AUC"));

  ASSERT_TRUE(CmdInspect(dir_ + "/ckpt", dir_ + "/data/test.jsonl", {"test-00000-0"},
                         dir_ + "/inspect", out)
                  .ok());
  const std::string lines = ReadAll(dir_ + "/inspect/attention.jsonl");
  nlohmann::json first = nlohmann::json::parse(lines.substr(0, lines.find('\n')));
  EXPECT_EQ(first["id"], "test-00000-0");
  double sum = 0.0;
  for (const auto& e : first["entries"]) sum += e["weight"].get<double>();
  EXPECT_NEAR(sum, 1.0, 1e-6);
  EXPECT_TRUE(fs::exists(dir_ + "/inspect/attention_test-00000-0.svg"));
  EXPECT_EQ(ExitCode(CmdInspect(dir_ + "/ckpt", dir_ + "/data/test.jsonl", {"nope"},
                                dir_ + "/inspect2", out)),
            4);
}

TEST_F(PipelineTest, EvalMissingCheckpoint) {
  std::ostringstream out;
  EXPECT_EQ(ExitCode(CmdEval(dir_ + "/nothing", dir_ + "/data/test.jsonl", dir_ + "/e", out)),
            3);
}

}  // namespace
}  // namespace dsre::cli
