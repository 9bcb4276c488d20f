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


// Runs the dsre binary and checks exit codes per error class.

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "dsre/manifest.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/fixtures.h"

namespace dsre {
namespace {

int RunTool(const std::string& args, const std::string& log) {
  const std::string command =
      std::string(DSRE_BINARY) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, HelpAndUsageErrors) {
  const std::string log = testing::ScratchDir("cli") + "/log.txt";
  EXPECT_EQ(RunTool("--help", log), 0);
  EXPECT_EQ(RunTool("", log), 2);
  EXPECT_EQ(RunTool("frobnicate", log), 2);
  EXPECT_EQ(RunTool("train --epochs notanumber", log), 2);
  EXPECT_EQ(RunTool("eval --checkpoint x", log), 2);  // --test and --output missing
}

TEST(CliTest, ErrorClassesMapToExitCodes) {
  const std::string dir = testing::ScratchDir("cli");
  const std::string log = dir + "/log.txt";
  EXPECT_EQ(RunTool("prepare " + dir + "/missing.jsonl " + dir + "/out.jsonl", log), 3);
  ASSERT_TRUE(WriteTextFile(dir + "/bad.jsonl", "{not json\n").ok());
  EXPECT_EQ(RunTool("prepare " + dir + "/bad.jsonl " + dir + "/out.jsonl", log), 4);
  EXPECT_THAT(ReadTextFile(log).value(), ::testing::HasSubstr("bad.jsonl:1:"));
  ASSERT_TRUE(WriteTextFile(dir + "/empty.jsonl", "").ok());
  EXPECT_EQ(RunTool("prepare " + dir + "/empty.jsonl " + dir + "/out.jsonl", log), 0);
  EXPECT_EQ(RunTool("make-synthetic --noise 2 --output " + dir + "/syn", log), 2);
  ASSERT_TRUE(WriteTextFile(dir + "/syn.json", R"({"num_relations": 0})").ok());
  EXPECT_EQ(RunTool("make-synthetic --config " + dir + "/syn.json --output " + dir + "/syn", log),
            4);
  ASSERT_TRUE(WriteTextFile(dir + "/run.json", R"({"training": {"epochs": -1}})").ok());
  EXPECT_EQ(RunTool("train --config " + dir + "/run.json --train " + dir +
                        "/empty.jsonl --output " + dir + "/ckpt",
                    log),
            4);
}

TEST(CliTest, SyntheticTrainEvalRoundTrip) {
  const std::string dir = testing::ScratchDir("cli");
  const std::string log = dir + "/log.txt";
  ASSERT_EQ(RunTool("make-synthetic --relations 3 --train-bags 30 --test-bags 10 --output " +
                        dir + "/data",
                    log),
            0);
  ASSERT_EQ(RunTool("train --train " + dir + "/data/train.jsonl --epochs 1 --output " + dir +
                        "/ckpt",
                    log),
            0)
      << ReadTextFile(log).value();
  EXPECT_EQ(RunTool("eval --checkpoint " + dir + "/ckpt --test " + dir +
                        "/data/test.jsonl --output " + dir + "/eval",
                    log),
            0)
      << ReadTextFile(log).value();
  EXPECT_THAT(ReadTextFile(log).value(), ::testing::HasSubstr("AUC"));
  // Re-running from the saved manifest reproduces the checkpoint.
  ASSERT_EQ(RunTool("train --config " + dir + "/ckpt/manifest.json --output " + dir + "/again",
                    log),
            0);
  EXPECT_EQ(Sha256File(dir + "/ckpt/model.safetensors").value(),
            Sha256File(dir + "/again/model.safetensors").value());
}

}  // namespace
}  // namespace dsre
