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


#include "dsre/model.h"

#include <filesystem>
#include <sstream>

#include "dsre/manifest.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/fixtures.h"
#include "testing/gradient_oracle.h"
#include "testing/models.h"

namespace dsre {
namespace {

std::string Describe(const testing::GradientCheckResult& r) {
  std::ostringstream out;
  out << r.failures.size() << " of " << r.checked << " entries off, max "
      << r.max_relative;
  for (size_t i = 0; i < r.failures.size() && i < 5; ++i) {
    out << "\n  " << r.failures[i].where << " analytic " << r.failures[i].analytic
        << " numeric " << r.failures[i].numeric;
  }
  return out.str();
}

class ModelGradientTest : public ::testing::TestWithParam<Ablation> {};

TEST_P(ModelGradientTest, MicroBatchMatchesFiniteDifferences) {
  const SyntheticCorpus corpus = testing::SmallCorpus(6, 0, 31);
  RelationExtractor model = testing::TinyModel(corpus.train, 2, GetParam());
  testing::WidenWeights(&model, 8);
  testing::MicroBatch batch = testing::MakeMicroBatch(model, corpus.train);
  ASSERT_EQ(batch.bags.size(), 3u);
  testing::GradientCheckResult r = testing::CheckMicroBatchGradients(&model, batch, 1e-4);
  EXPECT_GT(r.checked, 500);
  EXPECT_TRUE(r.failures.empty()) << Describe(r);
}

TEST_P(ModelGradientTest, DropoutMasksReplayInBackward) {
  const SyntheticCorpus corpus = testing::SmallCorpus(6, 0, 32);
  RelationExtractor model = testing::TinyModel(corpus.train, 3, GetParam(), 0.1);
  testing::WidenWeights(&model, 9);
  testing::MicroBatch batch = testing::MakeMicroBatch(model, corpus.train);
  testing::GradientCheckResult r =
      testing::CheckMicroBatchGradients(&model, batch, 1e-4, 77, 16);
  EXPECT_TRUE(r.failures.empty()) << Describe(r);
}

INSTANTIATE_TEST_SUITE_P(AllVariants, ModelGradientTest,
                         ::testing::Values(Ablation::kFull, Ablation::kNoRelEmb,
                                           Ablation::kNoRelAttn, Ablation::kSdpInput),
                         [](const auto& info) {
                           std::string name = AblationName(info.param);
                           std::erase_if(name, [](char c) { return !std::isalnum(c); });
                           return name;
                         });

TEST(ModelGradientTest, LargeBagRecomputesStates) {
  // More sentences than the forward cache holds: states are rebuilt in the
  // backward pass with the same dropout streams.
  SyntheticConfig c;
  c.num_relations = 2;
  c.train_bags = 1;
  c.test_bags = 0;
  c.max_sentences_per_bag = 40;
  c.seed = 5;
  std::vector<Instance> train;
  while (train.size() < 33) {
    train = GenerateSynthetic(c).value().train;
    ++c.seed;
  }
  RelationExtractor model = testing::TinyModel(train, 4, Ablation::kFull, 0.1);
  testing::WidenWeights(&model, 10);
  testing::MicroBatch batch = testing::MakeMicroBatch(model, train, 1);
  testing::GradientCheckResult r =
      testing::CheckMicroBatchGradients(&model, batch, 1e-4, 9, 4);
  EXPECT_TRUE(r.failures.empty()) << Describe(r);
}

TEST(ModelTest, PredictBagIsDistribution) {
  const SyntheticCorpus corpus = testing::SmallCorpus(4, 0, 1);
  RelationExtractor model = testing::TinyModel(corpus.train, 2);
  StructuredInput in = model.Prepare(corpus.train[0]).value();
  Eigen::VectorXd p = model.PredictBag({&in}).value();
  EXPECT_EQ(p.size(), model.relations().size());
  EXPECT_NEAR(p.sum(), 1.0, 1e-12);
  EXPECT_FALSE(model.PredictBag({}).ok());
}

TEST(ModelTest, SaveLoadRoundTrip) {
  const SyntheticCorpus corpus = testing::SmallCorpus(6, 0, 1);
  RelationExtractor model = testing::TinyModel(corpus.train, 2, Ablation::kNoRelAttn);
  const std::string dir = testing::ScratchDir("ckpt");
  ASSERT_TRUE(model.Save(dir).ok());
  RelationExtractor back = RelationExtractor::Load(dir).value();
  EXPECT_EQ(back.relations(), model.relations());
  EXPECT_EQ(back.options().ToJson(), model.options().ToJson());
  EXPECT_EQ(back.tokenizer().vocab(), model.tokenizer().vocab());
  EXPECT_EQ(back.encoder().num_base_tokens(), model.encoder().num_base_tokens());
  ParameterList a = model.Parameters(), b = back.Parameters();
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i]->name, b[i]->name);
    EXPECT_EQ(a[i]->value, b[i]->value) << a[i]->name;
    EXPECT_EQ(a[i]->trainable, b[i]->trainable) << a[i]->name;
  }
  StructuredInput in = model.Prepare(corpus.train[1]).value();
  EXPECT_EQ(model.PredictBag({&in}).value(), back.PredictBag({&in}).value());

  // Saving twice gives identical bytes.
  const std::string dir2 = testing::ScratchDir("ckpt2");
  ASSERT_TRUE(back.Save(dir2).ok());
  EXPECT_EQ(Sha256File(dir + "/model.safetensors").value(),
            Sha256File(dir2 + "/model.safetensors").value());
}

TEST(ModelTest, LoadMissingDirectory) {
  EXPECT_EQ(RelationExtractor::Load("/nonexistent/ckpt").status().code(),
            absl::StatusCode::kNotFound);
}

TEST(ModelOptionsTest, JsonAndAblationPathMode) {
  ModelOptions o = WithAblation(ModelOptions(), Ablation::kSdpInput);
  EXPECT_EQ(o.input.path_mode, PathMode::kSdp);
  ModelOptions back = ModelOptions::FromJson(o.ToJson()).value();
  EXPECT_EQ(back.ToJson(), o.ToJson());
}

}  // namespace
}  // namespace dsre
