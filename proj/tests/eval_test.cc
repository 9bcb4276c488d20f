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


#include "dsre/eval.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "dsre/manifest.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/fixtures.h"
#include "testing/models.h"

namespace dsre {
namespace {

Prediction Pred(const std::string& pair, int relation, double score, bool correct) {
  return Prediction{{pair, "x"}, relation, score, correct};
}

std::vector<Prediction> RandomPredictions(int n, std::mt19937_64* rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution b(0.4);
  std::vector<Prediction> out;
  for (int i = 0; i < n; ++i) {
    // Coarse scores force ties.
    out.push_back(Pred("p" + std::to_string(i / 3), 1 + i % 3,
                       std::round(u(*rng) * 10.0) / 10.0, b(*rng)));
  }
  return out;
}

TEST(PrCurveTest, TrueThenFalse) {
  PrCurve c = ComputePrCurve({Pred("b", 1, 0.2, false), Pred("a", 1, 0.9, true)}, 2)
                  .value();
  ASSERT_EQ(c.points.size(), 2u);
  EXPECT_DOUBLE_EQ(c.points[0].recall, 0.5);
  EXPECT_DOUBLE_EQ(c.points[0].precision, 1.0);
  EXPECT_DOUBLE_EQ(c.points[1].recall, 0.5);
  EXPECT_DOUBLE_EQ(c.points[1].precision, 0.5);
  EXPECT_DOUBLE_EQ(c.auc, 0.5);
}

TEST(PrCurveTest, AllCorrect) {
  std::vector<Prediction> p;
  for (int i = 0; i < 6; ++i) p.push_back(Pred("p" + std::to_string(i), 1, i, true));
  PrCurve c = ComputePrCurve(p, 6).value();
  for (const PrPoint& pt : c.points) EXPECT_EQ(pt.precision, 1.0);
  EXPECT_DOUBLE_EQ(c.auc, 1.0);
}

TEST(PrCurveTest, ZeroPositivesFails) {
  EXPECT_FALSE(ComputePrCurve({Pred("a", 1, 0.5, false)}, 0).ok());
}

TEST(PrCurveTest, StepAreaMatchesLoop) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Prediction> p = RandomPredictions(40, &rng);
    const int positives = 30;
    PrCurve c = ComputePrCurve(p, positives).value();
    SortPredictions(&p);
    double area = 0.0, prev = 0.0;
    int hits = 0;
    for (size_t k = 0; k < p.size(); ++k) {
      hits += p[k].correct;
      const double recall = hits / static_cast<double>(positives);
      const double precision = hits / static_cast<double>(k + 1);
      EXPECT_DOUBLE_EQ(c.points[k].recall, recall);
      EXPECT_DOUBLE_EQ(c.points[k].precision, precision);
      area += precision * (recall - prev);
      prev = recall;
      if (k > 0) EXPECT_GE(c.points[k].recall, c.points[k - 1].recall);
    }
    EXPECT_NEAR(c.auc, area, 1e-12);
  }
}

TEST(SortPredictionsTest, TieBreakByPairThenRelation) {
  std::vector<Prediction> p = {Pred("b", 2, 0.5, false), Pred("a", 3, 0.5, false),
                               Pred("a", 1, 0.5, false), Pred("c", 1, 0.9, false)};
  SortPredictions(&p);
  EXPECT_EQ(p[0].pair_key.first, "c");
  EXPECT_EQ(p[1].pair_key.first, "a");
  EXPECT_EQ(p[1].relation, 1);
  EXPECT_EQ(p[2].relation, 3);
  EXPECT_EQ(p[3].pair_key.first, "b");
}

TEST(PrecisionAtTest, Examples) {
  std::vector<Prediction> p;
  const bool correct[] = {true, false, true, true, false, true, true, false, true, true, false};
  for (int i = 0; i < 11; ++i) p.push_back(Pred("p" + std::to_string(i), 1, 1.0 - 0.01 * i, correct[i]));
  EXPECT_DOUBLE_EQ(PrecisionAt(p, 1).value(), 1.0);
  EXPECT_DOUBLE_EQ(PrecisionAt(p, 10).value(), 0.7);
  EXPECT_FALSE(PrecisionAt(p, 12).ok());
}

TEST(PrecisionAtTest, AgreesWithCurve) {
  std::mt19937_64 rng(2);
  std::vector<Prediction> p = RandomPredictions(60, &rng);
  PrCurve c = ComputePrCurve(p, 50).value();
  for (int n = 1; n <= 60; ++n) {
    EXPECT_DOUBLE_EQ(PrecisionAt(p, n).value(), c.points[n - 1].precision);
  }
}

TEST(PrCurveTest, InvariantUnderMonotoneScoreMaps) {
  std::mt19937_64 rng(3);
  std::vector<Prediction> p = RandomPredictions(50, &rng);
  std::vector<Prediction> q = p;
  for (Prediction& x : q) x.score = std::exp(3.0 * x.score) - 7.0;
  std::vector<Prediction> shuffled = p;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const double auc = ComputePrCurve(p, 40).value().auc;
  EXPECT_EQ(ComputePrCurve(q, 40).value().auc, auc);
  EXPECT_EQ(ComputePrCurve(shuffled, 40).value().auc, auc);
  EXPECT_EQ(TopNDistribution(p, 20), TopNDistribution(shuffled, 20));
}

TEST(TopNDistributionTest, CountsTopN) {
  std::mt19937_64 rng(4);
  std::vector<Prediction> p = RandomPredictions(30, &rng);
  std::map<int, int> one = TopNDistribution(p, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.begin()->second, 1);
  int total = 0;
  for (const auto& [rel, count] : TopNDistribution(p, 20)) total += count;
  EXPECT_EQ(total, 20);
  total = 0;
  for (const auto& [rel, count] : TopNDistribution(p, 300)) total += count;
  EXPECT_EQ(total, 30);
}

TEST(CountPositivesTest, CountsMentionsExcludingNa) {
  std::vector<Instance> test = {
      testing::SimpleInstance("a", "/org/founder"), testing::SimpleInstance("b", "/org/ceo"),
      testing::SimpleInstance("c", "/org/founder"), testing::SimpleInstance("d", "NA")};
  test[3].head.kb_id = "/m/other";
  RelationVocab vocab = testing::VocabFor(test);
  std::vector<Bag> bags = GroupIntoBags(test, vocab, Split::kTest);
  ASSERT_EQ(bags.size(), 2u);
  EXPECT_EQ(CountPositives(bags, vocab), 2);
}

class TrainedToyTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    corpus_ = new SyntheticCorpus(testing::SmallCorpus(60, 15, 21));
    model_ = new RelationExtractor(testing::TinyModel(corpus_->train, 2));
    TrainConfig c = TrainConfig::TinyDefaults();
    c.epochs = 2;
    ASSERT_TRUE(Train(model_, corpus_->train, c).ok());
  }
  static void TearDownTestSuite() {
    delete model_;
    delete corpus_;
  }
  static SyntheticCorpus* corpus_;
  static RelationExtractor* model_;
};

SyntheticCorpus* TrainedToyTest::corpus_ = nullptr;
RelationExtractor* TrainedToyTest::model_ = nullptr;

TEST_F(TrainedToyTest, PredictAllCoversEveryBagAndRelation) {
  PredictionSet set = PredictAll(*model_, corpus_->test).value();
  const int k = model_->relations().size() - 1;
  EXPECT_EQ(set.num_bags, 15);
  EXPECT_EQ(set.predictions.size(), static_cast<size_t>(15 * k));
  std::vector<Bag> bags = GroupIntoBags(corpus_->test, model_->relations(), Split::kTest);
  EXPECT_EQ(set.total_positives, CountPositives(bags, model_->relations()));
  int correct = 0;
  for (const Prediction& p : set.predictions) {
    EXPECT_NE(p.relation, model_->relations().na_index());
    EXPECT_GE(p.score, 0.0);
    EXPECT_LE(p.score, 1.0);
    correct += p.correct;
  }
  EXPECT_EQ(correct, set.total_positives);
}

TEST_F(TrainedToyTest, PredictionScoresAreBagProbabilities) {
  std::vector<Bag> bags = GroupIntoBags(corpus_->test, model_->relations(), Split::kTest);
  std::vector<StructuredInput> inputs;
  for (int i : bags[0].instance_indices) {
    inputs.push_back(model_->Prepare(corpus_->test[i]).value());
  }
  std::vector<const StructuredInput*> ptrs;
  for (const StructuredInput& in : inputs) ptrs.push_back(&in);
  Eigen::VectorXd probs = model_->PredictBag(ptrs).value();
  EXPECT_NEAR(probs.sum(), 1.0, 1e-12);
  PredictionSet set = PredictAll(*model_, corpus_->test).value();
  for (const Prediction& p : set.predictions) {
    if (p.pair_key == bags[0].pair_key) EXPECT_DOUBLE_EQ(p.score, probs(p.relation));
  }
}

TEST_F(TrainedToyTest, EvaluateReport) {
  EvalReport r = Evaluate(*model_, corpus_->test).value();
  EXPECT_GE(r.curve.auc, 0.0);
  EXPECT_LE(r.curve.auc, 1.0);
  EXPECT_EQ(r.num_bags, 15);
  EXPECT_TRUE(r.precision_at.empty());  // fewer than 100 predictions
  nlohmann::json j = r.ToJson(model_->relations());
  EXPECT_DOUBLE_EQ(j["auc"].get<double>(), r.curve.auc);
}

TEST_F(TrainedToyTest, AttentionWeightsSumToOne) {
  for (const Instance& x : corpus_->test) {
    AttentionTable t = InspectAttention(*model_, x).value();
    double sum = 0.0, max = -1.0;
    for (const AttentionEntry& e : t.entries) {
      EXPECT_GE(e.weight, 0.0);
      sum += e.weight;
      max = std::max(max, e.weight);
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    EXPECT_EQ(t.entries[t.argmax].weight, max);
    EXPECT_EQ(t.entries.size(), t.source_index.size());
    EXPECT_EQ(t.instance_id, x.id);
  }
}

TEST(InspectAttentionTest, FailsWithoutRelationAttention) {
  const SyntheticCorpus corpus = testing::SmallCorpus(5, 0, 2);
  RelationExtractor model = testing::TinyModel(corpus.train, 1, Ablation::kNoRelEmb);
  EXPECT_FALSE(InspectAttention(model, corpus.train[0]).ok());
}

TEST(AblationTest, FiveVariantsWithHashes) {
  std::vector<Variant> variants = AblationVariants(ModelOptions());
  ASSERT_EQ(variants.size(), 5u);
  EXPECT_EQ(variants[0].name, "full");
  EXPECT_EQ(variants[2].options.ablation, Ablation::kNoRelEmb);
  EXPECT_EQ(variants[4].options.input.path_mode, PathMode::kSdp);
  EXPECT_FALSE(variants[1].options.input.use_entity_types);

  const SyntheticCorpus corpus = testing::SmallCorpus(20, 8, 3);
  TrainConfig c = TrainConfig::TinyDefaults();
  c.epochs = 1;
  auto factory = [&](const ModelOptions& options) -> absl::StatusOr<RelationExtractor> {
    EncoderConfig e = EncoderConfig::Tiny(0);
    e.hidden_dim = 16;
    e.intermediate_dim = 32;
    return RelationExtractor::CreateTiny(corpus.train, testing::VocabFor(corpus.train),
                                         options, e, 1);
  };
  std::vector<AblationRow> rows =
      RunAblation(corpus.train, corpus.test, ModelOptions(), c, factory).value();
  ASSERT_EQ(rows.size(), 5u);
  for (size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].variant, variants[i].name);
    EXPECT_GE(rows[i].auc, 0.0);
    EXPECT_LE(rows[i].auc, 1.0);
    EXPECT_EQ(rows[i].config, VariantConfig(variants[i].options, c));
    EXPECT_EQ(rows[i].config_hash, JsonHash(rows[i].config));
  }
  const std::string table = FormatAblationTable(rows);
  for (const Variant& v : variants) EXPECT_THAT(table, ::testing::HasSubstr(v.name));
}

}  // namespace
}  // namespace dsre
