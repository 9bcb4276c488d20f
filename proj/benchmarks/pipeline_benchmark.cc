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

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "benchmark/benchmark.h"
#include "dsre/deptree.h"
#include "dsre/eval.h"
#include "dsre/structured_input.h"
#include "dsre/synthetic.h"
#include "dsre/tokenizer.h"

namespace dsre {
namespace {

// Random recursive tree over a shuffled node order.
std::vector<int> RandomHeads(int n, std::mt19937_64* rng) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), *rng);
  std::vector<int> heads(n, -1);
  for (int k = 1; k < n; ++k) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    heads[order[k]] = order[pick(*rng)];
  }
  return heads;
}

// Arg: sentence length.
void BM_SubtreePath(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const int n = static_cast<int>(state.range(0));
  const DepTree tree = ValidateTree(RandomHeads(n, &rng)).value();
  std::uniform_int_distribution<int> node(0, n - 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SubtreePath(tree, node(rng), node(rng)));
  }
}
BENCHMARK(BM_SubtreePath)->RangeMultiplier(4)->Range(8, 512);

void BM_ShortestDependencyPath(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const int n = static_cast<int>(state.range(0));
  const DepTree tree = ValidateTree(RandomHeads(n, &rng)).value();
  std::uniform_int_distribution<int> node(0, n - 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ShortestDependencyPath(tree, node(rng), node(rng)));
  }
}
BENCHMARK(BM_ShortestDependencyPath)->RangeMultiplier(4)->Range(8, 512);

void BM_ValidateTree(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const std::vector<int> heads = RandomHeads(static_cast<int>(state.range(0)), &rng);
  for (auto _ : state) benchmark::DoNotOptimize(ValidateTree(heads));
}
BENCHMARK(BM_ValidateTree)->RangeMultiplier(4)->Range(8, 512);

void BM_PrepareInput(benchmark::State& state) {
  SyntheticConfig config;
  config.train_bags = 200;
  config.test_bags = 0;
  const SyntheticCorpus corpus = GenerateSynthetic(config).value();
  WordPieceTokenizer tokenizer(BuildVocabulary(corpus.train));
  tokenizer.AddSpecialTokens(SpecialVocab::AddedTokens());
  InputOptions options;
  options.path_mode = static_cast<PathMode>(state.range(0));
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        PrepareInput(corpus.train[i++ % corpus.train.size()], tokenizer, options));
  }
  state.SetLabel(PathModeName(options.path_mode));
}
BENCHMARK(BM_PrepareInput)->DenseRange(0, 2);

// Arg: number of ranked predictions.
void BM_PrCurve(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution correct(0.3);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::vector<Prediction> predictions;
  int positives = 0;
  for (int64_t i = 0; i < state.range(0); ++i) {
    Prediction p;
    p.pair_key = {absl::StrCat("h", i), absl::StrCat("t", i)};
    p.relation = 1 + static_cast<int>(i % 52);
    p.score = score(rng);
    p.correct = correct(rng);
    positives += p.correct;
    predictions.push_back(std::move(p));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputePrCurve(predictions, positives));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PrCurve)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dsre

BENCHMARK_MAIN();
