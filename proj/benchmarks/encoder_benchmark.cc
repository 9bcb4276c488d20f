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

#include <random>

#include "benchmark/benchmark.h"
#include "dsre/bag_encoder.h"
#include "dsre/encoder.h"
#include "dsre/structured_input.h"

namespace dsre {
namespace {

StructuredInput RandomInput(int length, int vocab, std::mt19937_64* rng) {
  std::uniform_int_distribution<int> token(0, vocab - 1);
  StructuredInput in;
  for (int i = 0; i < length; ++i) {
    in.token_ids.push_back(token(*rng));
    in.position_ids.push_back(i);
    in.padding_mask.push_back(1);
    in.head_mask.push_back(i == 1);
    in.tail_mask.push_back(i == 3);
    in.source_index.push_back(-1);
    in.pieces.push_back("x");
  }
  in.region_begin = 0;
  in.region_end = length;
  return in;
}

EncoderConfig Profile(int layers, int hidden) {
  EncoderConfig c = EncoderConfig::Tiny(1000);
  c.num_layers = layers;
  c.hidden_dim = hidden;
  c.num_heads = hidden >= 256 ? 12 : 2;
  c.intermediate_dim = 4 * hidden;
  c.max_positions = 512;
  c.hidden_dropout = 0.0;
  c.attention_dropout = 0.0;
  return c;
}

// Args: sequence length, hidden size.
void BM_EncoderForward(benchmark::State& state) {
  std::mt19937_64 rng(1);
  TransformerEncoder encoder(Profile(2, static_cast<int>(state.range(1))));
  encoder.InitializeRandom(&rng);
  const StructuredInput in = RandomInput(static_cast<int>(state.range(0)), 1000, &rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(encoder.Encode(in));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncoderForward)
    ->ArgsProduct({{16, 64, 128}, {32, 128}})
    ->Unit(benchmark::kMicrosecond);

void BM_EncoderForwardBackward(benchmark::State& state) {
  std::mt19937_64 rng(1);
  TransformerEncoder encoder(Profile(2, static_cast<int>(state.range(1))));
  encoder.InitializeRandom(&rng);
  const StructuredInput in = RandomInput(static_cast<int>(state.range(0)), 1000, &rng);
  for (auto _ : state) {
    EncoderCache cache;
    TokenStates states = encoder.Encode(in, &cache, &rng).value();
    encoder.Backward(Eigen::MatrixXd::Ones(states.hidden.rows(), states.hidden.cols()),
                     cache);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncoderForwardBackward)
    ->ArgsProduct({{16, 64, 128}, {32, 128}})
    ->Unit(benchmark::kMicrosecond);

// Arg: sentences per bag.
void BM_SelectiveAttention(benchmark::State& state) {
  std::mt19937_64 rng(2);
  BagEncoderParams params(1536, 53, 0.0);
  params.InitializeRandom(&rng);
  const Eigen::MatrixXd sentences = Eigen::MatrixXd::Random(state.range(0), 1536);
  for (auto _ : state) {
    auto [bag, beta] = SelectiveAttention(sentences, params);
    benchmark::DoNotOptimize(Classify(bag, params));
  }
}
BENCHMARK(BM_SelectiveAttention)->RangeMultiplier(4)->Range(1, 256);

}  // namespace
}  // namespace dsre

BENCHMARK_MAIN();
