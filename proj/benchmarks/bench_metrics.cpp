// Copyright 2026 The twohop Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "twohop/metrics.hpp"
#include "twohop/quality.hpp"

namespace {

std::string random_sentence(std::mt19937_64& rng, int words) {
  static const std::vector<std::string> vocab = {
      "who", "what", "the", "person", "was", "talking", "with", "when",
      "ross", "joey", "went", "inside", "phone", "door", "before", "after"};
  std::string s;
  for (int i = 0; i < words; ++i) {
    s += (i ? " " : "") +
         vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)];
  }
  return s;
}

void BM_RougeL(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int n = static_cast<int>(state.range(0));
  const auto hyp = twohop::metric_tokens(random_sentence(rng, n));
  const auto ref = twohop::metric_tokens(random_sentence(rng, n));
  for (auto _ : state) benchmark::DoNotOptimize(twohop::rouge_l(hyp, ref));
}
BENCHMARK(BM_RougeL)->Arg(16)->Arg(64)->Arg(256);

void BM_EvaluateCorpus(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::vector<twohop::TextPair> pairs;
  for (int i = 0; i < state.range(0); ++i) {
    pairs.push_back({random_sentence(rng, 27), random_sentence(rng, 27)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(twohop::evaluate_corpus(pairs));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluateCorpus)->Arg(200)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_CohenKappa(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> label(0, 3);
  std::vector<int> a(static_cast<std::size_t>(state.range(0)));
  std::vector<int> b(a.size());
  for (auto& x : a) x = label(rng);
  for (auto& x : b) x = label(rng);
  for (auto _ : state) benchmark::DoNotOptimize(twohop::cohen_kappa(a, b));
}
BENCHMARK(BM_CohenKappa)->Arg(1200);

}  // namespace

BENCHMARK_MAIN();
