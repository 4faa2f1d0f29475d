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

#include "twohop/corpus.hpp"
#include "twohop/merge.hpp"

namespace {

// Episodes of ~24 records over 6 segments, shaped like a TV QA corpus: short
// questions naming characters, short name answers, some long answers.
twohop::Corpus synthetic_corpus(int episodes) {
  static const std::vector<std::string> names = {
      "Ross", "Rachel", "Monica", "Chandler", "Joey", "Phoebe", "Castle", "Beckett"};
  static const std::vector<std::string> verbs = {
      "talking with", "looking at", "sitting next to", "holding", "calling"};
  std::mt19937_64 rng(12345);
  auto pick = [&rng](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  std::vector<twohop::QARecord> records;
  for (int ep = 1; ep <= episodes; ++ep) {
    for (int i = 0; i < 24; ++i) {
      twohop::QARecord r;
      r.qid = std::to_string(ep) + "_" + std::to_string(i);
      r.question = "Who was " + pick(names) + " " + pick(verbs) + " when " +
                   pick(names) + " walked in?";
      r.answer = i % 4 == 0 ? pick(names) + " was " + pick(verbs) + " the door"
                            : pick(names);
      r.show = ep % 2 ? "friends" : "castle";
      r.season = 1 + ep / 24;
      r.episode = ep;
      r.segment = "seg" + std::to_string(i % 6);
      records.push_back(std::move(r));
    }
  }
  return twohop::Corpus(std::move(records));
}

void BM_GenerateDataset(benchmark::State& state) {
  const auto corpus = synthetic_corpus(static_cast<int>(state.range(0)));
  twohop::GenerateOptions opts;
  opts.threads = static_cast<unsigned>(state.range(1));
  std::size_t produced = 0;
  for (auto _ : state) {
    auto out = twohop::generate_dataset(corpus, {}, opts);
    produced = out.size();
    benchmark::DoNotOptimize(out);
  }
  state.counters["merged"] = static_cast<double>(produced);
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(corpus.records().size()));
}
BENCHMARK(BM_GenerateDataset)
    ->Args({16, 1})
    ->Args({256, 1})
    ->Args({256, 4})
    ->Unit(benchmark::kMillisecond);

void BM_DetectOverlap(benchmark::State& state) {
  const std::string host =
      "Who was Joey talking with when Ross went inside the coffee house?";
  for (auto _ : state) {
    benchmark::DoNotOptimize(twohop::detect_overlap(host, "the coffee house", {}));
  }
}
BENCHMARK(BM_DetectOverlap);

}  // namespace

BENCHMARK_MAIN();
