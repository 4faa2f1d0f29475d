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

#include "twohop/quality.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "support/oracles.hpp"

namespace twohop {
namespace {

Rubric all(int v) { return Rubric(v, v, v, v, v, v); }

AnnotationRecord ann(std::string who, std::string qid, Rubric r) {
  return {std::move(who), std::move(qid), r, "2026-01-01T00:00:00Z"};
}

std::vector<MergedQuestion> dataset(std::size_t n) {
  std::vector<MergedQuestion> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].host_qid = "h" + std::to_string(i);
    out[i].guest_qid = "g" + std::to_string(i);
    out[i].text = "Question " + std::to_string(i) + "?";
  }
  return out;
}

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "twohop_quality_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::filesystem::remove(p);
  return p;
}

TEST(Rubric, RejectsOutOfRange) {
  EXPECT_NO_THROW(Rubric(0, 1, 2, 3, 0, 3));
  EXPECT_THROW(Rubric(4, 0, 0, 0, 0, 0), RubricError);
  EXPECT_THROW(Rubric(0, 0, 0, 0, 0, -1), RubricError);
  const Rubric r(0, 1, 2, 3, 2, 1);
  EXPECT_EQ(r[Dimension::kMultiHopReasoning], 2);
  EXPECT_EQ(r[Dimension::kInclusiveness], 1);
}

TEST(Dimension, KeysAndLabels) {
  EXPECT_STREQ(dimension_key(Dimension::kMultiHopReasoning), "multi_hop_reasoning");
  EXPECT_STREQ(dimension_label(Dimension::kMultiHopReasoning), "Multi-Hop Reasoning");
  EXPECT_STREQ(dimension_label(Dimension::kFactualCorrectness), "Factual Correctness");
}

TEST(AnnotationJson, RoundTrip) {
  const auto a = ann("alice", "h1+g1", Rubric(3, 2, 1, 0, 3, 2));
  EXPECT_EQ(annotation_from_json_line(to_json_line(a)), a);
  EXPECT_THROW(annotation_from_json_line("{\"annotator_id\":\"a\"}"), DataError);
  auto line = to_json_line(a);
  line.replace(line.find("\"fluency\":3"), 11, "\"fluency\":7");
  EXPECT_THROW(annotation_from_json_line(line), RubricError);
}

TEST(SampleQuestions, Basics) {
  const auto data = dataset(50);
  EXPECT_TRUE(sample_questions(data, 0, 1).empty());
  auto whole = sample_questions(data, 50, 1);
  ASSERT_EQ(whole.size(), 50u);
  std::set<std::string> ids;
  for (const auto& q : whole) ids.insert(q.id());
  EXPECT_EQ(ids.size(), 50u);
  EXPECT_THROW(sample_questions(data, 51, 1), UsageError);
}

TEST(SampleQuestions, DeterministicPerSeed) {
  const auto data = dataset(60000);
  const auto a = sample_questions(data, 200, 42);
  const auto b = sample_questions(data, 200, 42);
  const auto c = sample_questions(data, 200, 43);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(SampleQuestions, RoughlyUniform) {
  const auto data = dataset(10);
  std::vector<int> hits(10, 0);
  for (std::uint64_t seed = 0; seed < 5000; ++seed) {
    for (const auto& q : sample_questions(data, 3, seed)) {
      ++hits[std::stoul(q.host_qid.substr(1))];
    }
  }
  for (int h : hits) EXPECT_NEAR(h, 1500, 150);
}

TEST(AggregateScores, Means) {
  const std::vector<AnnotationRecord> threes = {ann("a", "q1", all(3)),
                                                ann("b", "q1", all(3))};
  for (double m : aggregate_scores(threes)) EXPECT_DOUBLE_EQ(m, 3.0);
  std::vector<AnnotationRecord> two = {ann("a", "q1", Rubric(2, 0, 0, 0, 0, 0)),
                                       ann("a", "q2", Rubric(3, 0, 0, 0, 0, 1))};
  const auto m = aggregate_scores(two);
  EXPECT_DOUBLE_EQ(m[0], 2.5);
  EXPECT_DOUBLE_EQ(m[5], 0.5);
  std::reverse(two.begin(), two.end());
  EXPECT_EQ(aggregate_scores(two), m);
  EXPECT_THROW(aggregate_scores(std::vector<AnnotationRecord>{}), UsageError);
}

TEST(CohenKappa, ClosedForms) {
  const std::vector<int> a = {0, 0, 1, 1}, b = {0, 1, 1, 1};
  EXPECT_DOUBLE_EQ(cohen_kappa(a, a), 1.0);
  EXPECT_DOUBLE_EQ(cohen_kappa(a, b), 0.5);
  const std::vector<int> c = {0, 1}, d = {1, 0};
  EXPECT_DOUBLE_EQ(cohen_kappa(c, d), -1.0);
  const std::vector<int> same = {2, 2, 2};
  EXPECT_DOUBLE_EQ(cohen_kappa(same, same), 1.0);
}

TEST(CohenKappa, Errors) {
  const std::vector<int> a = {0, 1}, b = {0};
  EXPECT_THROW(cohen_kappa(a, b), UsageError);
  EXPECT_THROW(cohen_kappa(std::vector<int>{}, std::vector<int>{}), UsageError);
}

TEST(CohenKappa, SymmetricAndMatchesOracle) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> label(0, 3), len(1, 30);
  for (int i = 0; i < 1000; ++i) {
    std::vector<int> a(static_cast<std::size_t>(len(rng))), b(a.size());
    for (auto& x : a) x = label(rng);
    for (auto& x : b) x = label(rng);
    EXPECT_EQ(cohen_kappa(a, b), cohen_kappa(b, a));
    EXPECT_NEAR(cohen_kappa(a, b), oracle::kappa(a, b), 1e-12);
  }
}

TEST(MeanPairwiseKappa, IdenticalAnnotatorsGiveOne) {
  std::vector<AnnotationRecord> recs;
  const Rubric rubrics[] = {Rubric(3, 2, 1, 0, 3, 2), Rubric(1, 1, 2, 3, 0, 0)};
  for (const char* who : {"a", "b", "c"}) {
    recs.push_back(ann(who, "q1", rubrics[0]));
    recs.push_back(ann(who, "q2", rubrics[1]));
  }
  const auto r = mean_pairwise_kappa(recs);
  ASSERT_TRUE(r.mean_pairwise_kappa);
  EXPECT_DOUBLE_EQ(*r.mean_pairwise_kappa, 1.0);
  EXPECT_EQ(r.pairs.size(), 3u);
  EXPECT_EQ(r.n_annotators, 3u);
  EXPECT_EQ(r.n_questions, 2u);
  EXPECT_EQ(r.n_records, 6u);
}

TEST(MeanPairwiseKappa, SingleDimensionReducesToCohenKappa) {
  // Fluency carries the A/B lists; the other dimensions repeat them so the
  // pooled stream is the same contingency table scaled by six.
  const int a[] = {0, 0, 1, 1}, b[] = {0, 1, 1, 1};
  std::vector<AnnotationRecord> recs;
  for (int i = 0; i < 4; ++i) {
    const std::string q = "q" + std::to_string(i);
    recs.push_back(ann("a", q, all(a[i])));
    recs.push_back(ann("b", q, all(b[i])));
  }
  auto r = mean_pairwise_kappa(recs);
  EXPECT_NEAR(*r.mean_pairwise_kappa, 0.5, 1e-12);
  EXPECT_NEAR(r.pairs.at(0).by_dimension[0], 0.5, 1e-12);

  // With the other dimensions fixed at 2 the per-dimension value for
  // fluency is still the closed form.
  recs.clear();
  for (int i = 0; i < 4; ++i) {
    const std::string q = "q" + std::to_string(i);
    recs.push_back(ann("a", q, Rubric(a[i], 2, 2, 2, 2, 2)));
    recs.push_back(ann("b", q, Rubric(b[i], 2, 2, 2, 2, 2)));
  }
  r = mean_pairwise_kappa(recs);
  EXPECT_NEAR(r.pairs.at(0).by_dimension[0], 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(r.pairs.at(0).by_dimension[1], 1.0);
}

TEST(MeanPairwiseKappa, ExcludesAnnotatorWithoutOverlap) {
  const std::vector<AnnotationRecord> recs = {
      ann("a", "q1", all(3)), ann("b", "q1", all(3)), ann("c", "q9", all(1))};
  const auto r = mean_pairwise_kappa(recs);
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0].annotator_a, "a");
  EXPECT_EQ(r.pairs[0].annotator_b, "b");
  EXPECT_EQ(r.pairs[0].shared_questions, 1u);
  EXPECT_EQ(r.excluded_annotators, std::vector<std::string>{"c"});
}

TEST(MeanPairwiseKappa, NoOverlapIsAnError) {
  const std::vector<AnnotationRecord> recs = {ann("a", "q1", all(3)),
                                              ann("b", "q2", all(3))};
  EXPECT_THROW(mean_pairwise_kappa(recs), DataError);
  const auto r = agreement_report(recs);
  EXPECT_FALSE(r.mean_pairwise_kappa);
  EXPECT_TRUE(r.kappa_absent_reason);
  EXPECT_DOUBLE_EQ(r.means[0], 3.0);
  EXPECT_EQ(agreement_to_json(r).find("\"mean_pairwise_kappa\""),
            std::string::npos);
}

TEST(AnnotationStore, AppendAndReload) {
  const auto path = temp_file("store.jsonl");
  AnnotationStore store(path);
  store.append(ann("a", "q1", all(2)));
  store.append(ann("b", "q1", all(1)));
  const auto back = load_annotations(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1], ann("b", "q1", all(1)));
  EXPECT_EQ(store.read_all(), back);
}

TEST(AnnotationStore, ConcurrentAppendsKeepWholeLines) {
  const auto path = temp_file("concurrent.jsonl");
  AnnotationStore store(path);
  {
    std::vector<std::jthread> workers;
    for (int t = 0; t < 8; ++t) {
      workers.emplace_back([&store, t] {
        for (int i = 0; i < 50; ++i) {
          store.append(ann("a" + std::to_string(t), "q" + std::to_string(i),
                           all(i % 4)));
        }
      });
    }
  }
  EXPECT_EQ(load_annotations(path).size(), 400u);
}

TEST(AnnotationStore, DuplicatePairRejectedOnLoad) {
  const auto path = temp_file("dup.jsonl");
  AnnotationStore store(path);
  store.append(ann("a", "q1", all(2)));
  store.append(ann("a", "q1", all(3)));
  EXPECT_THROW(load_annotations(path), DataError);
}

TEST(Tables, LabelsAndFormatting) {
  const std::vector<AnnotationRecord> recs = {ann("a", "q1", all(3)),
                                              ann("b", "q1", all(3))};
  const auto table = agreement_to_table(agreement_report(recs));
  EXPECT_NE(table.find("Multi-Hop Reasoning"), std::string::npos);
  EXPECT_NE(table.find("Human Eval"), std::string::npos);
  EXPECT_NE(table.find("3.00"), std::string::npos);
  const auto t2 = means_to_table("gpt-5-nano", DimensionMeans{2.92, 3, 3, 3, 3, 3});
  EXPECT_NE(t2.find("gpt-5-nano"), std::string::npos);
  EXPECT_NE(t2.find("2.92"), std::string::npos);
}

}  // namespace
}  // namespace twohop
