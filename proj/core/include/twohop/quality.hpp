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

#ifndef TWOHOP_QUALITY_HPP_
#define TWOHOP_QUALITY_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "twohop/error.hpp"
#include "twohop/merge.hpp"

namespace twohop {

enum class Dimension : std::uint8_t {
  kFluency = 0,
  kRelevance,
  kMultiHopReasoning,
  kEngagingness,
  kFactualCorrectness,
  kInclusiveness,
};

inline constexpr std::size_t kDimensionCount = 6;
inline constexpr std::array<Dimension, kDimensionCount> kAllDimensions = {
    Dimension::kFluency,           Dimension::kRelevance,
    Dimension::kMultiHopReasoning, Dimension::kEngagingness,
    Dimension::kFactualCorrectness, Dimension::kInclusiveness};

// "multi_hop_reasoning"
const char* dimension_key(Dimension d);
// "Multi-Hop Reasoning"
const char* dimension_label(Dimension d);

class RubricError : public DataError {
 public:
  using DataError::DataError;
};

// Six 0..3 scores. Construction rejects anything outside that range.
class Rubric {
 public:
  static constexpr int kMinScore = 0;
  static constexpr int kMaxScore = 3;

  Rubric(int fluency, int relevance, int multi_hop_reasoning,
         int engagingness, int factual_correctness, int inclusiveness);
  explicit Rubric(const std::array<int, kDimensionCount>& values);

  int operator[](Dimension d) const {
    return values_[static_cast<std::size_t>(d)];
  }
  const std::array<int, kDimensionCount>& values() const { return values_; }

  bool operator==(const Rubric&) const = default;

 private:
  std::array<int, kDimensionCount> values_;
};

struct AnnotationRecord {
  std::string annotator_id;
  std::string question_id;
  Rubric rubric;
  std::string created_at;  // ISO-8601 UTC

  bool operator==(const AnnotationRecord&) const = default;
};

std::string to_json_line(const AnnotationRecord& record);
AnnotationRecord annotation_from_json_line(std::string_view line);

// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

// Reads a JSONL annotation store. Throws DataError on malformed lines or a
// repeated (annotator_id, question_id).
std::vector<AnnotationRecord> load_annotations(
    const std::filesystem::path& path);

// Append-only JSONL store. Appends are serialized; every line is flushed
// before append() returns.
class AnnotationStore {
 public:
  explicit AnnotationStore(std::filesystem::path path);

  void append(const AnnotationRecord& record);
  std::vector<AnnotationRecord> read_all() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
};

// Uniform sample without replacement; same seed, same order. Throws
// UsageError when n exceeds the dataset size.
std::vector<MergedQuestion> sample_questions(
    std::span<const MergedQuestion> dataset, std::size_t n,
    std::uint64_t seed);

using DimensionMeans = std::array<double, kDimensionCount>;

// Mean per dimension over all records. Throws UsageError when empty.
DimensionMeans aggregate_scores(std::span<const AnnotationRecord> records);

// Unweighted Cohen's kappa with marginal-product chance agreement. Returns 1
// when chance agreement is 1. Throws UsageError on empty or unequal lists.
double cohen_kappa(std::span<const int> labels_a,
                   std::span<const int> labels_b);

struct PairKappa {
  std::string annotator_a;
  std::string annotator_b;
  std::size_t shared_questions = 0;
  double kappa = 0;
  // Per-dimension kappa over the same shared questions.
  std::array<double, kDimensionCount> by_dimension{};
};

struct AgreementReport {
  DimensionMeans means{};
  std::optional<double> mean_pairwise_kappa;
  std::vector<PairKappa> pairs;
  std::vector<std::string> excluded_annotators;  // no overlap with anyone
  std::optional<std::string> kappa_absent_reason;
  std::size_t n_questions = 0;
  std::size_t n_annotators = 0;
  std::size_t n_records = 0;
};

// Pools the six labels of every co-annotated question per annotator pair,
// takes Cohen's kappa per pair and averages over pairs. Throws DataError
// when no two annotators share a question.
AgreementReport mean_pairwise_kappa(std::span<const AnnotationRecord> records);

// As above but never throws for missing overlap: kappa is left absent with
// a reason. Throws UsageError on an empty record list.
AgreementReport agreement_report(std::span<const AnnotationRecord> records);

std::string agreement_to_json(const AgreementReport& report);
// Two-row table: a header of the six dimension labels and one score row.
std::string means_to_table(std::string_view method, const DimensionMeans& means);
// `method` labels the score row, e.g. "Human Eval" or a model name.
std::string agreement_to_table(const AgreementReport& report,
                               std::string_view method = "Human Eval");

}  // namespace twohop

#endif  // TWOHOP_QUALITY_HPP_
