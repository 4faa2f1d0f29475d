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

#include <algorithm>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "twohop/random.hpp"

namespace twohop {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::array<int, kDimensionCount> checked(
    const std::array<int, kDimensionCount>& values) {
  for (std::size_t i = 0; i < kDimensionCount; ++i) {
    if (values[i] < Rubric::kMinScore || values[i] > Rubric::kMaxScore) {
      throw RubricError(std::string("rubric ") +
                        dimension_key(kAllDimensions[i]) + " = " +
                        std::to_string(values[i]) + " is outside 0..3");
    }
  }
  return values;
}

// Counts-based kappa keeps the computation exact and symmetric: both the
// observed and chance terms are integers until the final division.
double kappa_from_labels(std::span<const int> a, std::span<const int> b) {
  const std::size_t n = a.size();
  std::map<int, std::pair<long long, long long>> marginals;
  long long agree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == b[i]) ++agree;
    ++marginals[a[i]].first;
    ++marginals[b[i]].second;
  }
  long long chance = 0;  // sum of marginal products, scaled by n^2
  for (const auto& [label, m] : marginals) chance += m.first * m.second;
  const long long nn = static_cast<long long>(n) * static_cast<long long>(n);
  if (chance == nn) return 1.0;
  return static_cast<double>(agree * static_cast<long long>(n) - chance) /
         static_cast<double>(nn - chance);
}

using ByAnnotator =
    std::map<std::string, std::map<std::string, const AnnotationRecord*>>;

ByAnnotator group_by_annotator(std::span<const AnnotationRecord> records) {
  ByAnnotator out;
  for (const auto& r : records) {
    auto [it, inserted] = out[r.annotator_id].emplace(r.question_id, &r);
    if (!inserted) {
      throw DataError("duplicate annotation for annotator \"" +
                      r.annotator_id + "\" on question \"" + r.question_id +
                      "\"");
    }
  }
  return out;
}

AgreementReport build_report(std::span<const AnnotationRecord> records) {
  AgreementReport report;
  report.means = aggregate_scores(records);
  report.n_records = records.size();
  const auto by_annotator = group_by_annotator(records);
  report.n_annotators = by_annotator.size();
  std::set<std::string> questions;
  for (const auto& r : records) questions.insert(r.question_id);
  report.n_questions = questions.size();

  std::set<std::string> paired;
  for (auto a = by_annotator.begin(); a != by_annotator.end(); ++a) {
    for (auto b = std::next(a); b != by_annotator.end(); ++b) {
      std::vector<int> la, lb;
      std::array<std::vector<int>, kDimensionCount> da, db;
      std::size_t shared = 0;
      for (const auto& [qid, rec_a] : a->second) {
        auto it = b->second.find(qid);
        if (it == b->second.end()) continue;
        ++shared;
        for (std::size_t d = 0; d < kDimensionCount; ++d) {
          la.push_back(rec_a->rubric.values()[d]);
          lb.push_back(it->second->rubric.values()[d]);
          da[d].push_back(rec_a->rubric.values()[d]);
          db[d].push_back(it->second->rubric.values()[d]);
        }
      }
      if (shared == 0) continue;
      PairKappa pk;
      pk.annotator_a = a->first;
      pk.annotator_b = b->first;
      pk.shared_questions = shared;
      pk.kappa = kappa_from_labels(la, lb);
      for (std::size_t d = 0; d < kDimensionCount; ++d) {
        pk.by_dimension[d] = kappa_from_labels(da[d], db[d]);
      }
      report.pairs.push_back(std::move(pk));
      paired.insert(a->first);
      paired.insert(b->first);
    }
  }
  for (const auto& [annotator, _] : by_annotator) {
    if (!paired.contains(annotator)) {
      report.excluded_annotators.push_back(annotator);
    }
  }
  if (report.pairs.empty()) {
    report.kappa_absent_reason =
        report.n_annotators < 2
            ? "kappa needs at least two annotators"
            : "no two annotators share a scored question";
  } else {
    double sum = 0;
    for (const auto& p : report.pairs) sum += p.kappa;
    report.mean_pairwise_kappa = sum / static_cast<double>(report.pairs.size());
  }
  return report;
}

std::string fixed(double v, int precision = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

}  // namespace

const char* dimension_key(Dimension d) {
  switch (d) {
    case Dimension::kFluency:
      return "fluency";
    case Dimension::kRelevance:
      return "relevance";
    case Dimension::kMultiHopReasoning:
      return "multi_hop_reasoning";
    case Dimension::kEngagingness:
      return "engagingness";
    case Dimension::kFactualCorrectness:
      return "factual_correctness";
    case Dimension::kInclusiveness:
      return "inclusiveness";
  }
  return "?";
}

const char* dimension_label(Dimension d) {
  switch (d) {
    case Dimension::kFluency:
      return "Fluency";
    case Dimension::kRelevance:
      return "Relevance";
    case Dimension::kMultiHopReasoning:
      return "Multi-Hop Reasoning";
    case Dimension::kEngagingness:
      return "Engagingness";
    case Dimension::kFactualCorrectness:
      return "Factual Correctness";
    case Dimension::kInclusiveness:
      return "Inclusiveness";
  }
  return "?";
}

Rubric::Rubric(int fluency, int relevance, int multi_hop_reasoning,
               int engagingness, int factual_correctness, int inclusiveness)
    : Rubric(std::array<int, kDimensionCount>{
          fluency, relevance, multi_hop_reasoning, engagingness,
          factual_correctness, inclusiveness}) {}

Rubric::Rubric(const std::array<int, kDimensionCount>& values)
    : values_(checked(values)) {}

std::string to_json_line(const AnnotationRecord& record) {
  ordered_json obj;
  obj["annotator_id"] = record.annotator_id;
  obj["question_id"] = record.question_id;
  ordered_json rubric;
  for (auto d : kAllDimensions) rubric[dimension_key(d)] = record.rubric[d];
  obj["rubric"] = rubric;
  obj["created_at"] = record.created_at;
  return obj.dump();
}

AnnotationRecord annotation_from_json_line(std::string_view line) {
  try {
    const json obj = json::parse(line);
    std::array<int, kDimensionCount> values{};
    const auto& rubric = obj.at("rubric");
    for (std::size_t i = 0; i < kDimensionCount; ++i) {
      values[i] = rubric.at(dimension_key(kAllDimensions[i])).get<int>();
    }
    return AnnotationRecord{obj.at("annotator_id").get<std::string>(),
                            obj.at("question_id").get<std::string>(),
                            Rubric(values),
                            obj.value("created_at", std::string())};
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid annotation record: ") + e.what());
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<AnnotationRecord> load_annotations(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read annotation store " + path.string());
  std::vector<AnnotationRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto rec = annotation_from_json_line(line);
      if (!seen.emplace(rec.annotator_id, rec.question_id).second) {
        throw DataError("duplicate (annotator, question) pair (" +
                        rec.annotator_id + ", " + rec.question_id + ")");
      }
      out.push_back(std::move(rec));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  return out;
}

AnnotationStore::AnnotationStore(std::filesystem::path path)
    : path_(std::move(path)) {}

void AnnotationStore::append(const AnnotationRecord& record) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (path_.has_parent_path()) {
    std::filesystem::create_directories(path_.parent_path());
  }
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw DataError("cannot append to " + path_.string());
  out << to_json_line(record) << '\n';
  out.flush();
  if (!out) throw DataError("write to " + path_.string() + " failed");
}

std::vector<AnnotationRecord> AnnotationStore::read_all() const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!std::filesystem::exists(path_)) return {};
  return load_annotations(path_);
}

std::vector<MergedQuestion> sample_questions(
    std::span<const MergedQuestion> dataset, std::size_t n,
    std::uint64_t seed) {
  if (n > dataset.size()) {
    throw UsageError("cannot sample " + std::to_string(n) + " questions from " +
                     std::to_string(dataset.size()));
  }
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SeededRng rng(seed);
  // Partial Fisher-Yates: position i receives a uniform pick of the rest.
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(order.size() - i));
    std::swap(order[i], order[j]);
  }
  std::vector<MergedQuestion> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(dataset[order[i]]);
  return out;
}

DimensionMeans aggregate_scores(std::span<const AnnotationRecord> records) {
  if (records.empty()) throw UsageError("aggregate_scores: no records");
  std::array<long long, kDimensionCount> sums{};
  for (const auto& r : records) {
    for (std::size_t d = 0; d < kDimensionCount; ++d) {
      sums[d] += r.rubric.values()[d];
    }
  }
  DimensionMeans means{};
  for (std::size_t d = 0; d < kDimensionCount; ++d) {
    means[d] =
        static_cast<double>(sums[d]) / static_cast<double>(records.size());
  }
  return means;
}

double cohen_kappa(std::span<const int> labels_a,
                   std::span<const int> labels_b) {
  if (labels_a.size() != labels_b.size()) {
    throw UsageError("cohen_kappa: label lists differ in length (" +
                     std::to_string(labels_a.size()) + " vs " +
                     std::to_string(labels_b.size()) + ")");
  }
  if (labels_a.empty()) throw UsageError("cohen_kappa: empty label lists");
  return kappa_from_labels(labels_a, labels_b);
}

AgreementReport mean_pairwise_kappa(
    std::span<const AnnotationRecord> records) {
  auto report = build_report(records);
  if (!report.mean_pairwise_kappa) {
    throw DataError("mean_pairwise_kappa: " + *report.kappa_absent_reason);
  }
  return report;
}

AgreementReport agreement_report(std::span<const AnnotationRecord> records) {
  return build_report(records);
}

std::string agreement_to_json(const AgreementReport& report) {
  ordered_json obj;
  ordered_json means;
  for (auto d : kAllDimensions) {
    means[dimension_key(d)] = report.means[static_cast<std::size_t>(d)];
  }
  obj["means"] = means;
  if (report.mean_pairwise_kappa) {
    obj["mean_pairwise_kappa"] = *report.mean_pairwise_kappa;
    ordered_json pairs = ordered_json::array();
    for (const auto& p : report.pairs) {
      ordered_json pj;
      pj["annotator_a"] = p.annotator_a;
      pj["annotator_b"] = p.annotator_b;
      pj["shared_questions"] = p.shared_questions;
      pj["kappa"] = p.kappa;
      ordered_json by_dim;
      for (auto d : kAllDimensions) {
        by_dim[dimension_key(d)] = p.by_dimension[static_cast<std::size_t>(d)];
      }
      pj["by_dimension"] = by_dim;
      pairs.push_back(pj);
    }
    obj["pairs"] = pairs;
  } else {
    obj["kappa_absent_reason"] = report.kappa_absent_reason.value_or("");
  }
  obj["excluded_annotators"] = report.excluded_annotators;
  obj["n_questions"] = report.n_questions;
  obj["n_annotators"] = report.n_annotators;
  obj["n_records"] = report.n_records;
  return obj.dump(2) + "\n";
}

std::string means_to_table(std::string_view method,
                           const DimensionMeans& means) {
  std::ostringstream os;
  const int method_width =
      static_cast<int>(std::max<std::size_t>(method.size(), 6));
  os << std::left << std::setw(method_width) << "Method";
  for (auto d : kAllDimensions) os << "  " << dimension_label(d);
  os << "\n" << std::setw(method_width) << method;
  for (auto d : kAllDimensions) {
    const int width = static_cast<int>(std::strlen(dimension_label(d)));
    os << "  " << std::setw(width) << fixed(means[static_cast<std::size_t>(d)]);
  }
  std::string out = os.str();
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out + "\n";
}

std::string agreement_to_table(const AgreementReport& report,
                               std::string_view method) {
  std::ostringstream os;
  os << means_to_table(method, report.means) << "\n";
  // Inline listing: Fluency(2.92), Relevance(3.00), ...
  bool first = true;
  for (auto d : kAllDimensions) {
    os << (first ? "" : ", ") << dimension_label(d) << "("
       << fixed(report.means[static_cast<std::size_t>(d)]) << ")";
    first = false;
  }
  os << "\n";
  if (report.mean_pairwise_kappa) {
    os << "Inter-rater agreement (mean pairwise Cohen's kappa): "
       << fixed(*report.mean_pairwise_kappa) << " over "
       << report.pairs.size() << " annotator pair(s)\n";
  } else {
    os << "Inter-rater agreement: n/a ("
       << report.kappa_absent_reason.value_or("unknown") << ")\n";
  }
  if (!report.excluded_annotators.empty()) {
    os << "Excluded (no shared questions):";
    for (const auto& a : report.excluded_annotators) os << ' ' << a;
    os << "\n";
  }
  os << "Questions: " << report.n_questions
     << ", annotators: " << report.n_annotators
     << ", records: " << report.n_records << "\n";
  return os.str();
}

}  // namespace twohop
