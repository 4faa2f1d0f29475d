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

#include "twohop/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "twohop/error.hpp"
#include "twohop/words.hpp"

namespace twohop {
namespace {

void require_ref(const TokenSequence& ref) {
  if (ref.empty()) throw UsageError("reference token sequence is empty");
}

double f1(double precision, double recall) {
  if (precision + recall <= 0) return 0;
  return 2 * precision * recall / (precision + recall);
}

std::map<std::string_view, std::size_t> counts(const TokenSequence& seq) {
  std::map<std::string_view, std::size_t> c;
  for (const auto& w : seq) ++c[w];
  return c;
}

double norm(const Vector& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TokenSequence metric_tokens(std::string_view text) {
  return normalize_words(text, true);
}

std::size_t clipped_unigram_overlap(const TokenSequence& hyp,
                                    const TokenSequence& ref) {
  const auto ref_counts = counts(ref);
  std::size_t overlap = 0;
  for (const auto& [word, n] : counts(hyp)) {
    auto it = ref_counts.find(word);
    if (it != ref_counts.end()) overlap += std::min(n, it->second);
  }
  return overlap;
}

double rouge_1(const TokenSequence& hyp, const TokenSequence& ref) {
  require_ref(ref);
  if (hyp.empty()) return 0;
  const auto overlap = static_cast<double>(clipped_unigram_overlap(hyp, ref));
  return f1(overlap / static_cast<double>(hyp.size()),
            overlap / static_cast<double>(ref.size()));
}

std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b) {
  // Single-row DP over b.
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (const auto& x : a) {
    std::size_t diag = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = (x == b[j - 1]) ? diag + 1 : std::max(row[j], row[j - 1]);
      diag = up;
    }
  }
  return row.back();
}

double rouge_l(const TokenSequence& hyp, const TokenSequence& ref) {
  require_ref(ref);
  if (hyp.empty()) return 0;
  const auto lcs = static_cast<double>(lcs_length(hyp, ref));
  if (lcs == 0) return 0;
  return f1(lcs / static_cast<double>(hyp.size()),
            lcs / static_cast<double>(ref.size()));
}

double bleu_1(const TokenSequence& hyp, const TokenSequence& ref) {
  require_ref(ref);
  if (hyp.empty()) return 0;
  const double h = static_cast<double>(hyp.size());
  const double r = static_cast<double>(ref.size());
  const double precision =
      static_cast<double>(clipped_unigram_overlap(hyp, ref)) / h;
  const double bp = h >= r ? 1.0 : std::exp(1.0 - r / h);
  return precision * bp;
}

double distinct_n(std::span<const TokenSequence> corpus, int n) {
  if (n != 1 && n != 2) throw UsageError("distinct_n supports n = 1 or 2");
  std::set<std::string> distinct;
  std::size_t total = 0;
  for (const auto& seq : corpus) {
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= seq.size();
         ++i) {
      // '\x1f' cannot occur inside a whitespace token.
      distinct.insert(n == 1 ? seq[i] : seq[i] + '\x1f' + seq[i + 1]);
      ++total;
    }
  }
  if (total == 0) {
    throw DataError("distinct-" + std::to_string(n) +
                    ": corpus contains no n-grams");
  }
  return static_cast<double>(distinct.size()) / static_cast<double>(total);
}

double cosine_similarity(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) {
    throw UsageError("cosine_similarity: dimension mismatch (" +
                     std::to_string(u.size()) + " vs " +
                     std::to_string(v.size()) + ")");
  }
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0 || nv == 0) throw UsageError("cosine_similarity: zero vector");
  double dot = 0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
  return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

double greedy_match_f1(const std::vector<Vector>& hyp_vecs,
                       const std::vector<Vector>& ref_vecs) {
  if (hyp_vecs.empty() || ref_vecs.empty()) {
    throw UsageError("greedy_match_f1: empty token vector list");
  }
  const std::size_t dim = hyp_vecs.front().size();
  auto check_dim = [dim](const Vector& v) {
    if (v.size() != dim) {
      throw UsageError("greedy_match_f1: token vectors differ in dimension");
    }
  };
  std::for_each(hyp_vecs.begin(), hyp_vecs.end(), check_dim);
  std::for_each(ref_vecs.begin(), ref_vecs.end(), check_dim);

  std::vector<double> best_hyp(hyp_vecs.size(), -1.0);
  std::vector<double> best_ref(ref_vecs.size(), -1.0);
  for (std::size_t i = 0; i < hyp_vecs.size(); ++i) {
    for (std::size_t j = 0; j < ref_vecs.size(); ++j) {
      const double c = cosine_similarity(hyp_vecs[i], ref_vecs[j]);
      best_hyp[i] = std::max(best_hyp[i], c);
      best_ref[j] = std::max(best_ref[j], c);
    }
  }
  auto mean = [](const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
  };
  return f1(mean(best_hyp), mean(best_ref));
}

MetricReport evaluate_corpus(std::span<const TextPair> pairs,
                             EmbeddingProvider* provider) {
  if (pairs.empty()) throw UsageError("evaluate_corpus: no pairs");
  MetricReport report;
  report.n_pairs = pairs.size();

  std::vector<TokenSequence> hyps;
  hyps.reserve(pairs.size());
  double r1 = 0, rl = 0, b1 = 0, len = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto hyp = metric_tokens(pairs[i].hyp);
    const auto ref = metric_tokens(pairs[i].ref);
    if (ref.empty()) {
      throw DataError("pair " + std::to_string(i + 1) +
                      ": reference has no tokens");
    }
    r1 += rouge_1(hyp, ref);
    rl += rouge_l(hyp, ref);
    b1 += bleu_1(hyp, ref);
    len += static_cast<double>(hyp.size());
    hyps.push_back(std::move(hyp));
  }
  const auto n = static_cast<double>(pairs.size());
  report.rouge1_f = r1 / n;
  report.rougeL_f = rl / n;
  report.bleu1 = b1 / n;
  report.generation_length = len / n;
  report.distinct1 = distinct_n(hyps, 1);
  report.distinct2 = distinct_n(hyps, 2);

  if (provider != nullptr) {
    try {
      double sem = 0, greedy = 0;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        sem += cosine_similarity(provider->embed_sentence(pairs[i].hyp),
                                 provider->embed_sentence(pairs[i].ref));
        const auto ref = metric_tokens(pairs[i].ref);
        greedy += hyps[i].empty()
                      ? 0.0
                      : greedy_match_f1(provider->embed_tokens(hyps[i]),
                                        provider->embed_tokens(ref));
      }
      report.semantic_similarity = sem / n;
      report.greedy_match_f1 = greedy / n;
    } catch (const Error& e) {
      report.semantic_similarity.reset();
      report.greedy_match_f1.reset();
      report.warnings.push_back(
          std::string("embedding provider failed; embedding metrics "
                      "omitted: ") +
          e.what());
    }
  }
  return report;
}

std::string report_to_json(const MetricReport& report) {
  nlohmann::ordered_json obj;
  obj["rouge1_f"] = report.rouge1_f;
  obj["rougeL_f"] = report.rougeL_f;
  obj["bleu1"] = report.bleu1;
  obj["distinct1"] = report.distinct1;
  obj["distinct2"] = report.distinct2;
  obj["generation_length"] = report.generation_length;
  if (report.semantic_similarity) {
    obj["semantic_similarity"] = *report.semantic_similarity;
  }
  if (report.greedy_match_f1) obj["greedy_match_f1"] = *report.greedy_match_f1;
  obj["n_pairs"] = report.n_pairs;
  if (!report.warnings.empty()) obj["warnings"] = report.warnings;
  return obj.dump(2) + "\n";
}

std::string report_to_table(const MetricReport& report) {
  struct Column {
    const char* name;
    std::optional<double> value;
  };
  const Column columns[] = {
      {"Rouge-1", report.rouge1_f},
      {"Rouge-L", report.rougeL_f},
      {"Bleu-1", report.bleu1},
      {"Distinct-1", report.distinct1},
      {"Distinct-2", report.distinct2},
      {"Semantic similarity", report.semantic_similarity},
      {"Bert score F1", report.greedy_match_f1},
      {"Generation length", report.generation_length},
  };
  std::ostringstream head, row;
  for (const auto& c : columns) {
    const int width = std::max<int>(10, static_cast<int>(std::strlen(c.name)));
    head << std::left << std::setw(width) << c.name << "  ";
    std::ostringstream cell;
    if (c.value) {
      cell << std::fixed << std::setprecision(4) << *c.value;
    } else {
      cell << "—";
    }
    // The em dash is three bytes but one column wide.
    const int pad = c.value ? width : width + 2;
    row << std::left << std::setw(pad) << cell.str() << "  ";
  }
  auto trim = [](std::string s) {
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
  };
  return trim(head.str()) + "\n" + trim(row.str()) + "\n";
}

}  // namespace twohop
