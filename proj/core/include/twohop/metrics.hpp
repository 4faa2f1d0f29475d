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

#ifndef TWOHOP_METRICS_HPP_
#define TWOHOP_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace twohop {

using TokenSequence = std::vector<std::string>;
using Vector = std::vector<double>;

// Lowercased, punctuation-stripped whitespace tokens (see normalize_words).
TokenSequence metric_tokens(std::string_view text);

// All n-gram scorers take (hypothesis, reference) and throw UsageError on
// an empty reference.

// Unigram F1 with counts clipped by multiplicity.
double rouge_1(const TokenSequence& hyp, const TokenSequence& ref);

// F1 over the longest common subsequence.
double rouge_l(const TokenSequence& hyp, const TokenSequence& ref);

// Length of the longest common subsequence.
std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b);

// Clipped unigram matches: sum over words of min(count_hyp, count_ref).
std::size_t clipped_unigram_overlap(const TokenSequence& hyp,
                                    const TokenSequence& ref);

// Clipped unigram precision times min(1, exp(1 - |ref|/|hyp|)); no smoothing.
double bleu_1(const TokenSequence& hyp, const TokenSequence& ref);

// Distinct n-grams over total n-grams, pooled across the corpus. n is 1 or
// 2. Throws DataError when the corpus holds no n-gram.
double distinct_n(std::span<const TokenSequence> corpus, int n);

// u.v / (|u||v|). Throws UsageError on zero vectors or mismatched sizes.
double cosine_similarity(const Vector& u, const Vector& v);

// Greedy max-cosine matching between token embeddings: recall averages
// each reference token's best match, precision each hypothesis token's.
double greedy_match_f1(const std::vector<Vector>& hyp_vecs,
                       const std::vector<Vector>& ref_vecs);

// Source of sentence and token embeddings. Implementations may throw any
// twohop::Error; evaluate_corpus then drops the embedding columns.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual Vector embed_sentence(const std::string& text) = 0;
  virtual std::vector<Vector> embed_tokens(const TokenSequence& tokens) = 0;
};

struct MetricReport {
  double rouge1_f = 0;
  double rougeL_f = 0;
  double bleu1 = 0;
  double distinct1 = 0;
  double distinct2 = 0;
  double generation_length = 0;
  std::optional<double> semantic_similarity;
  std::optional<double> greedy_match_f1;
  std::size_t n_pairs = 0;
  std::vector<std::string> warnings;
};

struct TextPair {
  std::string hyp;
  std::string ref;
};

// Per-pair ROUGE/BLEU/embedding scores averaged over pairs; distinct-n is
// pooled over all hypotheses. Throws UsageError on an empty pair list.
MetricReport evaluate_corpus(std::span<const TextPair> pairs,
                             EmbeddingProvider* provider = nullptr);

std::string report_to_json(const MetricReport& report);
// Fixed-width table with four decimals; absent optional columns print "—".
std::string report_to_table(const MetricReport& report);

}  // namespace twohop

#endif  // TWOHOP_METRICS_HPP_
