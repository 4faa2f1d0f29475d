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

#ifndef TWOHOP_MERGE_HPP_
#define TWOHOP_MERGE_HPP_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twohop/corpus.hpp"

namespace twohop {

struct MergeConfig {
  int max_question_words = 15;
  int max_bridge_answer_words = 3;
  std::string connector_prefix = ", the person ";
  std::string connector_suffix = ",";
  bool case_insensitive_match = true;

  // Thresholds >= 1 and non-empty connectors; throws UsageError.
  void validate() const;
};

// Character offsets [begin, end) into a host question.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const CharSpan&) const = default;
};

struct MergedQuestion {
  std::string text;
  std::string host_qid;
  std::string guest_qid;
  std::string bridge_answer;
  CharSpan bridge_span;
  std::string answer;  // the host record's answer
  EpisodeKey episode_key;
  std::array<std::string, 2> segments;  // host, guest
  int hops = 2;

  // Stable question identifier: "<host_qid>+<guest_qid>".
  std::string id() const;

  bool operator==(const MergedQuestion&) const = default;
};

// Word-count filter: the question against max_question_words and the
// answer against max_bridge_answer_words.
bool passes_length_filter(std::string_view question, std::string_view answer,
                          const MergeConfig& cfg);

// Same episode, different segment.
bool is_match(const QARecord& a, const QARecord& b);

// First whole-word occurrence of `bridge_answer` in `host_question`,
// compared on normalized words and reported in original characters.
std::optional<CharSpan> detect_overlap(std::string_view host_question,
                                       std::string_view bridge_answer,
                                       const MergeConfig& cfg);

// Splices the guest question into the host in place of `span`. Throws
// ContractViolation when the records do not match or the span does not
// start and end on word boundaries of the host question.
MergedQuestion merge_pair(const QARecord& host, const QARecord& guest,
                          const CharSpan& span, const MergeConfig& cfg);

struct GenerateOptions {
  // Episode groups are processed on up to this many threads. Output does
  // not depend on the value.
  unsigned threads = 1;
};

// Two-hop generation over every ordered (host, guest) pair inside each
// episode group. Output is ordered by episode key, host qid, guest qid and
// deduplicated on normalized merged text (first occurrence kept).
std::vector<MergedQuestion> generate_dataset(const Corpus& corpus,
                                             const MergeConfig& cfg,
                                             const GenerateOptions& opts = {});

// JSONL serialization of merged questions.
std::string to_json_line(const MergedQuestion& q);
MergedQuestion merged_from_json_line(std::string_view line);
void write_merged(std::ostream& out, const std::vector<MergedQuestion>& qs);
std::vector<MergedQuestion> read_merged(std::istream& in);
std::vector<MergedQuestion> load_merged(const std::filesystem::path& path);

}  // namespace twohop

#endif  // TWOHOP_MERGE_HPP_
