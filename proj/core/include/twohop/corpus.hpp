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

#ifndef TWOHOP_CORPUS_HPP_
#define TWOHOP_CORPUS_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twohop/error.hpp"

namespace twohop {

// Composite episode identity. Records with equal keys belong to the same
// episode for matching and splitting purposes.
struct EpisodeKey {
  std::string show;
  int season = 0;
  int episode = 0;

  auto operator<=>(const EpisodeKey&) const = default;
  bool operator==(const EpisodeKey&) const = default;

  // "friends_s02e01"
  std::string to_string() const;
};

// One zero-hop question/answer pair with its video metadata.
struct QARecord {
  std::string qid;
  std::string question;
  std::string answer;
  std::string show;
  int season = 0;
  int episode = 0;
  std::string segment;
  std::optional<std::string> clip;
  std::optional<double> ts_start;
  std::optional<double> ts_end;

  EpisodeKey episode_key() const { return {show, season, episode}; }

  bool operator==(const QARecord&) const = default;
};

// Thrown by the loader; `line()` is 1-based.
class CorpusParseError : public DataError {
 public:
  CorpusParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateQidError : public DataError {
 public:
  DuplicateQidError(std::string qid, std::size_t first_line,
                    std::size_t second_line);
  const std::string& qid() const { return qid_; }
  std::size_t first_line() const { return first_line_; }
  std::size_t second_line() const { return second_line_; }

 private:
  std::string qid_;
  std::size_t first_line_;
  std::size_t second_line_;
};

// Immutable, validated record collection indexed by episode.
class Corpus {
 public:
  using EpisodeIndex = std::map<EpisodeKey, std::vector<std::size_t>>;

  Corpus() = default;
  // Validates record invariants and qid uniqueness; throws DataError.
  explicit Corpus(std::vector<QARecord> records);

  const std::vector<QARecord>& records() const { return records_; }
  // Positions into records(), in file order within each episode.
  const EpisodeIndex& episode_index() const { return index_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

 private:
  std::vector<QARecord> records_;
  EpisodeIndex index_;
};

// Throws CorpusParseError for malformed or invalid lines. Blank lines are
// skipped. Unknown keys produce one warning per load.
Corpus parse_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);

void write_corpus(std::ostream& out, const std::vector<QARecord>& records);
void write_corpus(const std::filesystem::path& path,
                  const std::vector<QARecord>& records);

// Throws UsageError/DataError; used by the loader and by Corpus.
void validate_record(const QARecord& record);

enum class Split : std::uint8_t { kTrain = 0, kValidation = 1, kTest = 2 };

const char* split_name(Split split);

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;

  std::array<double, 3> as_array() const { return {train, validation, test}; }
};

struct SplitAssignment {
  std::map<EpisodeKey, Split> by_episode;
  std::uint64_t seed = 0;

  // Question counts per split, indexed by Split.
  std::array<std::size_t, 3> question_counts(const Corpus& corpus) const;
  std::vector<QARecord> records_in(const Corpus& corpus, Split split) const;
};

// Assigns whole episodes to splits. Episode keys are shuffled with `seed`,
// then each episode goes to the split furthest below its question-count
// target (ties to the earlier split). Throws UsageError on invalid ratios.
SplitAssignment make_splits(const Corpus& corpus, const SplitRatios& ratios,
                            std::uint64_t seed);

}  // namespace twohop

#endif  // TWOHOP_CORPUS_HPP_
