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

#include "twohop/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "twohop/log.hpp"
#include "twohop/random.hpp"

namespace twohop {
namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "qid", "q", "a", "show", "season", "episode", "seg",
      "clip", "ts_start", "ts_end"};
  return keys;
}

std::string require_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw DataError(std::string("missing required key \"") + key + "\"");
  }
  if (!it->is_string()) {
    throw DataError(std::string("key \"") + key + "\" must be a string");
  }
  return it->get<std::string>();
}

int require_positive_int(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw DataError(std::string("missing required key \"") + key + "\"");
  }
  if (!it->is_number_integer()) {
    throw DataError(std::string("key \"") + key + "\" must be an integer");
  }
  const auto v = it->get<long long>();
  if (v < 1 || v > INT32_MAX) {
    throw DataError(std::string("key \"") + key + "\" must be positive");
  }
  return static_cast<int>(v);
}

std::optional<double> optional_number(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    throw DataError(std::string("key \"") + key + "\" must be a number");
  }
  return it->get<double>();
}

QARecord record_from_json(const json& obj, std::set<std::string>& unknown) {
  if (!obj.is_object()) throw DataError("line is not a JSON object");
  QARecord r;
  r.qid = require_string(obj, "qid");
  r.question = require_string(obj, "q");
  r.answer = require_string(obj, "a");
  r.show = require_string(obj, "show");
  r.season = require_positive_int(obj, "season");
  r.episode = require_positive_int(obj, "episode");
  r.segment = require_string(obj, "seg");
  if (auto it = obj.find("clip"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw DataError("key \"clip\" must be a string");
    r.clip = it->get<std::string>();
  }
  r.ts_start = optional_number(obj, "ts_start");
  r.ts_end = optional_number(obj, "ts_end");
  for (const auto& item : obj.items()) {
    if (!known_keys().contains(item.key())) unknown.insert(item.key());
  }
  return r;
}

json record_to_json(const QARecord& r) {
  json obj = json::object();
  obj["qid"] = r.qid;
  obj["q"] = r.question;
  obj["a"] = r.answer;
  obj["show"] = r.show;
  obj["season"] = r.season;
  obj["episode"] = r.episode;
  obj["seg"] = r.segment;
  if (r.clip) obj["clip"] = *r.clip;
  if (r.ts_start) obj["ts_start"] = *r.ts_start;
  if (r.ts_end) obj["ts_end"] = *r.ts_end;
  return obj;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

}  // namespace

std::string EpisodeKey::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_s%02de%02d", season, episode);
  return show + buf;
}

CorpusParseError::CorpusParseError(std::size_t line, const std::string& what)
    : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

DuplicateQidError::DuplicateQidError(std::string qid, std::size_t first_line,
                                     std::size_t second_line)
    : DataError("duplicate qid \"" + qid + "\" on lines " +
                std::to_string(first_line) + " and " +
                std::to_string(second_line)),
      qid_(std::move(qid)),
      first_line_(first_line),
      second_line_(second_line) {}

void validate_record(const QARecord& r) {
  if (r.qid.empty()) throw DataError("qid must be non-empty");
  if (r.question.empty()) throw DataError("question text must be non-empty");
  if (r.question.back() != '?') {
    throw DataError("question text must end with '?': \"" + r.question + "\"");
  }
  if (r.answer.empty()) throw DataError("answer text must be non-empty");
  if (r.show.empty()) throw DataError("show must be non-empty");
  if (r.season < 1) throw DataError("season must be positive");
  if (r.episode < 1) throw DataError("episode must be positive");
  if (r.segment.empty()) throw DataError("segment must be non-empty");
}

Corpus::Corpus(std::vector<QARecord> records) : records_(std::move(records)) {
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    validate_record(records_[i]);
    auto [it, inserted] = seen.emplace(records_[i].qid, i);
    if (!inserted) {
      throw DuplicateQidError(records_[i].qid, it->second + 1, i + 1);
    }
    index_[records_[i].episode_key()].push_back(i);
  }
}

Corpus parse_corpus(std::istream& in) {
  std::vector<QARecord> records;
  std::unordered_map<std::string, std::size_t> first_line_of;
  std::set<std::string> unknown;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    QARecord r;
    try {
      r = record_from_json(json::parse(line), unknown);
      validate_record(r);
    } catch (const json::exception& e) {
      throw CorpusParseError(line_no, std::string("invalid JSON: ") + e.what());
    } catch (const DataError& e) {
      throw CorpusParseError(line_no, e.what());
    }
    auto [it, inserted] = first_line_of.emplace(r.qid, line_no);
    if (!inserted) throw DuplicateQidError(r.qid, it->second, line_no);
    records.push_back(std::move(r));
  }
  if (!unknown.empty()) {
    std::string keys;
    for (const auto& k : unknown) keys += (keys.empty() ? "" : ", ") + k;
    warn("ignoring unknown corpus keys: " + keys);
  }
  return Corpus(std::move(records));
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read corpus file " + path.string());
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, const std::vector<QARecord>& records) {
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

void write_corpus(const std::filesystem::path& path,
                  const std::vector<QARecord>& records) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_corpus(out, records);
}

const char* split_name(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
  }
  return "?";
}

std::array<std::size_t, 3> SplitAssignment::question_counts(
    const Corpus& corpus) const {
  std::array<std::size_t, 3> counts{};
  for (const auto& [key, ids] : corpus.episode_index()) {
    auto it = by_episode.find(key);
    if (it != by_episode.end()) {
      counts[static_cast<std::size_t>(it->second)] += ids.size();
    }
  }
  return counts;
}

std::vector<QARecord> SplitAssignment::records_in(const Corpus& corpus,
                                                  Split split) const {
  std::vector<QARecord> out;
  for (const auto& r : corpus.records()) {
    auto it = by_episode.find(r.episode_key());
    if (it != by_episode.end() && it->second == split) out.push_back(r);
  }
  return out;
}

SplitAssignment make_splits(const Corpus& corpus, const SplitRatios& ratios,
                            std::uint64_t seed) {
  const auto r = ratios.as_array();
  for (double x : r) {
    if (!(x >= 0)) throw UsageError("split ratios must be non-negative");
  }
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) {
    throw UsageError("split ratios must sum to 1");
  }

  SplitAssignment out;
  out.seed = seed;
  const auto& index = corpus.episode_index();
  if (index.empty()) return out;

  struct Episode {
    const EpisodeKey* key;
    std::size_t size;
  };
  std::vector<Episode> episodes;
  episodes.reserve(index.size());
  for (const auto& [key, ids] : index) episodes.push_back({&key, ids.size()});
  SeededRng rng(seed);
  rng.shuffle(std::span<Episode>(episodes));

  const auto total = static_cast<double>(corpus.size());
  std::array<double, 3> deficit{};
  for (std::size_t k = 0; k < 3; ++k) deficit[k] = r[k] * total;
  for (const auto& ep : episodes) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 3; ++k) {
      if (deficit[k] > deficit[best]) best = k;
    }
    deficit[best] -= static_cast<double>(ep.size);
    out.by_episode.emplace(*ep.key, static_cast<Split>(best));
  }

  const auto nonzero = std::count_if(r.begin(), r.end(),
                                     [](double x) { return x > 0; });
  if (static_cast<std::ptrdiff_t>(episodes.size()) < nonzero) {
    warn("only " + std::to_string(episodes.size()) + " episode(s) for " +
         std::to_string(nonzero) + " non-empty splits; ratios cannot be met");
  }
  return out;
}

}  // namespace twohop
