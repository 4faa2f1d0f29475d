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

#include "twohop/merge.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <thread>
#include <unordered_set>

#include "json.hpp"
#include "twohop/words.hpp"

namespace twohop {
namespace {

using nlohmann::json;

struct Candidate {
  const QARecord* record;
  bool eligible_guest;  // bridge answer also passes its threshold
  std::vector<WordToken> question_words;
  std::vector<std::string> answer_words;
};

std::optional<CharSpan> find_span(const std::vector<WordToken>& hay,
                                  const std::vector<std::string>& needle) {
  if (needle.empty() || hay.size() < needle.size()) return std::nullopt;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    bool hit = true;
    for (std::size_t k = 0; k < needle.size() && hit; ++k) {
      hit = hay[i + k].normalized == needle[k];
    }
    if (hit) return CharSpan{hay[i].begin, hay[i + needle.size() - 1].end};
  }
  return std::nullopt;
}

// Merges for one episode group, in host-qid then guest-qid order.
std::vector<MergedQuestion> merge_group(std::vector<Candidate> group,
                                        const MergeConfig& cfg) {
  std::sort(group.begin(), group.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.record->qid < b.record->qid;
            });
  // Tokenize once per record rather than once per pair.
  for (auto& c : group) {
    c.question_words =
        locate_words(c.record->question, cfg.case_insensitive_match);
    if (c.eligible_guest) {
      c.answer_words =
          normalize_words(c.record->answer, cfg.case_insensitive_match);
    }
  }
  std::vector<MergedQuestion> out;
  for (const auto& host : group) {
    for (const auto& guest : group) {
      if (!guest.eligible_guest || host.record == guest.record) continue;
      if (!is_match(*host.record, *guest.record)) continue;
      auto span = find_span(host.question_words, guest.answer_words);
      if (!span) continue;
      out.push_back(merge_pair(*host.record, *guest.record, *span, cfg));
    }
  }
  return out;
}

}  // namespace

void MergeConfig::validate() const {
  if (max_question_words < 1) {
    throw UsageError("max_question_words must be >= 1");
  }
  if (max_bridge_answer_words < 1) {
    throw UsageError("max_bridge_answer_words must be >= 1");
  }
  if (connector_prefix.empty() || connector_suffix.empty()) {
    throw UsageError("connector strings must be non-empty");
  }
}

std::string MergedQuestion::id() const { return host_qid + "+" + guest_qid; }

bool passes_length_filter(std::string_view question, std::string_view answer,
                          const MergeConfig& cfg) {
  return word_count(question) <=
             static_cast<std::size_t>(std::max(cfg.max_question_words, 0)) &&
         word_count(answer) <=
             static_cast<std::size_t>(std::max(cfg.max_bridge_answer_words, 0));
}

bool is_match(const QARecord& a, const QARecord& b) {
  return a.episode_key() == b.episode_key() && a.segment != b.segment;
}

std::optional<CharSpan> detect_overlap(std::string_view host_question,
                                       std::string_view bridge_answer,
                                       const MergeConfig& cfg) {
  return find_span(locate_words(host_question, cfg.case_insensitive_match),
                   normalize_words(bridge_answer, cfg.case_insensitive_match));
}

MergedQuestion merge_pair(const QARecord& host, const QARecord& guest,
                          const CharSpan& span, const MergeConfig& cfg) {
  if (!is_match(host, guest)) {
    throw ContractViolation("merge_pair: records " + host.qid + " and " +
                            guest.qid +
                            " are not in the same episode with distinct "
                            "segments");
  }
  const std::string& text = host.question;
  if (span.begin >= span.end || span.end > text.size()) {
    throw ContractViolation("merge_pair: span out of range");
  }
  const auto words = locate_words(text, false);
  const bool starts = std::any_of(words.begin(), words.end(), [&](auto& w) {
    return w.begin == span.begin;
  });
  const bool ends = std::any_of(words.begin(), words.end(), [&](auto& w) {
    return w.end == span.end;
  });
  if (!starts || !ends) {
    throw ContractViolation("merge_pair: span [" + std::to_string(span.begin) +
                            ", " + std::to_string(span.end) +
                            ") is not on word boundaries of \"" + text + "\"");
  }

  MergedQuestion m;
  m.text.reserve(text.size() + guest.question.size() +
                 cfg.connector_prefix.size() + cfg.connector_suffix.size());
  m.text.append(text, 0, span.begin);
  m.text += cfg.connector_prefix;
  m.text += guest.question;
  m.text += cfg.connector_suffix;
  m.text.append(text, span.end);
  m.host_qid = host.qid;
  m.guest_qid = guest.qid;
  m.bridge_answer = guest.answer;
  m.bridge_span = span;
  m.answer = host.answer;
  m.episode_key = host.episode_key();
  m.segments = {host.segment, guest.segment};
  m.hops = 2;
  return m;
}

std::vector<MergedQuestion> generate_dataset(const Corpus& corpus,
                                             const MergeConfig& cfg,
                                             const GenerateOptions& opts) {
  cfg.validate();
  const auto& records = corpus.records();
  const auto max_q = static_cast<std::size_t>(cfg.max_question_words);
  const auto max_a = static_cast<std::size_t>(cfg.max_bridge_answer_words);

  std::vector<std::vector<Candidate>> groups;
  groups.reserve(corpus.episode_index().size());
  for (const auto& [key, ids] : corpus.episode_index()) {
    std::vector<Candidate> group;
    for (std::size_t id : ids) {
      const QARecord& r = records[id];
      if (word_count(r.question) > max_q) continue;
      group.push_back({&r, word_count(r.answer) <= max_a, {}, {}});
    }
    groups.push_back(std::move(group));
  }

  std::vector<std::vector<MergedQuestion>> results(groups.size());
  const unsigned threads =
      std::max(1u, std::min<unsigned>(opts.threads,
                                      static_cast<unsigned>(groups.size())));
  if (threads <= 1) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      results[g] = merge_group(std::move(groups[g]), cfg);
    }
  } else {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        for (std::size_t g = t; g < groups.size(); g += threads) {
          results[g] = merge_group(std::move(groups[g]), cfg);
        }
      });
    }
  }

  std::vector<MergedQuestion> out;
  std::unordered_set<std::string> seen;
  for (auto& group : results) {
    for (auto& m : group) {
      if (seen.insert(normalized_text(m.text)).second) {
        out.push_back(std::move(m));
      }
    }
  }
  return out;
}

std::string to_json_line(const MergedQuestion& q) {
  json obj = json::object();
  obj["text"] = q.text;
  obj["host_qid"] = q.host_qid;
  obj["guest_qid"] = q.guest_qid;
  obj["bridge_answer"] = q.bridge_answer;
  obj["bridge_span"] = {q.bridge_span.begin, q.bridge_span.end};
  obj["answer"] = q.answer;
  obj["show"] = q.episode_key.show;
  obj["season"] = q.episode_key.season;
  obj["episode"] = q.episode_key.episode;
  obj["segs"] = {q.segments[0], q.segments[1]};
  obj["hops"] = q.hops;
  return obj.dump();
}

MergedQuestion merged_from_json_line(std::string_view line) {
  try {
    const json obj = json::parse(line);
    MergedQuestion q;
    q.text = obj.at("text").get<std::string>();
    q.host_qid = obj.at("host_qid").get<std::string>();
    q.guest_qid = obj.at("guest_qid").get<std::string>();
    q.bridge_answer = obj.at("bridge_answer").get<std::string>();
    const auto& span = obj.at("bridge_span");
    if (!span.is_array() || span.size() != 2) {
      throw DataError("bridge_span must be [start, end]");
    }
    q.bridge_span = {span[0].get<std::size_t>(), span[1].get<std::size_t>()};
    q.answer = obj.at("answer").get<std::string>();
    q.episode_key.show = obj.at("show").get<std::string>();
    q.episode_key.season = obj.at("season").get<int>();
    q.episode_key.episode = obj.at("episode").get<int>();
    const auto& segs = obj.at("segs");
    if (!segs.is_array() || segs.size() != 2) {
      throw DataError("segs must hold two segment ids");
    }
    q.segments = {segs[0].get<std::string>(), segs[1].get<std::string>()};
    q.hops = obj.at("hops").get<int>();
    return q;
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid merged question: ") + e.what());
  }
}

void write_merged(std::ostream& out, const std::vector<MergedQuestion>& qs) {
  for (const auto& q : qs) out << to_json_line(q) << '\n';
}

std::vector<MergedQuestion> read_merged(std::istream& in) {
  std::vector<MergedQuestion> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(merged_from_json_line(line));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<MergedQuestion> load_merged(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read dataset file " + path.string());
  return read_merged(in);
}

}  // namespace twohop
