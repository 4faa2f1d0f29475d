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

// Brute-force reference implementations used only by tests. Nothing here
// calls into the code paths these functions check.

#ifndef TWOHOP_TESTS_SUPPORT_ORACLES_HPP_
#define TWOHOP_TESTS_SUPPORT_ORACLES_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "twohop/corpus.hpp"

namespace twohop::oracle {

inline const std::string& punctuation() {
  static const std::string p = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
  return p;
}

struct Word {
  std::string text;
  std::size_t begin;
  std::size_t end;
};

// Regex-driven tokenizer: \S+ runs, punctuation trimmed with find_first_of.
inline std::vector<Word> words(const std::string& s, bool lower = true) {
  std::vector<Word> out;
  static const std::regex token(R"(\S+)");
  for (auto it = std::sregex_iterator(s.begin(), s.end(), token);
       it != std::sregex_iterator(); ++it) {
    const std::string tok = it->str();
    const auto first = tok.find_first_not_of(punctuation());
    if (first == std::string::npos) continue;
    const auto last = tok.find_last_not_of(punctuation());
    std::string core = tok.substr(first, last - first + 1);
    if (lower) {
      std::transform(core.begin(), core.end(), core.begin(),
                     [](unsigned char c) { return std::tolower(c); });
    }
    const auto base = static_cast<std::size_t>(it->position());
    out.push_back({core, base + first, base + last + 1});
  }
  return out;
}

inline std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  for (auto& w : words(s)) out.push_back(w.text);
  return out;
}

inline std::string joined(const std::string& s) {
  std::string out;
  for (auto& t : tokens(s)) out += (out.empty() ? "" : " ") + t;
  return out;
}

// Index of the first word offset where `needle` matches, by scanning every
// offset.
inline std::optional<std::size_t> first_match(
    const std::vector<Word>& hay, const std::vector<std::string>& needle) {
  if (needle.empty()) return std::nullopt;
  for (std::size_t i = 0; i < hay.size(); ++i) {
    if (i + needle.size() > hay.size()) break;
    std::size_t k = 0;
    while (k < needle.size() && hay[i + k].text == needle[k]) ++k;
    if (k == needle.size()) return i;
  }
  return std::nullopt;
}

struct Merge {
  EpisodeKey episode;
  std::string host;
  std::string guest;
  std::string text;

  bool operator<(const Merge& o) const {
    return std::tie(episode, host, guest) < std::tie(o.episode, o.host, o.guest);
  }
};

// Replays the filter / Match / Overlap / merge formulas over every ordered
// pair of records, then orders and deduplicates.
inline std::vector<Merge> enumerate_merges(const std::vector<QARecord>& records,
                                           std::size_t max_q, std::size_t max_a,
                                           const std::string& prefix,
                                           const std::string& suffix) {
  std::vector<Merge> all;
  for (const auto& host : records) {
    for (const auto& guest : records) {
      if (&host == &guest) continue;
      const bool match = host.show == guest.show &&
                         host.season == guest.season &&
                         host.episode == guest.episode &&
                         host.segment != guest.segment;
      if (!match) continue;
      if (tokens(host.question).size() > max_q) continue;
      if (tokens(guest.question).size() > max_q) continue;
      if (tokens(guest.answer).size() > max_a) continue;
      const auto hay = words(host.question);
      const auto needle = tokens(guest.answer);
      const auto at = first_match(hay, needle);
      if (!at) continue;
      const std::size_t b = hay[*at].begin;
      const std::size_t e = hay[*at + needle.size() - 1].end;
      std::string text = host.question.substr(0, b) + prefix + guest.question +
                         suffix + host.question.substr(e);
      all.push_back({{host.show, host.season, host.episode},
                     host.qid,
                     guest.qid,
                     text});
    }
  }
  std::sort(all.begin(), all.end());
  std::vector<Merge> out;
  std::set<std::string> seen;
  for (auto& m : all) {
    if (seen.insert(joined(m.text)).second) out.push_back(m);
  }
  return out;
}

// Clipped overlap by counting every distinct word with std::count.
inline std::size_t clipped_overlap(const std::vector<std::string>& hyp,
                                   const std::vector<std::string>& ref) {
  std::set<std::string> vocab(hyp.begin(), hyp.end());
  std::size_t total = 0;
  for (const auto& w : vocab) {
    const auto h = std::count(hyp.begin(), hyp.end(), w);
    const auto r = std::count(ref.begin(), ref.end(), w);
    total += static_cast<std::size_t>(std::min(h, r));
  }
  return total;
}

inline double f1(double p, double r) {
  return p + r == 0 ? 0 : 2 * p * r / (p + r);
}

inline double rouge_1(const std::vector<std::string>& hyp,
                      const std::vector<std::string>& ref) {
  if (hyp.empty()) return 0;
  const double o = static_cast<double>(clipped_overlap(hyp, ref));
  return f1(o / static_cast<double>(hyp.size()),
            o / static_cast<double>(ref.size()));
}

inline bool is_subsequence(const std::vector<std::string>& sub,
                           const std::vector<std::string>& seq) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < seq.size() && j < sub.size(); ++i) {
    if (seq[i] == sub[j]) ++j;
  }
  return j == sub.size();
}

// Enumerates every subsequence of `a` (|a| <= 20).
inline std::size_t lcs_exhaustive(const std::vector<std::string>& a,
                                  const std::vector<std::string>& b) {
  std::size_t best = 0;
  const std::size_t n = a.size();
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    std::vector<std::string> sub;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1ul << i)) sub.push_back(a[i]);
    }
    if (sub.size() > best && is_subsequence(sub, b)) best = sub.size();
  }
  return best;
}

inline double rouge_l(const std::vector<std::string>& hyp,
                      const std::vector<std::string>& ref) {
  if (hyp.empty()) return 0;
  const double l = static_cast<double>(lcs_exhaustive(hyp, ref));
  return f1(l / static_cast<double>(hyp.size()),
            l / static_cast<double>(ref.size()));
}

inline double bleu_1(const std::vector<std::string>& hyp,
                     const std::vector<std::string>& ref) {
  if (hyp.empty()) return 0;
  const double h = static_cast<double>(hyp.size());
  const double r = static_cast<double>(ref.size());
  const double p = static_cast<double>(clipped_overlap(hyp, ref)) / h;
  return p * std::min(1.0, std::exp(1.0 - r / h));
}

inline double distinct_n(const std::vector<std::vector<std::string>>& corpus,
                         std::size_t n) {
  std::vector<std::vector<std::string>> seen;
  std::size_t total = 0;
  for (const auto& seq : corpus) {
    for (std::size_t i = 0; i + n <= seq.size(); ++i) {
      std::vector<std::string> gram(seq.begin() + i, seq.begin() + i + n);
      ++total;
      if (std::find(seen.begin(), seen.end(), gram) == seen.end()) {
        seen.push_back(gram);
      }
    }
  }
  return static_cast<double>(seen.size()) / static_cast<double>(total);
}

// Kappa from an explicit contingency table in floating point.
inline double kappa(const std::vector<int>& a, const std::vector<int>& b) {
  std::set<int> cats(a.begin(), a.end());
  cats.insert(b.begin(), b.end());
  std::map<std::pair<int, int>, double> table;
  for (std::size_t i = 0; i < a.size(); ++i) table[{a[i], b[i]}] += 1;
  const double n = static_cast<double>(a.size());
  double po = 0, pe = 0;
  for (int c : cats) {
    po += table[{c, c}] / n;
    double row = 0, col = 0;
    for (int d : cats) {
      row += table[{c, d}];
      col += table[{d, c}];
    }
    pe += (row / n) * (col / n);
  }
  if (pe == 1) return 1;
  return (po - pe) / (1 - pe);
}

}  // namespace twohop::oracle

#endif  // TWOHOP_TESTS_SUPPORT_ORACLES_HPP_
