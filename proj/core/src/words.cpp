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

#include "twohop/words.hpp"

#include <cctype>

namespace twohop {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }

// ASCII only; UTF-8 continuation bytes are never treated as punctuation.
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)); }

}  // namespace

std::vector<WordToken> locate_words(std::string_view text,
                                    bool case_insensitive) {
  std::vector<WordToken> words;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && is_space(text[i])) ++i;
    std::size_t tok_begin = i;
    while (i < n && !is_space(text[i])) ++i;
    std::size_t tok_end = i;
    while (tok_begin < tok_end && is_punct(text[tok_begin])) ++tok_begin;
    while (tok_end > tok_begin && is_punct(text[tok_end - 1])) --tok_end;
    if (tok_begin == tok_end) continue;
    WordToken w;
    w.begin = tok_begin;
    w.end = tok_end;
    w.normalized.assign(text.substr(tok_begin, tok_end - tok_begin));
    if (case_insensitive) {
      for (char& c : w.normalized) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    words.push_back(std::move(w));
  }
  return words;
}

std::vector<std::string> normalize_words(std::string_view text,
                                         bool case_insensitive) {
  std::vector<std::string> out;
  for (auto& w : locate_words(text, case_insensitive)) {
    out.push_back(std::move(w.normalized));
  }
  return out;
}

std::size_t word_count(std::string_view text) {
  return locate_words(text, false).size();
}

std::string normalized_text(std::string_view text, bool case_insensitive) {
  std::string out;
  for (const auto& w : locate_words(text, case_insensitive)) {
    if (!out.empty()) out.push_back(' ');
    out += w.normalized;
  }
  return out;
}

}  // namespace twohop
