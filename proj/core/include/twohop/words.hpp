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

#ifndef TWOHOP_WORDS_HPP_
#define TWOHOP_WORDS_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace twohop {

// A word located in some original text. [begin, end) covers the word's
// core: the whitespace-delimited token with leading and trailing ASCII
// punctuation removed.
struct WordToken {
  std::string normalized;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Splits on whitespace, strips leading/trailing ASCII punctuation from each
// token and drops tokens that become empty. Lowercases ASCII letters when
// `case_insensitive` is set. Shared by the merge engine and the metrics.
std::vector<std::string> normalize_words(std::string_view text,
                                         bool case_insensitive = true);

// Same segmentation as normalize_words, keeping character offsets.
std::vector<WordToken> locate_words(std::string_view text,
                                    bool case_insensitive = true);

// Number of words normalize_words would return.
std::size_t word_count(std::string_view text);

// normalize_words joined with single spaces.
std::string normalized_text(std::string_view text,
                            bool case_insensitive = true);

}  // namespace twohop

#endif  // TWOHOP_WORDS_HPP_
