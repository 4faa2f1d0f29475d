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

#include <gtest/gtest.h>

#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace twohop {
namespace {

using Words = std::vector<std::string>;

TEST(NormalizeWords, StripsPunctuationAndLowercases) {
  EXPECT_EQ(normalize_words("Who was Ross?"), (Words{"who", "was", "ross"}));
}

TEST(NormalizeWords, EmptyText) {
  EXPECT_TRUE(normalize_words("").empty());
  EXPECT_TRUE(normalize_words("  \t ").empty());
}

TEST(NormalizeWords, KeepsInnerApostrophe) {
  EXPECT_EQ(normalize_words("Chandler's wife"),
            (Words{"chandler's", "wife"}));
}

TEST(NormalizeWords, DropsPunctuationOnlyTokens) {
  EXPECT_EQ(normalize_words("when , the person"),
            (Words{"when", "the", "person"}));
  EXPECT_EQ(normalize_words("time?, went"), (Words{"time", "went"}));
}

TEST(NormalizeWords, CaseSensitiveModeKeepsCase) {
  EXPECT_EQ(normalize_words("Ross, Joey!", false), (Words{"Ross", "Joey"}));
}

TEST(NormalizeWords, MatchesReferenceSplitOnFixture) {
  gen::Generator g(7);
  for (int i = 0; i < 50; ++i) {
    const std::string s = i % 2 ? g.question() : g.answer();
    EXPECT_EQ(normalize_words(s), oracle::tokens(s)) << s;
  }
}

TEST(LocateWords, OffsetsCoverTheCore) {
  const std::string text = "(Ross) went, inside?";
  const auto words = locate_words(text);
  ASSERT_EQ(words.size(), 3u);
  EXPECT_EQ(text.substr(words[0].begin, words[0].end - words[0].begin), "Ross");
  EXPECT_EQ(text.substr(words[1].begin, words[1].end - words[1].begin), "went");
  EXPECT_EQ(text.substr(words[2].begin, words[2].end - words[2].begin),
            "inside");
}

TEST(WordCount, CountsNormalizedWords) {
  EXPECT_EQ(word_count("Who was Joey talking with when Ross went inside?"), 9u);
  EXPECT_EQ(word_count("A pen."), 2u);
  EXPECT_EQ(word_count(" - "), 0u);
}

}  // namespace
}  // namespace twohop
