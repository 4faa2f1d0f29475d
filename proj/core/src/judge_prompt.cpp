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

#include <string>
#include <string_view>

#include "twohop/error.hpp"
#include "twohop/judge.hpp"

namespace twohop {
namespace {

// Evaluator prompt, version v1. Any edit to this text must bump
// kJudgePromptVersion.
constexpr std::string_view kTemplateV1 =
    R"(You are an evaluator. Your task is to assess a generated question based on the context and the following criteria:

Fluency: Evaluates the grammatical correctness and naturalness of the generated question.
     0: Poor (Grammatical errors and awkward phrasing). Example: "What doing is Chandler wife cooking?"
     1: Fair (Some grammatical errors, but understandable). Example: "What Chandler wife cooking?"
     2: Good (Grammatically correct). Example: "What is the wife of Chandler cooking?"
     3: Excellent (Fluent and natural language with no errors). Example: "What is Chandler's wife cooking?"

Relevance: Assesses the extent to which the generated question pertains to the content of the provided video clips.
     0: Irrelevant (Does not relate to the video). Example: "What is the capital of France?"
     1: Slightly relevant (Partially relates to the video). Example: "Are there any people in the video?"
     2: Mostly relevant (Mostly relates to the Videos). Example: "Are there people dancing in these videos?"
     3: Highly relevant (Directly relates to the images). Example: "What is the connection between the people dancing in these Videos?"

Multi-Hop Reasoning: Evaluates the complexity of reasoning required to answer the generated question based on the provided video clips.
     0: Single-hop (Only needs one Video for the answer). Example: "Is Monica dancing in the first video?"
     1: Simple multi-hop (Requires basic information from both videos). Example: "Are People dancing in both Videos?"
     2: Intermediate multi-hop (Requires more complex connections between images). Example: "Are the same people dancing in both videos?"
     3: Advanced multi-hop (Involves detailed reasoning using both images). Example: "what is the relation between the common people dancing in both videos?"

Engagingness: Evaluates how interesting and captivating the generated question is to a human observer.
     0: Not engaging (Boring or uninteresting). Example: "Are there hats in the videos?"
     1: Slightly engaging (Mildly interesting). Example: "What colours are the hats in the videos?"
     2: Moderately engaging (Interesting and engaging). Example: "How do the styles of hats in the videos differ?"
     3: Highly engaging (Very interesting and captivating). Example: "What do the hats in the videos reveal about the event going on and time period of the scenes depicted?"

Factual Correctness: Evaluates whether the generated question contains any factual inaccuracies.
     0: Incorrect (factually incorrect). Example: "Why does Chandler want to leave after hanging out with the group, which includes Amy and Emma?" (Emma and Amy both are wrong).
     1: Mostly Incorrect (contains major factual errors, though a small part of the content may be accurate). Example: "Why does Chandler want to leave after hanging out with the group, which includes Joey and Amy?" (Joey is correct, Amy is wrong).
     2: Partially Correct (factually accurate in the main aspect but contains a minor mistake or omission). Example: "Why does Chandler want to leave after hanging out with the group, which includes Joey?"
     3: Factually correct. Example: "Why does Chandler want to leave after hanging out with the group, which includes Joey and Monica?"

Inclusiveness: Evaluates whether the generated question is inclusive and avoids any potentially biased or discriminatory language.
     0: Not inclusive (The question contains biased or discriminatory language or assumptions). Example: "Why are the women in the video acting emotionally?"
     1: Slightly inclusive (The question is mostly neutral but could be phrased more inclusively). Example: "What are the people in the video doing?" (If the context strongly implies a specific gender)
     2: Moderately inclusive (The question attempts to use neutral language but might still have some underlying assumptions). Example: "What is the role of each person in the scene?"
     3: Highly inclusive (The question uses neutral and respectful language, avoiding any biased or discriminatory assumptions about gender, race, age, etc.). Example: "What actions are the individuals performing in the video?"

Question: {question}
Context: {context}

Output Structure: Fluency: value,
Relevance: value,
Multi-Hop Reasoning: value, Engagingness: value,
Factual Correctness: value,
Inclusiveness: value,
)";

void replace_slot(std::string& text, std::string_view slot,
                  std::string_view value) {
  const auto pos = text.find(slot);
  if (pos != std::string::npos) text.replace(pos, slot.size(), value);
}

}  // namespace

std::string_view judge_prompt_template() { return kTemplateV1; }

std::string build_judge_prompt(std::string_view question,
                               std::string_view context) {
  if (question.empty()) throw UsageError("judge prompt: question is empty");
  std::string text(kTemplateV1);
  // Context first so a "{question}" inside the context is never expanded.
  replace_slot(text, "{context}", context);
  replace_slot(text, "{question}", question);
  return text;
}

}  // namespace twohop
