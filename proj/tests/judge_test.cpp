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

#include "twohop/judge.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <random>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "support/net.hpp"

namespace twohop {
namespace {

using nlohmann::json;

std::string chat_reply(const std::string& content) {
  json res;
  res["choices"] = json::array({{{"message", {{"role", "assistant"},
                                              {"content", content}}}}});
  return res.dump();
}

JudgeEndpointConfig test_config() {
  JudgeEndpointConfig cfg;
  cfg.token_env.clear();
  cfg.backoff_base_ms = 1;
  return cfg;
}

void no_sleep(std::chrono::milliseconds) {}

TEST(JudgePrompt, FillsSlotsAndKeepsOutputBlock) {
  const auto p = build_judge_prompt("Who came in?", "Ross: hi");
  EXPECT_NE(p.find("Question: Who came in?\nContext: Ross: hi\n"),
            std::string::npos);
  EXPECT_NE(p.find("Output Structure: Fluency: value,\nRelevance: value,\n"
                   "Multi-Hop Reasoning: value, Engagingness: value,\n"
                   "Factual Correctness: value,\nInclusiveness: value,"),
            std::string::npos);
  EXPECT_EQ(p.find("{question}"), std::string::npos);
  EXPECT_EQ(p.find("{context}"), std::string::npos);
  EXPECT_EQ(p, build_judge_prompt("Who came in?", "Ross: hi"));
  EXPECT_NE(judge_prompt_template().find("{question}"), std::string::npos);
  EXPECT_EQ(kJudgePromptVersion, "v1");
}

TEST(JudgePrompt, EmptyQuestionRejected) {
  EXPECT_THROW(build_judge_prompt("", "ctx"), UsageError);
  EXPECT_NO_THROW(build_judge_prompt("Who?", ""));
}

TEST(ParseVerdict, CanonicalOutput) {
  const auto v = parse_verdict(
      "Fluency: 3,\nRelevance: 3,\nMulti-Hop Reasoning: 2, Engagingness: 2,\n"
      "Factual Correctness: 3,\nInclusiveness: 3,");
  EXPECT_EQ(v.rubric, Rubric(3, 3, 2, 2, 3, 3));
}

TEST(ParseVerdict, Lenient) {
  EXPECT_EQ(parse_verdict("**Inclusiveness**: 1\n**Fluency**: 0\nrelevance:2\n"
                          "multi-hop reasoning : 3\nENGAGINGNESS: 1\n"
                          "Factual_Correctness: \"2\"")
                .rubric,
            Rubric(0, 2, 3, 1, 2, 1));
  EXPECT_EQ(parse_verdict("Sure! Here you go.\n- Fluency: 2\n- Relevance: 2\n"
                          "- Multi Hop Reasoning: 2\n- Engagingness: 2\n"
                          "- Factual Correctness: 2\n- Inclusiveness: 2\n")
                .rubric,
            Rubric(2, 2, 2, 2, 2, 2));
}

TEST(ParseVerdict, MissingDimension) {
  try {
    parse_verdict("Fluency: 3, Relevance: 3, Engagingness: 2, "
                  "Factual Correctness: 3, Inclusiveness: 3");
    FAIL() << "expected VerdictParseError";
  } catch (const VerdictParseError& e) {
    EXPECT_EQ(e.missing(), std::vector<Dimension>{Dimension::kMultiHopReasoning});
    EXPECT_NE(e.raw().find("Fluency"), std::string::npos);
  }
  EXPECT_THROW(parse_verdict(""), VerdictParseError);
  EXPECT_THROW(parse_verdict("I cannot rate this question."), VerdictParseError);
}

TEST(ParseVerdict, OutOfRangeAndNonInteger) {
  const std::string five =
      "Fluency: 5,\nRelevance: 3,\nMulti-Hop Reasoning: 2, Engagingness: 2,\n"
      "Factual Correctness: 3,\nInclusiveness: 3,";
  try {
    parse_verdict(five);
    FAIL() << "expected VerdictRangeError";
  } catch (const VerdictRangeError& e) {
    EXPECT_EQ(e.dimension(), Dimension::kFluency);
    EXPECT_EQ(e.value(), 5);
  }
  EXPECT_THROW(parse_verdict("Fluency: -1, Relevance: 3, Multi-Hop Reasoning: 2,"
                             " Engagingness: 2, Factual Correctness: 3, "
                             "Inclusiveness: 3"),
               VerdictRangeError);
  // A decimal value is not an integer score.
  EXPECT_THROW(parse_verdict("Fluency: 2.5, Relevance: 3, Multi-Hop Reasoning: 2,"
                             " Engagingness: 2, Factual Correctness: 3, "
                             "Inclusiveness: 3"),
               VerdictParseError);
  EXPECT_THROW(parse_verdict("Fluency: 99999999999999999999999, Relevance: 3, "
                             "Multi-Hop Reasoning: 2, Engagingness: 2, "
                             "Factual Correctness: 3, Inclusiveness: 3"),
               VerdictRangeError);
}

TEST(RenderVerdict, RoundTripsEveryRubric) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> s(0, 3);
  for (int i = 0; i < 1000; ++i) {
    const Rubric r(s(rng), s(rng), s(rng), s(rng), s(rng), s(rng));
    const auto text = render_verdict(r);
    const auto v = parse_verdict(text);
    EXPECT_EQ(v.rubric, r);
    EXPECT_EQ(v.raw_response, text);
  }
}

// Scripted in-process transport.
class FakeTransport : public HttpTransport {
 public:
  using Handler = std::function<HttpResponse(const std::string& prompt)>;
  explicit FakeTransport(Handler h) : handler_(std::move(h)) {}

  HttpResponse post_json(const std::string& route, const std::string& body,
                         const std::map<std::string, std::string>& headers) override {
    ++calls;
    {
      std::lock_guard lock(mu_);
      last_route = route;
      last_headers = headers;
    }
    const auto req = json::parse(body);
    return handler_(req.at("messages").at(0).at("content").get<std::string>());
  }

  std::atomic<int> calls{0};
  std::string last_route;
  std::map<std::string, std::string> last_headers;

 private:
  Handler handler_;
  std::mutex mu_;
};

// Scores each question with fluency equal to its digit.
HttpResponse digit_scorer(const std::string& prompt) {
  const auto pos = prompt.find("Question: Q");
  const int d = prompt[pos + 11] - '0';
  return {200, chat_reply(render_verdict(Rubric(d % 4, 3, 3, 3, 3, 3))), ""};
}

TEST(JudgeBatch, KeepsInputOrder) {
  FakeTransport t(digit_scorer);
  std::vector<JudgeItem> items;
  for (int i = 0; i < 40; ++i) items.push_back({"Q" + std::to_string(i % 10) + "?", "c"});
  auto cfg = test_config();
  cfg.max_in_flight = 8;
  const auto out = judge_batch(items, cfg, t, {no_sleep});
  ASSERT_EQ(out.size(), items.size());
  for (int i = 0; i < 40; ++i) {
    const auto* v = std::get_if<JudgeVerdict>(&out[static_cast<std::size_t>(i)]);
    ASSERT_NE(v, nullptr);
    EXPECT_EQ(v->rubric[Dimension::kFluency], (i % 10) % 4);
  }
  EXPECT_EQ(t.last_route, "/v1/chat/completions");
  EXPECT_EQ(t.calls, 40);
}

TEST(JudgeBatch, PartialFailuresStayInTheirSlots) {
  FakeTransport t([](const std::string& prompt) -> HttpResponse {
    if (prompt.find("Question: Q1?") != std::string::npos) {
      return {200, chat_reply("no idea"), ""};
    }
    if (prompt.find("Question: Q2?") != std::string::npos) {
      return {400, "bad", ""};
    }
    if (prompt.find("Question: Q3?") != std::string::npos) {
      return {200, "{\"oops\":1}", ""};
    }
    return digit_scorer(prompt);
  });
  const std::vector<JudgeItem> items = {
      {"Q0?", ""}, {"Q1?", ""}, {"Q2?", ""}, {"Q3?", ""}, {"", ""}};
  const auto out = judge_batch(items, test_config(), t, {no_sleep});
  ASSERT_EQ(out.size(), 5u);
  EXPECT_TRUE(std::holds_alternative<JudgeVerdict>(out[0]));
  using Kind = JudgeItemError::Kind;
  EXPECT_EQ(std::get<JudgeItemError>(out[1]).kind, Kind::kParse);
  EXPECT_EQ(std::get<JudgeItemError>(out[1]).raw, "no idea");
  EXPECT_EQ(std::get<JudgeItemError>(out[2]).kind, Kind::kHttpStatus);
  EXPECT_EQ(std::get<JudgeItemError>(out[3]).kind, Kind::kBadResponse);
  EXPECT_EQ(std::get<JudgeItemError>(out[4]).kind, Kind::kInvalidItem);
}

TEST(JudgeBatch, RetriesTransientFailures) {
  std::atomic<int> attempts{0};
  FakeTransport t([&](const std::string& prompt) -> HttpResponse {
    const int n = attempts++;
    if (n == 0) return {0, "", "connection refused"};
    if (n == 1) return {503, "busy", ""};
    if (n == 2) return {429, "slow down", ""};
    return digit_scorer(prompt);
  });
  std::vector<std::chrono::milliseconds> waits;
  auto cfg = test_config();
  cfg.backoff_base_ms = 100;
  const auto out = judge_batch({{"Q2?", ""}}, cfg, t,
                               {[&](std::chrono::milliseconds d) { waits.push_back(d); }});
  ASSERT_TRUE(std::holds_alternative<JudgeVerdict>(out[0]));
  EXPECT_EQ(attempts, 4);
  EXPECT_EQ(waits, (std::vector<std::chrono::milliseconds>{
                       std::chrono::milliseconds(100), std::chrono::milliseconds(200),
                       std::chrono::milliseconds(400)}));
}

TEST(JudgeBatch, GivesUpAfterRetries) {
  FakeTransport t([](const std::string&) -> HttpResponse {
    return {0, "", "connection refused"};
  });
  auto cfg = test_config();
  cfg.max_retries = 2;
  const auto out = judge_batch({{"Q1?", ""}}, cfg, t, {no_sleep});
  const auto& err = std::get<JudgeItemError>(out[0]);
  EXPECT_EQ(err.kind, JudgeItemError::Kind::kTransport);
  EXPECT_NE(err.message.find("connection refused"), std::string::npos);
  EXPECT_EQ(t.calls, 3);
}

TEST(JudgeBatch, ClientErrorsAreNotRetried) {
  FakeTransport t([](const std::string&) -> HttpResponse { return {401, "", ""}; });
  const auto out = judge_batch({{"Q1?", ""}}, test_config(), t, {no_sleep});
  EXPECT_EQ(std::get<JudgeItemError>(out[0]).kind, JudgeItemError::Kind::kHttpStatus);
  EXPECT_EQ(t.calls, 1);
}

TEST(JudgeBatch, MissingTokenFailsBeforeSending) {
  FakeTransport t(digit_scorer);
  auto cfg = test_config();
  cfg.token_env = "TWOHOP_TEST_UNSET_TOKEN";
  ::unsetenv("TWOHOP_TEST_UNSET_TOKEN");
  EXPECT_THROW(judge_batch({{"Q1?", ""}}, cfg, t), JudgeConfigError);
  EXPECT_EQ(t.calls, 0);
}

TEST(JudgeBatch, SendsBearerToken) {
  FakeTransport t(digit_scorer);
  auto cfg = test_config();
  cfg.token_env = "TWOHOP_TEST_TOKEN";
  ::setenv("TWOHOP_TEST_TOKEN", "sekret", 1);
  judge_batch({{"Q1?", ""}}, cfg, t, {no_sleep});
  EXPECT_EQ(t.last_headers.at("Authorization"), "Bearer sekret");
  ::unsetenv("TWOHOP_TEST_TOKEN");
}

TEST(JudgeConfig, Validate) {
  auto cfg = test_config();
  EXPECT_NO_THROW(cfg.validate());
  cfg.max_in_flight = 0;
  EXPECT_THROW(cfg.validate(), JudgeConfigError);
  cfg = test_config();
  cfg.timeout_seconds = 0;
  EXPECT_THROW(cfg.validate(), JudgeConfigError);
}

TEST(ChatBody, CarriesModelAndTemperature) {
  auto cfg = test_config();
  cfg.model = "judge-model";
  const auto body = json::parse(chat_request_body(cfg, "hello"));
  EXPECT_EQ(body.at("model"), "judge-model");
  EXPECT_EQ(body.at("temperature"), 0.0);
  EXPECT_EQ(body.at("messages").at(0).at("content"), "hello");
  EXPECT_EQ(chat_response_content(chat_reply("x")), "x");
  EXPECT_THROW(chat_response_content("[]"), RemoteError);
}

// Real HTTP round trip against a loopback stub of the chat and embedding
// routes.
class LoopbackStub {
 public:
  LoopbackStub() {
    server_.Post("/api/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   ++chat_calls;
                   auth = req.get_header_value("Authorization");
                   res.set_content(chat_reply(render_verdict(Rubric(1, 2, 3, 0, 1, 2))),
                                   "application/json");
                 });
    server_.Post("/api/v1/embeddings",
                 [](const httplib::Request& req, httplib::Response& res) {
                   const auto in = json::parse(req.body).at("input");
                   json data = json::array();
                   // Reverse order with explicit indices.
                   for (std::size_t i = in.size(); i-- > 0;) {
                     const auto s = in[i].get<std::string>();
                     data.push_back({{"index", i},
                                     {"embedding", {1.0, static_cast<double>(s.size())}}});
                   }
                   res.set_content(json{{"data", data}}.dump(), "application/json");
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LoopbackStub() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/api"; }

  std::atomic<int> chat_calls{0};
  std::string auth;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(Loopback, JudgeBatchOverHttp) {
  LoopbackStub stub;
  auto cfg = test_config();
  cfg.base_url = stub.url();
  cfg.token_env = "TWOHOP_TEST_TOKEN";
  ::setenv("TWOHOP_TEST_TOKEN", "abc", 1);
  const auto out = judge_batch({{"Q1?", "c"}, {"Q2?", "c"}, {"Q3?", "c"}}, cfg);
  ::unsetenv("TWOHOP_TEST_TOKEN");
  ASSERT_EQ(out.size(), 3u);
  for (const auto& o : out) {
    ASSERT_TRUE(std::holds_alternative<JudgeVerdict>(o));
    EXPECT_EQ(std::get<JudgeVerdict>(o).rubric, Rubric(1, 2, 3, 0, 1, 2));
  }
  EXPECT_EQ(stub.chat_calls, 3);
  EXPECT_EQ(stub.auth, "Bearer abc");
}

TEST(Loopback, UnreachableEndpointIsTransportError) {
  const int port = net::closed_port();
  auto cfg = test_config();
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
  cfg.max_retries = 0;
  cfg.timeout_seconds = 2;
  const auto out = judge_batch({{"Q1?", ""}}, cfg);
  EXPECT_EQ(std::get<JudgeItemError>(out[0]).kind, JudgeItemError::Kind::kTransport);
}

TEST(Loopback, EmbeddingProvider) {
  LoopbackStub stub;
  auto cfg = test_config();
  cfg.base_url = stub.url();
  HttpEmbeddingProvider provider(cfg);
  EXPECT_EQ(provider.embed_sentence("abcd"), (Vector{1.0, 4.0}));
  const auto toks = provider.embed_tokens({"a", "bb", "ccc"});
  ASSERT_EQ(toks.size(), 3u);
  EXPECT_EQ(toks[0], (Vector{1.0, 1.0}));
  EXPECT_EQ(toks[2], (Vector{1.0, 3.0}));

  const std::vector<TextPair> pairs = {{"a bb", "a bb"}};
  const auto report = evaluate_corpus(pairs, &provider);
  ASSERT_TRUE(report.semantic_similarity);
  EXPECT_NEAR(*report.greedy_match_f1, 1.0, 1e-12);
}

TEST(EmbeddingProvider, ShortResponseIsRemoteError) {
  class Short : public HttpTransport {
   public:
    HttpResponse post_json(const std::string&, const std::string&,
                           const std::map<std::string, std::string>&) override {
      return {200, "{\"data\":[]}", ""};
    }
  };
  HttpEmbeddingProvider provider(test_config(), std::make_unique<Short>());
  EXPECT_THROW(provider.embed_sentence("x"), RemoteError);
}

}  // namespace
}  // namespace twohop
