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

#ifndef TWOHOP_JUDGE_HPP_
#define TWOHOP_JUDGE_HPP_

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "twohop/error.hpp"
#include "twohop/metrics.hpp"
#include "twohop/quality.hpp"

namespace twohop {

// Version tag of the evaluator prompt template. Bump when the text changes.
inline constexpr std::string_view kJudgePromptVersion = "v1";

// The evaluator template with "{question}" and "{context}" slots.
std::string_view judge_prompt_template();

// Throws UsageError when `question` is empty.
std::string build_judge_prompt(std::string_view question,
                               std::string_view context);

struct JudgeVerdict {
  Rubric rubric;
  std::string raw_response;

  bool operator==(const JudgeVerdict&) const = default;
};

// Base for verdict parse failures; carries the raw response text.
class VerdictError : public RemoteError {
 public:
  VerdictError(const std::string& what, std::string raw)
      : RemoteError(what), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

// One or more dimensions could not be found.
class VerdictParseError : public VerdictError {
 public:
  VerdictParseError(std::vector<Dimension> missing, std::string raw);
  const std::vector<Dimension>& missing() const { return missing_; }

 private:
  std::vector<Dimension> missing_;
};

// A dimension was found with a value outside 0..3.
class VerdictRangeError : public VerdictError {
 public:
  VerdictRangeError(Dimension dimension, long value, std::string raw);
  Dimension dimension() const { return dimension_; }
  long value() const { return value_; }

 private:
  Dimension dimension_;
  long value_;
};

// Extracts the six "Name: integer" pairs. Tolerates ordering, whitespace,
// case, markdown emphasis and trailing commas; every dimension is required.
JudgeVerdict parse_verdict(std::string_view response_text);

// Renders a rubric in the judge's output structure. parse_verdict inverts it.
std::string render_verdict(const Rubric& rubric);

struct JudgeEndpointConfig {
  std::string base_url = "http://127.0.0.1:8000";
  std::string model = "gpt-5-nano";
  // Environment variable holding the bearer token; empty disables auth.
  std::string token_env = "OPENAI_API_KEY";
  double timeout_seconds = 60;
  int max_retries = 3;
  int backoff_base_ms = 500;
  double temperature = 0;
  unsigned max_in_flight = 4;
  std::string chat_route = "/v1/chat/completions";
  std::string embedding_route = "/v1/embeddings";
  std::string embedding_model = "text-embedding-3-small";

  // timeout > 0, retries >= 0, in-flight >= 1; throws UsageError.
  void validate() const;
};

class JudgeConfigError : public UsageError {
 public:
  using UsageError::UsageError;
};

// Failed request after retries. status() is 0 when no HTTP response arrived.
class HttpStatusError : public RemoteError {
 public:
  HttpStatusError(int status, const std::string& what)
      : RemoteError(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct HttpResponse {
  int status = 0;  // 0 when the connection failed
  std::string body;
  std::string error;  // transport error description
};

// Minimal POST-JSON transport so tests can substitute a fake.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post_json(
      const std::string& route, const std::string& body,
      const std::map<std::string, std::string>& headers) = 0;
};

// cpp-httplib backed transport for http:// (and https:// when built with
// TLS) base URLs. A path component in the base URL prefixes every route.
std::unique_ptr<HttpTransport> make_http_transport(
    const JudgeEndpointConfig& cfg);

// Sends `body` with retries: connection failures, 408, 429 and 5xx are
// retried with exponential backoff; other statuses fail at once. Returns the
// 2xx response body or throws HttpStatusError.
std::string post_with_retry(HttpTransport& transport,
                            const JudgeEndpointConfig& cfg,
                            const std::string& route, const std::string& body,
                            const std::map<std::string, std::string>& headers,
                            const std::function<void(std::chrono::milliseconds)>&
                                sleep = {});

// Bearer header from cfg.token_env. Throws JudgeConfigError when the
// variable is named but unset.
std::map<std::string, std::string> auth_headers(const JudgeEndpointConfig& cfg);

struct JudgeItem {
  std::string question;
  std::string context;
};

struct JudgeItemError {
  enum class Kind {
    kInvalidItem,
    kTransport,
    kHttpStatus,
    kBadResponse,
    kParse,
    kRange,
  };
  Kind kind = Kind::kTransport;
  std::string message;
  std::string raw;
};

using JudgeOutcome = std::variant<JudgeVerdict, JudgeItemError>;

struct JudgeBatchOptions {
  // Overrides the sleep between retries (tests pass a no-op).
  std::function<void(std::chrono::milliseconds)> sleep;
};

// One chat request per item, up to cfg.max_in_flight at once. Results keep
// input order; failures occupy their slot as JudgeItemError. Throws
// JudgeConfigError before sending anything if auth is misconfigured.
std::vector<JudgeOutcome> judge_batch(const std::vector<JudgeItem>& items,
                                      const JudgeEndpointConfig& cfg,
                                      HttpTransport& transport,
                                      const JudgeBatchOptions& opts = {});
std::vector<JudgeOutcome> judge_batch(const std::vector<JudgeItem>& items,
                                      const JudgeEndpointConfig& cfg);

// Chat-completion request body for one prompt.
std::string chat_request_body(const JudgeEndpointConfig& cfg,
                              std::string_view prompt);
// choices[0].message.content; throws RemoteError when absent.
std::string chat_response_content(std::string_view body);

// Embeddings from an OpenAI-style /v1/embeddings route, sharing the judge's
// transport and retry policy.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(JudgeEndpointConfig cfg);
  HttpEmbeddingProvider(JudgeEndpointConfig cfg,
                        std::unique_ptr<HttpTransport> transport);

  Vector embed_sentence(const std::string& text) override;
  std::vector<Vector> embed_tokens(const TokenSequence& tokens) override;

 private:
  std::vector<Vector> embed(const std::vector<std::string>& inputs);

  JudgeEndpointConfig cfg_;
  std::unique_ptr<HttpTransport> transport_;
};

}  // namespace twohop

#endif  // TWOHOP_JUDGE_HPP_
