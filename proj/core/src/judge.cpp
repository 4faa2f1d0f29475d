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

#include <algorithm>
#include <atomic>
#include <climits>
#include <cstdlib>
#include <regex>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace twohop {
namespace {

using nlohmann::json;

// Name patterns accept the usual drift in spelling of the two-word labels.
const std::array<const char*, kDimensionCount> kNamePatterns = {
    "fluency",
    "relevance",
    R"(multi[\s_-]*hop[\s_-]*reasoning)",
    "engagingness",
    R"(factual[\s_-]*correctness)",
    "inclusiveness",
};

const std::array<std::regex, kDimensionCount>& dimension_regexes() {
  static const auto regexes = [] {
    std::array<std::regex, kDimensionCount> out;
    for (std::size_t i = 0; i < kDimensionCount; ++i) {
      out[i] = std::regex(std::string(R"((?:^|[^a-z0-9])(?:)") +
                              kNamePatterns[i] +
                              R"()[\s*_"']*:[\s*_"']*([+-]?\d+)(?!\.\d|\d))",
                          std::regex::icase | std::regex::ECMAScript);
    }
    return out;
  }();
  return regexes;
}

bool retryable(int status) {
  return status == 0 || status == 408 || status == 429 || status >= 500;
}

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path_prefix;
};

ParsedUrl parse_base_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw JudgeConfigError("endpoint URL needs a scheme: " + url);
  }
  const auto path_begin = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.scheme_host_port = url.substr(0, path_begin);
  if (path_begin != std::string::npos) {
    out.path_prefix = url.substr(path_begin);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') {
      out.path_prefix.pop_back();
    }
  }
  return out;
}

class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(const JudgeEndpointConfig& cfg)
      : url_(parse_base_url(cfg.base_url)),
        timeout_(std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::duration<double>(cfg.timeout_seconds))) {}

  HttpResponse post_json(
      const std::string& route, const std::string& body,
      const std::map<std::string, std::string>& headers) override {
    // One client per call keeps the transport safe to share across threads.
    httplib::Client client(url_.scheme_host_port);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(url_.path_prefix + route, h, body,
                           "application/json");
    HttpResponse out;
    if (!res) {
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }

 private:
  ParsedUrl url_;
  std::chrono::microseconds timeout_;
};

JudgeOutcome judge_one(const JudgeItem& item, const JudgeEndpointConfig& cfg,
                       HttpTransport& transport,
                       const std::map<std::string, std::string>& headers,
                       const JudgeBatchOptions& opts) {
  using Kind = JudgeItemError::Kind;
  std::string prompt;
  try {
    prompt = build_judge_prompt(item.question, item.context);
  } catch (const UsageError& e) {
    return JudgeItemError{Kind::kInvalidItem, e.what(), {}};
  }
  std::string body;
  try {
    body = post_with_retry(transport, cfg, cfg.chat_route,
                           chat_request_body(cfg, prompt), headers, opts.sleep);
  } catch (const HttpStatusError& e) {
    return JudgeItemError{e.status() == 0 ? Kind::kTransport : Kind::kHttpStatus,
                          e.what(), {}};
  }
  std::string content;
  try {
    content = chat_response_content(body);
  } catch (const RemoteError& e) {
    return JudgeItemError{Kind::kBadResponse, e.what(), body};
  }
  try {
    return parse_verdict(content);
  } catch (const VerdictRangeError& e) {
    return JudgeItemError{Kind::kRange, e.what(), e.raw()};
  } catch (const VerdictError& e) {
    return JudgeItemError{Kind::kParse, e.what(), e.raw()};
  }
}

}  // namespace

VerdictParseError::VerdictParseError(std::vector<Dimension> missing,
                                     std::string raw)
    : VerdictError(
          [&] {
            std::string msg = "verdict is missing";
            for (auto d : missing) msg += std::string(" \"") +
                                          dimension_label(d) + "\"";
            return msg;
          }(),
          std::move(raw)),
      missing_(std::move(missing)) {}

VerdictRangeError::VerdictRangeError(Dimension dimension, long value,
                                     std::string raw)
    : VerdictError(std::string("verdict ") + dimension_label(dimension) +
                       " = " + std::to_string(value) + " is outside 0..3",
                   std::move(raw)),
      dimension_(dimension),
      value_(value) {}

JudgeVerdict parse_verdict(std::string_view response_text) {
  const std::string raw(response_text);
  std::array<long, kDimensionCount> values{};
  std::vector<Dimension> missing;
  const auto& regexes = dimension_regexes();
  for (std::size_t i = 0; i < kDimensionCount; ++i) {
    std::smatch m;
    if (!std::regex_search(raw, m, regexes[i])) {
      missing.push_back(kAllDimensions[i]);
      continue;
    }
    try {
      values[i] = std::stol(m[1].str());
    } catch (const std::out_of_range&) {
      values[i] = m[1].str().front() == '-' ? LONG_MIN : LONG_MAX;
    }
  }
  if (!missing.empty()) throw VerdictParseError(std::move(missing), raw);
  std::array<int, kDimensionCount> scores{};
  for (std::size_t i = 0; i < kDimensionCount; ++i) {
    if (values[i] < Rubric::kMinScore || values[i] > Rubric::kMaxScore) {
      throw VerdictRangeError(kAllDimensions[i], values[i], raw);
    }
    scores[i] = static_cast<int>(values[i]);
  }
  return JudgeVerdict{Rubric(scores), raw};
}

std::string render_verdict(const Rubric& rubric) {
  using D = Dimension;
  auto field = [&](D d) {
    return std::string(dimension_label(d)) + ": " + std::to_string(rubric[d]) +
           ",";
  };
  return field(D::kFluency) + "\n" + field(D::kRelevance) + "\n" +
         field(D::kMultiHopReasoning) + " " + field(D::kEngagingness) + "\n" +
         field(D::kFactualCorrectness) + "\n" + field(D::kInclusiveness);
}

void JudgeEndpointConfig::validate() const {
  if (!(timeout_seconds > 0)) throw JudgeConfigError("timeout must be > 0");
  if (max_retries < 0) throw JudgeConfigError("max_retries must be >= 0");
  if (backoff_base_ms < 0) throw JudgeConfigError("backoff must be >= 0");
  if (max_in_flight < 1) throw JudgeConfigError("max_in_flight must be >= 1");
  if (base_url.empty()) throw JudgeConfigError("endpoint URL is empty");
}

std::unique_ptr<HttpTransport> make_http_transport(
    const JudgeEndpointConfig& cfg) {
  return std::make_unique<HttplibTransport>(cfg);
}

std::map<std::string, std::string> auth_headers(
    const JudgeEndpointConfig& cfg) {
  std::map<std::string, std::string> headers;
  if (cfg.token_env.empty()) return headers;
  const char* token = std::getenv(cfg.token_env.c_str());
  if (token == nullptr || *token == '\0') {
    throw JudgeConfigError("environment variable " + cfg.token_env +
                           " is not set; it must hold the endpoint token");
  }
  headers["Authorization"] = std::string("Bearer ") + token;
  return headers;
}

std::string post_with_retry(HttpTransport& transport,
                            const JudgeEndpointConfig& cfg,
                            const std::string& route, const std::string& body,
                            const std::map<std::string, std::string>& headers,
                            const std::function<void(std::chrono::milliseconds)>&
                                sleep) {
  HttpResponse res;
  for (int attempt = 0;; ++attempt) {
    res = transport.post_json(route, body, headers);
    if (res.status >= 200 && res.status < 300) return res.body;
    if (!retryable(res.status) || attempt >= cfg.max_retries) break;
    const auto delay = std::chrono::milliseconds(
        static_cast<long long>(cfg.backoff_base_ms) << std::min(attempt, 20));
    if (sleep) {
      sleep(delay);
    } else {
      std::this_thread::sleep_for(delay);
    }
  }
  const int attempts = cfg.max_retries + 1;
  if (res.status == 0) {
    throw HttpStatusError(0, "request to " + route + " failed after " +
                                 std::to_string(attempts) +
                                 " attempt(s): " + res.error);
  }
  throw HttpStatusError(res.status, "request to " + route +
                                        " returned HTTP " +
                                        std::to_string(res.status));
}

std::string chat_request_body(const JudgeEndpointConfig& cfg,
                              std::string_view prompt) {
  nlohmann::ordered_json req;
  req["model"] = cfg.model;
  req["messages"] = json::array(
      {json{{"role", "user"}, {"content", std::string(prompt)}}});
  req["temperature"] = cfg.temperature;
  return req.dump();
}

std::string chat_response_content(std::string_view body) {
  try {
    const json res = json::parse(body);
    return res.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const json::exception& e) {
    throw RemoteError(std::string("unexpected chat response: ") + e.what());
  }
}

std::vector<JudgeOutcome> judge_batch(const std::vector<JudgeItem>& items,
                                      const JudgeEndpointConfig& cfg,
                                      HttpTransport& transport,
                                      const JudgeBatchOptions& opts) {
  cfg.validate();
  const auto headers = auth_headers(cfg);
  std::vector<JudgeOutcome> results(items.size(),
                                    JudgeItemError{JudgeItemError::Kind::kTransport,
                                                   "not attempted", {}});
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      results[i] = judge_one(items[i], cfg, transport, headers, opts);
    }
  };
  const auto workers =
      std::min<std::size_t>(cfg.max_in_flight, std::max<std::size_t>(1, items.size()));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  return results;
}

std::vector<JudgeOutcome> judge_batch(const std::vector<JudgeItem>& items,
                                      const JudgeEndpointConfig& cfg) {
  cfg.validate();
  auto transport = make_http_transport(cfg);
  return judge_batch(items, cfg, *transport);
}

}  // namespace twohop
